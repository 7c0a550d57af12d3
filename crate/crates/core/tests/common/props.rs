//! Structural properties shared by the property tests and the acceptance
//! run. Each check returns a proptest failure instead of panicking.

use predictorlab::coeffs::{autocov, convolution_residual, expand_ar, expand_ma, AutocovSeq, ProcessModel};
use predictorlab::explicit::{
    delta_block, finite_predictor_explicit, hankel_apply, hankel_apply_naive, BetaSeq, TruncationPolicy,
};
use predictorlab::levinson::durbin_levinson;
use predictorlab::poly::RealPolynomial;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// `Π (1 - z / r)` over the given real roots.
fn from_roots(roots: &[f64]) -> RealPolynomial {
    let mut coeffs = vec![1.0];
    for r in roots {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c / r;
        }
        coeffs = next;
    }
    RealPolynomial::new(coeffs).unwrap()
}

fn root() -> impl Strategy<Value = f64> {
    (1.2f64..5.0, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

/// FARIMA models with real ARMA roots of modulus in `[1.2, 5]`.
pub fn model(d_max: f64) -> impl Strategy<Value = ProcessModel> {
    (
        prop_oneof![Just(0.0), 0.0..d_max],
        prop::collection::vec(root(), 0..=2),
        prop::collection::vec(root(), 0..=2),
    )
        .prop_filter_map("shared zeros", |(d, ar, ma)| {
            ProcessModel::farima(d, from_roots(&ar), from_roots(&ma)).ok()
        })
}

pub fn check_convolution(m: &ProcessModel) -> Result<(), TestCaseError> {
    let c = expand_ma(m, 400).unwrap();
    let a = expand_ar(m, 400).unwrap();
    let r = convolution_residual(c.values(), a.values());
    prop_assert!(r < 1e-10, "residual {r:e} for {m:?}");
    Ok(())
}

pub fn check_hankel(d: f64, offset: usize, x: &[f64]) -> Result<(), TestCaseError> {
    let v = x.len();
    let beta = BetaSeq::for_model(&ProcessModel::fractional_noise(d).unwrap(), offset + 2 * v).unwrap();
    let fast = hankel_apply(&beta, offset, x).unwrap();
    let slow = hankel_apply_naive(&beta, offset, x).unwrap();
    for j in 0..v {
        let scale: f64 = (0..v).map(|i| (beta.get(offset + j + i) * x[i]).abs()).sum();
        prop_assert!(
            (fast[j] - slow[j]).abs() <= 1e-12 * scale,
            "j = {j}: {} vs {}",
            fast[j],
            slow[j]
        );
    }
    Ok(())
}

pub fn check_delta_symmetry(m: &ProcessModel, n: usize, v_max: usize) -> Result<(), TestCaseError> {
    let policy = TruncationPolicy::for_model(m, n);
    let beta = BetaSeq::for_model(m, n + 2 * policy.v).unwrap();
    let block = delta_block(m, &beta, n, v_max, &policy).unwrap();
    for k in 1..=block.k_used() {
        for u in 0..=v_max {
            for v in 0..u {
                let gap = (block.get(k, u, v) - block.get(k, v, u)).abs();
                prop_assert!(gap < 1e-10, "k = {k}, u = {u}, v = {v}: {gap:e}");
            }
        }
    }
    Ok(())
}

pub fn check_first_term(m: &ProcessModel, n: usize) -> Result<(), TestCaseError> {
    let p = finite_predictor_explicit(m, n, &TruncationPolicy::for_model(m, n)).unwrap();
    let a = expand_ar(m, n).unwrap();
    for j in 1..=n {
        prop_assert_eq!(p.terms[j - 1].terms[0], m.c0() * a.get(j));
    }
    Ok(())
}

pub fn check_levinson_scaling(m: &ProcessModel, n: usize, lambda: f64) -> Result<(), TestCaseError> {
    let g: AutocovSeq = autocov(m, n, 1 << 18, 1e-8).unwrap();
    let base = durbin_levinson(&g, n).unwrap();
    let scaled = durbin_levinson(&g.scaled(lambda).unwrap(), n).unwrap();
    for (a, b) in base.iter().zip(&scaled) {
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            prop_assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
        let ratio = b.sigma2.unwrap() / (lambda * a.sigma2.unwrap());
        prop_assert!((ratio - 1.0).abs() < 1e-12);
    }
    Ok(())
}
