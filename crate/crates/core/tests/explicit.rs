mod common;

use std::f64::consts::PI;

use predictorlab::asymptotics::fk0;
use predictorlab::coeffs::*;
use predictorlab::explicit::*;
use predictorlab::levinson::{durbin_levinson, multistep_normal_solve, PredictorSource};
use predictorlab::poly::RealPolynomial;
use predictorlab::Error;

fn fnoise(d: f64) -> ProcessModel {
    ProcessModel::fractional_noise(d).unwrap()
}

fn arma_farima(d: f64) -> ProcessModel {
    ProcessModel::farima(
        d,
        RealPolynomial::new(vec![1.0, -0.5]).unwrap(),
        RealPolynomial::new(vec![1.0, 0.4]).unwrap(),
    )
    .unwrap()
}

fn explicit(model: &ProcessModel, n: usize) -> ExplicitPrediction {
    finite_predictor_explicit(model, n, &TruncationPolicy::for_model(model, n)).unwrap()
}

#[test]
fn beta_examples() {
    let b = BetaSeq::for_model(&ProcessModel::ar1(0.5).unwrap(), 6).unwrap();
    assert!((b.get(0) + 0.75).abs() < 1e-15 && (b.get(1) - 0.5).abs() < 1e-15);
    assert!(b.values()[2..].iter().all(|v| v.abs() < 1e-15));

    let b = BetaSeq::for_model(&ProcessModel::white_noise(), 4).unwrap();
    assert_eq!(b.values(), &[-1.0, 0.0, 0.0, 0.0, 0.0]);

    let d = 0.3;
    let b = BetaSeq::for_model(&fnoise(d), 10_000).unwrap();
    let scaled = 1e4 * b.get(10_000);
    assert!((scaled / ((PI * d).sin() / PI) - 1.0).abs() < 0.02);
    // Eventually positive.
    assert!(b.values()[1..].iter().all(|&v| v > 0.0));
}

#[test]
fn beta_matches_direct_sums() {
    // Summands behave like d sin(πd) / (π v²), which fixes the remainder.
    let big = 2_000_000;
    for d in [0.1, 0.3, 0.45] {
        let c = common::fn_ma(d, big + 20);
        let a = common::fn_ar(d, big + 20);
        let b = BetaSeq::for_model(&fnoise(d), 16).unwrap();
        for n in [0, 1, 5, 16] {
            let direct: f64 = (0..big).map(|v| c[v] * a[v + n]).sum::<f64>()
                + d * (PI * d).sin() / (PI * big as f64);
            assert!((b.get(n) - direct).abs() < 1e-8 * direct.abs(), "d = {d}, n = {n}");
        }
    }
}

#[test]
fn beta_seq_from_truncated_sequences() {
    let m = ProcessModel::ar1(0.5).unwrap();
    let c = expand_ma(&m, 200).unwrap();
    let a = expand_ar(&m, 200).unwrap();
    let b = beta_seq(&c, &a, 50, 1e-12).unwrap();
    assert!((b.get(0) + 0.75).abs() < 1e-15);
    assert!(b.tail_bound() <= 1e-12);

    let m = fnoise(0.3);
    let c = expand_ma(&m, 400).unwrap();
    let a = expand_ar(&m, 400).unwrap();
    assert!(matches!(beta_seq(&c, &a, 100, 1e-12), Err(Error::Truncation { .. })));
    assert!(matches!(beta_seq(&c, &a, 300, 1e-2), Err(Error::Argument(_))));
}

#[test]
fn hankel_examples() {
    let b = BetaSeq::for_model(&fnoise(0.3), 300).unwrap();
    let mut e0 = vec![0.0; 64];
    e0[0] = 1.0;
    let y = hankel_apply(&b, 10, &e0).unwrap();
    for (j, v) in y.iter().enumerate() {
        assert!((v - b.get(10 + j)).abs() < 1e-15);
    }

    let ar = BetaSeq::for_model(&ProcessModel::ar1(0.5).unwrap(), 40).unwrap();
    let x: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
    assert!(hankel_apply(&ar, 2, &x).unwrap().iter().all(|v| v.abs() < 1e-15));

    let x: Vec<f64> = (0..64).map(|i| ((i * 7919) % 113) as f64 / 113.0 - 0.5).collect();
    let fast = hankel_apply(&b, 3, &x).unwrap();
    let slow = hankel_apply_naive(&b, 3, &x).unwrap();
    let scale = slow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(common::max_abs_diff(&fast, &slow) <= 1e-12 * scale);

    assert!(matches!(hankel_apply(&b, 200, &x), Err(Error::Argument(_))));
}

#[test]
fn d_vectors_examples() {
    let ar = ProcessModel::ar1(0.5).unwrap();
    let d = d_vectors(&ar, 4, &TruncationPolicy::for_model(&ar, 4)).unwrap();
    assert_eq!(d.len(), 1);
    assert!(d[0].iter().all(|&v| v == 0.0));

    let dd = 0.3;
    let s = (PI * dd).sin();
    let m = fnoise(dd);
    let mut errors = Vec::new();
    for n in [256, 1024] {
        let dk = d_vectors(&m, n, &TruncationPolicy::for_model(&m, n)).unwrap();
        let nf = n as f64;
        errors.push((
            (nf * dk[0][0] / (s / PI) - 1.0).abs(),
            (nf * dk[1][0] / (s * s / (PI * PI)) - 1.0).abs(),
        ));
    }
    // Relative gaps shrink towards the limits.
    assert!(errors[1].0 < errors[0].0 && errors[1].0 < 2e-3);
    assert!(errors[1].1 < errors[0].1 && errors[1].1 < 2e-3);
}

#[test]
fn d_vectors_are_positive_and_bounded() {
    let d = 0.3;
    let m = fnoise(d);
    let n = 256;
    let policy = TruncationPolicy::for_model(&m, n);
    let dk = d_vectors(&m, n, &policy).unwrap();
    let fk = fk0(dk.len());
    let s = (PI * d).sin();
    for (k, vec) in dk.iter().enumerate() {
        // Iterates far below the stopping tolerance carry only rounding noise.
        if vec[0] < 1e-12 {
            break;
        }
        let bound = fk[k] * (1.05 * s).powi(k as i32 + 1) * (1.0 + 1e-3);
        for &v in vec {
            assert!(v > 0.0, "k = {}", k + 1);
            assert!(n as f64 * v <= bound, "k = {}", k + 1);
        }
    }
}

#[test]
fn d_vectors_when_series_kernel_vanishes() {
    // Pure AR(2) at n = 2: H_3 vanishes, H_2 has the eigenvalue a_2.
    let ar = RealPolynomial::new(vec![1.0, -5.0 / 3.0, 25.0 / 36.0]).unwrap();
    let m = ProcessModel::farima(0.0, ar, RealPolynomial::one()).unwrap();
    let dk = d_vectors(&m, 2, &TruncationPolicy::for_model(&m, 2)).unwrap();
    let a2: f64 = -25.0 / 36.0;
    for (k, d) in dk.iter().enumerate().take(10) {
        assert!((d[0] - a2.powi(k as i32 + 1)).abs() < 1e-14);
    }
    let p = explicit(&m, 2);
    assert_eq!(p.k_used(), 1);
}

#[test]
fn ar1_explicit_predictor() {
    let m = ProcessModel::ar1(0.5).unwrap();
    let p = explicit(&m, 10);
    assert_eq!(p.table.source, PredictorSource::ExplicitSeries);
    assert!((p.table.coefficient(1) - 0.5).abs() < 1e-15);
    assert!(p.table.coefficients[1..].iter().all(|v| v.abs() < 1e-15));
    assert_eq!(p.terms[0].k_used(), 1);
    for t in &p.terms {
        assert!(t.terms[1..].iter().all(|&g| g == 0.0));
        assert!(t.converged);
    }
}

#[test]
fn fractional_noise_matches_closed_form() {
    for d in [0.1, 0.3, 0.45] {
        for n in [1, 2, 8, 64] {
            let p = explicit(&fnoise(d), n);
            let exact = common::fn_finite_predictor(d, n);
            let err = common::max_abs_diff(&p.table.coefficients, &exact);
            assert!(err < 1e-7, "d = {d}, n = {n}: {err:e}");
            assert!(p.terms.iter().all(|t| t.converged));
        }
    }
}

#[test]
fn fractional_noise_matches_levinson() {
    let d = 0.3;
    let g = AutocovSeq::new(common::fn_autocov(d, 65)).unwrap();
    let lev = durbin_levinson(&g, 64).unwrap();
    let p = explicit(&fnoise(d), 64);
    assert!(common::max_abs_diff(&p.table.coefficients, &lev[63].coefficients) < 1e-6);
}

#[test]
fn arma_farima_matches_levinson() {
    for d in [0.0, 0.2, 0.4] {
        let m = arma_farima(d);
        let g = autocov(&m, 64, 1 << 20, 1e-12).unwrap();
        let lev = durbin_levinson(&g, 64).unwrap();
        for n in [4, 64] {
            let p = explicit(&m, n);
            let err = common::max_abs_diff(&p.table.coefficients, &lev[n - 1].coefficients);
            let tol = if d == 0.0 { 1e-9 } else { 1e-6 };
            assert!(err < tol, "d = {d}, n = {n}: {err:e}");
        }
    }
}

#[test]
fn short_memory_models_match_levinson() {
    let models = [
        ProcessModel::ar1(-0.9).unwrap(),
        ProcessModel::farima(
            0.0,
            RealPolynomial::new(vec![1.0, -0.5, 0.06]).unwrap(),
            RealPolynomial::new(vec![1.0, 0.7]).unwrap(),
        )
        .unwrap(),
    ];
    for m in &models {
        let g = autocov(m, 32, 1 << 16, 1e-12).unwrap();
        let lev = durbin_levinson(&g, 32).unwrap();
        for n in [1, 2, 8, 32] {
            let p = explicit(m, n);
            assert!(common::max_abs_diff(&p.table.coefficients, &lev[n - 1].coefficients) < 1e-9);
        }
    }
}

#[test]
fn first_term_is_infinite_predictor() {
    for m in [fnoise(0.3), arma_farima(0.2), ProcessModel::ar1(0.7).unwrap()] {
        let n = 16;
        let p = explicit(&m, n);
        let a = expand_ar(&m, n).unwrap();
        for j in 1..=n {
            assert_eq!(p.terms[j - 1].terms[0], m.c0() * a.get(j));
        }
    }
}

#[test]
fn series_terms_structure() {
    let p = explicit(&fnoise(0.3), 32);
    for t in &p.terms {
        for k in 1..t.k_used() {
            assert!((t.partial_sums[k] - t.partial_sums[k - 1] - t.terms[k]).abs() < 1e-15);
        }
        assert!(t.converged && t.tail_estimate < 1e-12);
        assert_eq!(*t.partial_sums.last().unwrap(), t.terms.iter().sum::<f64>());
    }
}

#[test]
fn delta_block_examples() {
    let m = fnoise(0.3);
    let n = 32;
    let policy = TruncationPolicy::for_model(&m, n);
    let beta = BetaSeq::for_model(&m, n + 2 * policy.v).unwrap();
    let block = delta_block(&m, &beta, n, 6, &policy).unwrap();
    assert_eq!(block.v_max(), 6);
    assert_eq!(block.width(), policy.v);
    assert!((block.get(1, 2, 3) - beta.get(37)).abs() < 1e-15);
    assert_eq!(block.get(0, 4, 4), 1.0);
    assert_eq!(block.get(0, 4, 5), 0.0);

    let dk = d_vectors(&m, n, &policy).unwrap();
    assert_eq!(dk.len(), block.k_used());
    for (k, d) in dk.iter().enumerate() {
        for u in [0, 1, 10, 100] {
            assert_eq!(block.get(k + 1, u, 0), d[u]);
        }
    }
    for k in 1..=block.k_used() {
        for u in 0..=6 {
            for v in 0..=6 {
                assert!((block.get(k, u, v) - block.get(k, v, u)).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn delta_block_rejects_wide_horizon() {
    let m = fnoise(0.3);
    let policy = TruncationPolicy { v: 8, ..TruncationPolicy::for_model(&m, 4) };
    let beta = BetaSeq::for_model(&m, 40).unwrap();
    assert!(matches!(delta_block(&m, &beta, 4, 8, &policy), Err(Error::Argument(_))));
}

#[test]
fn multistep_examples() {
    let ar = ProcessModel::ar1(0.5).unwrap();
    let p = finite_predictor_multistep(&ar, 4, 2, &TruncationPolicy::for_model(&ar, 4)).unwrap();
    assert!((p.table.coefficient(1) - 0.125).abs() < 1e-15);
    assert!(p.table.coefficients[1..].iter().all(|v| v.abs() < 1e-15));
    assert_eq!(p.table.horizon, 2);

    let m = fnoise(0.3);
    let policy = TruncationPolicy::for_model(&m, 32);
    let zero = finite_predictor_multistep(&m, 32, 0, &policy).unwrap();
    assert_eq!(zero.table.coefficients, explicit(&m, 32).table.coefficients);

    let g = AutocovSeq::new(common::fn_autocov(0.3, 40)).unwrap();
    for horizon in [1, 2, 5] {
        let p = finite_predictor_multistep(&m, 32, horizon, &policy).unwrap();
        let normal = multistep_normal_solve(&g, 32, horizon).unwrap();
        let err = common::max_abs_diff(&p.table.coefficients, &normal.coefficients);
        assert!(err < 1e-6, "m = {horizon}: {err:e}");
    }
}

#[test]
fn projection_iterates_examples() {
    let m = fnoise(0.3);
    let n = 32;
    let policy = TruncationPolicy::for_model(&m, n);
    let c = expand_ma(&m, 8).unwrap();
    let a = expand_ar(&m, 64).unwrap();

    // First iterate: Wiener coefficient Σ_v c_{m-v} a_{j+v}.
    for (j, horizon) in [(1, 0), (3, 0), (1, 2), (5, 3)] {
        let it = projection_iterates(&m, n, j, horizon, 1, &policy).unwrap();
        let wiener: f64 = (0..=horizon).map(|v| c.get(horizon - v) * a.get(j + v)).sum();
        assert!((it[0] - wiener).abs() < 1e-15);
    }

    let ar = ProcessModel::ar1(0.5).unwrap();
    let it = projection_iterates(&ar, 6, 1, 0, 5, &TruncationPolicy::for_model(&ar, 6)).unwrap();
    assert!(it.iter().all(|&v| v == 0.5));

    // Errors fall by nearly sin²(πd) every two steps; the rate creeps up to
    // that bound from below as k grows.
    let target = explicit(&m, n).table.coefficient(1);
    let it = projection_iterates(&m, n, 1, 0, 40, &policy).unwrap();
    let err: Vec<f64> = it.iter().map(|v| (v - target).abs()).collect();
    let rate = |from: usize| (err[from + 9] / err[from - 1]).powf(0.2);
    let bound = (PI * 0.3).sin().powi(2);
    assert!(rate(10) < rate(20) && rate(20) < rate(30) && rate(30) < bound);
    assert!(rate(30) > 0.9 * bound, "rate {} vs {bound}", rate(30));

    assert!(matches!(projection_iterates(&m, n, 0, 0, 3, &policy), Err(Error::Argument(_))));
    assert!(matches!(projection_iterates(&m, n, 33, 0, 3, &policy), Err(Error::Argument(_))));
}

#[test]
fn default_series_depth() {
    let expected = ((1e-14f64).ln() / (PI * 0.3).sin().ln()).ceil() as usize + 8;
    assert_eq!(default_k_max(&fnoise(0.3), 8, 1e-14), expected);
    let policy = TruncationPolicy::for_model(&fnoise(0.3), 8);
    assert_eq!(policy.k_max, expected);
}

#[test]
fn non_convergence_is_reported() {
    let m = fnoise(0.45);
    let policy = TruncationPolicy { k_max: 5, ..TruncationPolicy::for_model(&m, 16) };
    assert!(matches!(
        finite_predictor_explicit(&m, 16, &policy),
        Err(Error::NonConvergence { k_max: 5, .. })
    ));
}

#[test]
fn discrete_policies_report_their_tail() {
    let n = 8;
    for d in [0.1, 0.2] {
        let m = fnoise(d);
        let exact = common::fn_finite_predictor(d, n);
        for strategy in [TailStrategy::RichardsonDouble, TailStrategy::IntegralBound] {
            let policy = TruncationPolicy::discrete(&m, n, strategy);
            assert_eq!(policy.v, 4096);
            // Plain truncation cannot certify the long-memory tail at this size.
            assert!(matches!(
                finite_predictor_explicit(&m, n, &policy),
                Err(Error::Truncation { .. })
            ));
            let relaxed = TruncationPolicy { tol_tail: 1e-3, ..policy };
            let p = finite_predictor_explicit(&m, n, &relaxed).unwrap();
            let err = common::max_abs_diff(&p.table.coefficients, &exact);
            assert!(err <= p.inner_tail_estimate, "d = {d}, {strategy:?}");
        }
    }
}

#[test]
fn explicit_model_sequences() {
    // AR(1) supplied through truncated sequences.
    let r: f64 = 0.6;
    let c = CoeffSeq::new(CoeffKind::Ma, (0..80).map(|k| r.powi(k)).collect()).unwrap();
    let a = CoeffSeq::new(CoeffKind::Ar, vec![-1.0, r]).unwrap();
    let m = ProcessModel::explicit(c, a).unwrap();
    let p = explicit(&m, 6);
    assert!((p.table.coefficient(1) - r).abs() < 1e-12);
    assert!(p.table.coefficients[1..].iter().all(|v| v.abs() < 1e-12));

    let c = CoeffSeq::new(CoeffKind::Ma, vec![1.0, 0.5]).unwrap();
    let a = CoeffSeq::new(CoeffKind::Ar, vec![-1.0, 0.7]).unwrap();
    assert!(matches!(ProcessModel::explicit(c, a), Err(Error::ModelValidation(_))));
}

#[test]
fn invalid_policy_is_rejected() {
    let m = fnoise(0.3);
    let policy = TruncationPolicy { tol_term: 0.0, ..TruncationPolicy::for_model(&m, 4) };
    assert!(matches!(finite_predictor_explicit(&m, 4, &policy), Err(Error::Argument(_))));
    let policy = TruncationPolicy::for_model(&m, 4);
    assert!(matches!(finite_predictor_explicit(&m, 0, &policy), Err(Error::Argument(_))));
}
