//! Closed-form oracles shared by the integration tests. None of these go
//! through the library's expansion or series code.
#![allow(dead_code)]

use statrs::function::gamma::{gamma, ln_gamma};

/// Finite predictor of fractional noise:
/// `φ_{n,j} = -C(n,j) Γ(j-d) Γ(n-d-j+1) / (Γ(-d) Γ(n-d+1))`.
pub fn fn_finite_predictor(d: f64, n: usize) -> Vec<f64> {
    let nf = n as f64;
    (1..=n)
        .map(|j| {
            let jf = j as f64;
            let ln = ln_gamma(nf + 1.0) - ln_gamma(jf + 1.0) - ln_gamma(nf - jf + 1.0)
                + ln_gamma(jf - d)
                + ln_gamma(nf - d - jf + 1.0)
                - ln_gamma(nf - d + 1.0);
            -ln.exp() / gamma(-d)
        })
        .collect()
}

/// Autocovariances of fractional noise with unit innovation variance.
pub fn fn_autocov(d: f64, len: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(len);
    g.push(gamma(1.0 - 2.0 * d) / gamma(1.0 - d).powi(2));
    for k in 1..len {
        let kf = k as f64;
        g.push(g[k - 1] * (kf - 1.0 + d) / (kf - d));
    }
    g
}

/// `c_n` of `(1 - z)^{-d}` by the ratio recurrence.
pub fn fn_ma(d: f64, len: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for k in 1..len {
        c.push(c[k - 1] * (k as f64 - 1.0 + d) / k as f64);
    }
    c
}

/// `a_n` of `-(1 - z)^d` by the ratio recurrence.
pub fn fn_ar(d: f64, len: usize) -> Vec<f64> {
    let mut a = vec![-1.0];
    for k in 1..len {
        a.push(a[k - 1] * (k as f64 - 1.0 - d) / k as f64);
    }
    a
}

pub fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub mod props;
