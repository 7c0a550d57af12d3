//! Gamma-function ratios that stay accurate for very large arguments.
//!
//! `ln Γ(x + a) − ln Γ(x + b)` computed as a difference of two `ln Γ` values
//! loses all precision once `x` is large, so the ratio is evaluated from the
//! difference of Stirling series directly.

const STIRLING_MIN: f64 = 20.0;

fn stirling_tail(z: f64) -> f64 {
    let z2 = z * z;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z
}

/// `ln(Γ(x + a) / Γ(x + b))`, requiring `x + a > 0` and `x + b > 0`.
pub fn ln_gamma_ratio(x: f64, a: f64, b: f64) -> f64 {
    debug_assert!(x + a > 0.0 && x + b > 0.0);
    let mut x = x;
    let mut shift = 0.0;
    // Γ(z + 1) = z Γ(z): move up until the Stirling series is accurate.
    while x + a.min(b) < STIRLING_MIN {
        shift += ((x + b) / (x + a)).ln();
        x += 1.0;
    }
    let za = x + a;
    let zb = x + b;
    let diff = a - b;
    (za - 0.5) * (diff / zb).ln_1p() + diff * zb.ln() - diff + stirling_tail(za) - stirling_tail(zb)
        + shift
}

/// `Γ(x + a) / Γ(x + b)`.
pub fn gamma_ratio(x: f64, a: f64, b: f64) -> f64 {
    ln_gamma_ratio(x, a, b).exp()
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn beta(a: f64, b: f64) -> f64 {
    statrs::function::beta::beta(a, b)
}
