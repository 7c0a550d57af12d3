//! Process models and their MA, AR and autocovariance expansions.
//!
//! The outer function of a model is `h(z) = Σ c_n z^n`; its AR companion is
//! `-1/h(z) = Σ a_n z^n`. For a fractional ARIMA model
//! `h(z) = (1 - z)^{-d} θ(z)/φ(z)` both expansions are obtained from the
//! binomial series of `(1 - z)^{∓d}` followed by the rational-series
//! recurrence for `θ/φ` or `φ/θ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hankel::Correlator;
use crate::poly::RealPolynomial;
use crate::series::{cauchy_product, div_poly, one_minus_z_pow};

/// Largest admissible memory parameter.
pub const D_MAX: f64 = 0.5 - 1e-6;
/// Roots with modulus at or below `1 + UNIT_DISK_MARGIN` are rejected.
pub const UNIT_DISK_MARGIN: f64 = 1e-9;
/// Roots of the AR and MA polynomials closer than this are a common zero.
pub const COMMON_ZERO_DISTANCE: f64 = 1e-8;
/// Absolute tolerance of the `c ⋆ a = -δ_0` identity for explicit sequences.
pub const CONVOLUTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    Ma,
    Ar,
}

/// A truncated MA (`c_0..c_N`) or AR (`a_0..a_N`) expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    kind: CoeffKind,
    values: Vec<f64>,
}

impl CoeffSeq {
    pub fn new(kind: CoeffKind, values: Vec<f64>) -> Result<Self> {
        let first = *values
            .first()
            .ok_or_else(|| Error::Argument("coefficient sequence is empty".into()))?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("coefficients must be finite".into()));
        }
        match kind {
            CoeffKind::Ma if first <= 0.0 => Err(Error::ModelValidation(format!(
                "MA coefficients need c_0 > 0 (got {first})"
            ))),
            CoeffKind::Ar if first >= 0.0 => Err(Error::ModelValidation(format!(
                "AR coefficients need a_0 = -1/c_0 < 0 (got {first})"
            ))),
            _ => Ok(Self { kind, values }),
        }
    }

    pub fn kind(&self) -> CoeffKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The index `N` of the last stored coefficient.
    pub fn truncation_length(&self) -> usize {
        self.values.len() - 1
    }

    /// Coefficient `i`, zero beyond the stored range.
    pub fn get(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }
}

/// Memory regime of a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// Absolutely summable MA and AR coefficients.
    ShortMemory,
    /// `c_n ~ ℓ n^{d-1}`, `a_n ~ d sin(πd)/(πℓ) n^{-1-d}` with `0 < d < 1/2`.
    LongMemory { d: f64 },
}

/// Parametric description of a purely nondeterministic stationary process.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessModel {
    /// `h(z) = (1 - z)^{-d} θ(z)/φ(z)` with `ar = φ`, `ma = θ`.
    Farima {
        d: f64,
        ar: RealPolynomial,
        ma: RealPolynomial,
    },
    /// `X_n = r X_{n-1} + e_n`.
    Ar1 { r: f64 },
    /// MA and AR sequences supplied directly, zero beyond their length.
    Explicit { c: CoeffSeq, a: CoeffSeq },
}

impl ProcessModel {
    pub fn farima(d: f64, ar: RealPolynomial, ma: RealPolynomial) -> Result<Self> {
        let m = Self::Farima { d, ar, ma };
        m.validate()?;
        Ok(m)
    }

    /// FARIMA(0, d, 0).
    pub fn fractional_noise(d: f64) -> Result<Self> {
        Self::farima(d, RealPolynomial::one(), RealPolynomial::one())
    }

    pub fn white_noise() -> Self {
        Self::Farima {
            d: 0.0,
            ar: RealPolynomial::one(),
            ma: RealPolynomial::one(),
        }
    }

    pub fn ar1(r: f64) -> Result<Self> {
        let m = Self::Ar1 { r };
        m.validate()?;
        Ok(m)
    }

    pub fn explicit(c: CoeffSeq, a: CoeffSeq) -> Result<Self> {
        let m = Self::Explicit { c, a };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Farima { d, ar, ma } => {
                if !(d.is_finite() && *d >= 0.0 && *d <= D_MAX) {
                    return Err(Error::ModelValidation(format!(
                        "d must lie in [0, {D_MAX}] (got {d})"
                    )));
                }
                let ratio = ma.coefficients()[0] / ar.coefficients()[0];
                if !(ratio > 0.0) {
                    return Err(Error::ModelValidation(format!(
                        "need θ(0)/φ(0) > 0 (got {ratio})"
                    )));
                }
                let ar_roots = ar.roots();
                let ma_roots = ma.roots();
                for (name, roots) in [("AR", &ar_roots), ("MA", &ma_roots)] {
                    if let Some(z) = roots.iter().find(|z| z.norm() <= 1.0 + UNIT_DISK_MARGIN) {
                        return Err(Error::ModelValidation(format!(
                            "{name} polynomial has a zero in the closed unit disk: {z} (|z| = {})",
                            z.norm()
                        )));
                    }
                }
                for za in &ar_roots {
                    for zm in &ma_roots {
                        if (za - zm).norm() < COMMON_ZERO_DISTANCE {
                            return Err(Error::ModelValidation(format!(
                                "AR and MA polynomials share the zero {za}"
                            )));
                        }
                    }
                }
                Ok(())
            }
            Self::Ar1 { r } => {
                if r.is_finite() && r.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::ModelValidation(format!("AR(1) needs |r| < 1 (got {r})")))
                }
            }
            Self::Explicit { c, a } => {
                if c.kind() != CoeffKind::Ma || a.kind() != CoeffKind::Ar {
                    return Err(Error::ModelValidation(
                        "explicit model needs an MA and an AR sequence".into(),
                    ));
                }
                let c0 = c.get(0);
                if (a.get(0) + 1.0 / c0).abs() > 1e-12 * (1.0 / c0).abs() {
                    return Err(Error::ModelValidation(format!(
                        "a_0 must equal -1/c_0 (got a_0 = {}, c_0 = {c0})",
                        a.get(0)
                    )));
                }
                let overlap = c.values().len().min(a.values().len());
                let residual = convolution_residual(&c.values()[..overlap], &a.values()[..overlap]);
                if residual > CONVOLUTION_TOL {
                    return Err(Error::ModelValidation(format!(
                        "c and a are not paired: max |c⋆a + δ_0| = {residual:.3e}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn regime(&self) -> Regime {
        match self {
            Self::Farima { d, .. } if *d > 0.0 => Regime::LongMemory { d: *d },
            _ => Regime::ShortMemory,
        }
    }

    /// Memory parameter `d`, zero for short-memory models.
    pub fn memory(&self) -> f64 {
        match self.regime() {
            Regime::LongMemory { d } => d,
            Regime::ShortMemory => 0.0,
        }
    }

    pub fn c0(&self) -> f64 {
        match self {
            Self::Farima { ar, ma, .. } => ma.coefficients()[0] / ar.coefficients()[0],
            Self::Ar1 { .. } => 1.0,
            Self::Explicit { c, .. } => c.get(0),
        }
    }

    /// `(d, φ, θ)` for models with a rational-times-fractional outer function.
    pub fn farima_parts(&self) -> Option<(f64, Vec<f64>, Vec<f64>)> {
        match self {
            Self::Farima { d, ar, ma } => {
                Some((*d, ar.coefficients().to_vec(), ma.coefficients().to_vec()))
            }
            Self::Ar1 { r } => Some((0.0, vec![1.0, -r], vec![1.0])),
            Self::Explicit { .. } => None,
        }
    }

    /// Number of terms after which the ARMA factors `θ/φ` and `φ/θ` have
    /// decayed below double precision.
    pub fn arma_decay_len(&self) -> usize {
        match self {
            Self::Explicit { c, a } => c.values().len().max(a.values().len()),
            _ => {
                let (_, ar, ma) = self.farima_parts().expect("rational model");
                let ar = RealPolynomial::new(ar).expect("validated");
                let ma = RealPolynomial::new(ma).expect("validated");
                let rho = ar.min_root_modulus().min(ma.min_root_modulus());
                if rho.is_infinite() {
                    return 1;
                }
                let degree = ar.degree().max(ma.degree()) as f64;
                // ρ^{-L} L^{p} < 1e-20, with room for repeated roots.
                let mut len = 8usize;
                while (len as f64).powf(degree) * rho.powf(-(len as f64)) > 1e-20 {
                    len += 8;
                    if len > 1 << 20 {
                        break;
                    }
                }
                len
            }
        }
    }
}

/// `max_n |Σ_{k≤n} c_k a_{n-k} + δ_{n0}|` over the common length.
pub fn convolution_residual(c: &[f64], a: &[f64]) -> f64 {
    let p = cauchy_product(a, c);
    p.iter()
        .enumerate()
        .map(|(n, v)| (v + if n == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

/// MA coefficients `c_0..c_N` of `h(z)`.
pub fn expand_ma(model: &ProcessModel, n: usize) -> Result<CoeffSeq> {
    model.validate()?;
    let values = match model {
        ProcessModel::Ar1 { r } => (0..=n).map(|k| r.powi(k as i32)).collect(),
        ProcessModel::Explicit { c, .. } => (0..=n).map(|k| c.get(k)).collect(),
        ProcessModel::Farima { d, ar, ma } => {
            let frac = one_minus_z_pow(-d, n + 1);
            div_poly(&cauchy_product(&frac, ma.coefficients()), ar.coefficients())
        }
    };
    CoeffSeq::new(CoeffKind::Ma, values)
}

/// AR coefficients `a_0..a_N` of `-1/h(z)`.
pub fn expand_ar(model: &ProcessModel, n: usize) -> Result<CoeffSeq> {
    model.validate()?;
    let values = match model {
        ProcessModel::Ar1 { r } => (0..=n)
            .map(|k| match k {
                0 => -1.0,
                1 => *r,
                _ => 0.0,
            })
            .collect(),
        ProcessModel::Explicit { a, .. } => (0..=n).map(|k| a.get(k)).collect(),
        ProcessModel::Farima { d, ar, ma } => {
            let frac = one_minus_z_pow(*d, n + 1);
            div_poly(&cauchy_product(&frac, ar.coefficients()), ma.coefficients())
                .into_iter()
                .map(|v| -v)
                .collect()
        }
    };
    CoeffSeq::new(CoeffKind::Ar, values)
}

/// Index at which the constant ℓ is read off the MA tail.
const ELL_PROBE: usize = 1 << 15;

/// Empirical slowly varying constant `ℓ = lim c_n n^{1-d}` of a long-memory
/// model, from two octaves of the MA tail with the `1/n` term eliminated.
pub fn asymptotic_ell(model: &ProcessModel) -> Result<f64> {
    let d = match model.regime() {
        Regime::LongMemory { d } => d,
        Regime::ShortMemory => {
            return Err(Error::Regime("ℓ is only defined for long-memory models".into()))
        }
    };
    let probe = ELL_PROBE.max(4 * model.arma_decay_len());
    let c = expand_ma(model, probe)?;
    let scaled = |k: usize| c.get(k) * (k as f64).powf(1.0 - d);
    Ok(2.0 * scaled(probe) - scaled(probe / 2))
}

/// Truncated autocovariances `γ(0..N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovSeq {
    values: Vec<f64>,
    tail_estimate: f64,
}

impl AutocovSeq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tail(values, 0.0)
    }

    pub fn with_tail(values: Vec<f64>, tail_estimate: f64) -> Result<Self> {
        let g0 = *values
            .first()
            .ok_or_else(|| Error::Argument("autocovariance sequence is empty".into()))?;
        if !(g0 > 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::ModelValidation(format!("need finite γ with γ(0) > 0 (got {g0})")));
        }
        if let Some((n, g)) = values
            .iter()
            .enumerate()
            .find(|(_, g)| g.abs() > g0 * (1.0 + 1e-12))
        {
            return Err(Error::ModelValidation(format!(
                "|γ({n})| = {} exceeds γ(0) = {g0}",
                g.abs()
            )));
        }
        Ok(Self {
            values,
            tail_estimate,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Estimated uncertainty left after the truncated sums were corrected.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::with_tail(
            self.values.iter().map(|g| g * lambda).collect(),
            self.tail_estimate * lambda.abs(),
        )
    }

    /// Whether the Toeplitz matrices of orders `1..=order` are positive definite.
    pub fn is_positive_definite(&self, order: usize) -> bool {
        crate::levinson::durbin_levinson(self, order.min(self.len() - 1)).is_ok()
    }
}

/// Number of terms in the asymptotic expansion of the autocovariance tail.
const TAIL_SERIES_TERMS: usize = 40;

/// Autocovariances `γ(n) = Σ_k c_{n+k} c_k` for `n = 0..=max_lag`, using MA
/// coefficients up to index `m_terms`.
///
/// Long-memory tails `Σ_{k > m_terms - n}` are added from the fitted
/// asymptotics `c_k ≈ ℓ k^{d-1}(1 + e/k)`; the reported tail estimate is the
/// uncertainty of that correction, which must stay below `tol · γ(0)`.
pub fn autocov(model: &ProcessModel, max_lag: usize, m_terms: usize, tol: f64) -> Result<AutocovSeq> {
    if m_terms < max_lag {
        return Err(Error::Argument(format!(
            "MA truncation {m_terms} must be at least the largest lag {max_lag}"
        )));
    }
    if let ProcessModel::Explicit { c, .. } = model {
        model.validate()?;
        let c = c.values();
        let values = (0..=max_lag)
            .map(|n| c.iter().skip(n).zip(c).map(|(x, y)| x * y).sum())
            .collect();
        return AutocovSeq::new(values);
    }
    let c = expand_ma(model, m_terms)?;
    let cv = c.values();
    let mut segment = cv.to_vec();
    segment.resize(cv.len() + max_lag, 0.0);
    let corr = Correlator::new(&segment, cv.len(), max_lag + 1)?;
    let mut values = corr.apply(cv);

    let uncertainty = match model.regime() {
        Regime::ShortMemory => {
            let total: f64 = cv.iter().map(|v| v.abs()).sum();
            let last = cv[cv.len() / 2..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            total * last * (cv.len() / 2) as f64
        }
        Regime::LongMemory { d } => {
            let k2 = m_terms as f64;
            let k1 = (m_terms / 2) as f64;
            let r2 = cv[m_terms] * k2.powf(1.0 - d);
            let r1 = cv[m_terms / 2] * k1.powf(1.0 - d);
            // r(k) = ℓ (1 + e/k)
            let ell = (k2 * r2 - k1 * r1) / (k2 - k1);
            let e = (r1 / ell - 1.0) * k1;
            let mut worst = 0.0f64;
            for (lag, g) in values.iter_mut().enumerate() {
                let x = (m_terms - lag) as f64 + 0.5;
                let ratio = lag as f64 / x;
                if ratio > 0.5 {
                    return Err(Error::Truncation {
                        what: format!("autocovariance tail at lag {lag}"),
                        achieved: f64::INFINITY,
                        required: tol,
                    });
                }
                let tail = ell * ell * power_tail_integral(d, lag as f64, e, x);
                *g += tail;
                let err = tail.abs() * (1.0 + e * e) / (x * x);
                worst = worst.max(err);
            }
            worst
        }
    };
    let g0 = values[0];
    if uncertainty > tol * g0 {
        return Err(Error::Truncation {
            what: "autocovariance tail".into(),
            achieved: uncertainty / g0,
            required: tol,
        });
    }
    AutocovSeq::with_tail(values, uncertainty)
}

/// `∫_x^∞ t^{d-1}(1 + e/t) · (t + lag)^{d-1}(1 + e/(t + lag)) dt`, expanded in
/// powers of `1/t` (valid for `lag/x < 1`).
fn power_tail_integral(d: f64, lag: f64, e: f64, x: f64) -> f64 {
    let terms = TAIL_SERIES_TERMS;
    // (1 + lag u)^{d-1}
    let mut a = vec![0.0; terms];
    let mut binom = 1.0;
    for (i, ai) in a.iter_mut().enumerate() {
        *ai = binom * lag.powi(i as i32);
        binom *= (d - 1.0 - i as f64) / (i as f64 + 1.0);
    }
    // 1 + e u (1 + lag u)^{-1}
    let mut b = vec![0.0; terms];
    b[0] = 1.0;
    for i in 1..terms {
        b[i] = e * (-lag).powi(i as i32 - 1);
    }
    let ab = cauchy_product(&a, &b);
    // times (1 + e u)
    let mut p = ab.clone();
    for i in 1..terms {
        p[i] += e * ab[i - 1];
    }
    p.iter()
        .enumerate()
        .map(|(i, pi)| pi * x.powf(2.0 * d - 1.0 - i as f64) / (1.0 + i as f64 - 2.0 * d))
        .sum()
}

/// Infinite-past predictor coefficients `φ_j = c_0 a_j`, returned for
/// `j = 1..=n` (element `j - 1` holds `φ_j`).
pub fn infinite_predictor(c: &CoeffSeq, a: &CoeffSeq, n: usize) -> Result<Vec<f64>> {
    if c.kind() != CoeffKind::Ma || a.kind() != CoeffKind::Ar {
        return Err(Error::Argument("infinite_predictor needs (MA, AR) sequences".into()));
    }
    if a.truncation_length() < n {
        return Err(Error::Argument(format!(
            "AR sequence has {} terms, need {n}",
            a.truncation_length()
        )));
    }
    let c0 = c.get(0);
    Ok((1..=n).map(|j| c0 * a.get(j)).collect())
}

/// `Σ_{k > n} |φ_k|` from `phi = [φ_1, …, φ_N]`.
///
/// Long-memory models add the asymptotic remainder beyond `N`,
/// `c_0 sin(πd) / (π ℓ (N + 1/2)^d)`.
pub fn tail_sum_phi(phi: &[f64], n: usize, model: &ProcessModel) -> Result<f64> {
    let big_n = phi.len();
    if n >= big_n {
        return Err(Error::Argument(format!(
            "tail start n = {n} must be below the truncation length {big_n}"
        )));
    }
    let finite: f64 = phi[n..].iter().map(|v| v.abs()).sum();
    match model.regime() {
        Regime::ShortMemory => Ok(finite),
        Regime::LongMemory { d } => {
            let ell = asymptotic_ell(model)?;
            let rest = model.c0() * (PI * d).sin() / (PI * ell * (big_n as f64 + 0.5).powf(d));
            Ok(finite + rest)
        }
    }
}
