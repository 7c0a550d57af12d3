//! Finite predictors from autocovariances: the Durbin–Levinson recursion for
//! one-step prediction and a Cholesky solve of the Toeplitz normal equations
//! for multistep prediction.

use nalgebra::{DMatrix, DVector};

use crate::coeffs::AutocovSeq;
use crate::error::{Error, Result};

/// Innovation variances below `DEGENERACY_FLOOR · γ(0)` are treated as zero.
pub const DEGENERACY_FLOOR: f64 = 1e-14;
/// Largest admissible residual of the normal equations, relative to `γ(0)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorSource {
    Levinson,
    NormalEquations,
    ExplicitSeries,
}

impl PredictorSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Levinson => "levinson",
            Self::NormalEquations => "normal-equations",
            Self::ExplicitSeries => "explicit",
        }
    }
}

/// Coefficients `φ^m_{n,1..n}` of the best linear predictor of `X_m` from
/// `X_{-1}, …, X_{-n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorTable {
    pub n: usize,
    pub horizon: usize,
    /// Element `j - 1` holds `φ^m_{n,j}`.
    pub coefficients: Vec<f64>,
    /// Prediction-error variance, known for one-step Levinson tables.
    pub sigma2: Option<f64>,
    pub source: PredictorSource,
}

impl PredictorTable {
    pub fn coefficient(&self, j: usize) -> f64 {
        self.coefficients[j - 1]
    }

    /// `max_j |Σ_i γ(|j-i|) φ_i - γ(m+j)|`.
    pub fn normal_equation_residual(&self, gamma: &AutocovSeq) -> f64 {
        let g = gamma.values();
        let n = self.n;
        (1..=n)
            .map(|j| {
                let lhs: f64 = (1..=n)
                    .map(|i| g[j.abs_diff(i)] * self.coefficients[i - 1])
                    .sum();
                (lhs - g[self.horizon + j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Runs the Durbin–Levinson recursion to order `n` and returns the one-step
/// tables of every order `1..=n` (element `k - 1` is order `k`).
pub fn durbin_levinson(gamma: &AutocovSeq, n: usize) -> Result<Vec<PredictorTable>> {
    let g = gamma.values();
    if n == 0 || g.len() < n + 1 {
        return Err(Error::Argument(format!(
            "Levinson to order {n} needs autocovariances γ(0..={n}), have {}",
            g.len()
        )));
    }
    let floor = DEGENERACY_FLOOR * g[0];
    let mut tables = Vec::with_capacity(n);
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut sigma2 = g[0];
    for k in 1..=n {
        let acc: f64 = phi.iter().enumerate().map(|(i, p)| p * g[k - 1 - i]).sum();
        let reflection = (g[k] - acc) / sigma2;
        let mut next = Vec::with_capacity(k);
        for i in 0..k - 1 {
            next.push(phi[i] - reflection * phi[k - 2 - i]);
        }
        next.push(reflection);
        sigma2 *= 1.0 - reflection * reflection;
        if !(sigma2 >= floor) || reflection.abs() >= 1.0 {
            return Err(Error::Degeneracy {
                order: k,
                detail: format!(
                    "innovation variance {sigma2:.3e} at or below {floor:.3e} (reflection {reflection})"
                ),
            });
        }
        phi = next;
        tables.push(PredictorTable {
            n: k,
            horizon: 0,
            coefficients: phi.clone(),
            sigma2: Some(sigma2),
            source: PredictorSource::Levinson,
        });
    }
    Ok(tables)
}

/// Solves `Γ_n x = (γ(m+1), …, γ(m+n))` by Cholesky factorization.
pub fn multistep_normal_solve(gamma: &AutocovSeq, n: usize, m: usize) -> Result<PredictorTable> {
    let g = gamma.values();
    if n == 0 || g.len() < n + m + 1 {
        return Err(Error::Argument(format!(
            "order {n}, horizon {m} needs autocovariances γ(0..={}), have {}",
            n + m,
            g.len()
        )));
    }
    let toeplitz = DMatrix::from_fn(n, n, |i, j| g[i.abs_diff(j)]);
    let rhs = DVector::from_fn(n, |j, _| g[m + j + 1]);
    let chol = toeplitz.clone().cholesky().ok_or_else(|| Error::Degeneracy {
        order: n,
        detail: "Toeplitz matrix is not numerically positive definite".into(),
    })?;
    let l = chol.l();
    let diag = l.diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let condition = (hi / lo).powi(2);
    if !(condition < 1.0 / DEGENERACY_FLOOR) {
        return Err(Error::Degeneracy {
            order: n,
            detail: format!("Toeplitz matrix condition estimate {condition:.3e}"),
        });
    }
    let x = chol.solve(&rhs);
    let table = PredictorTable {
        n,
        horizon: m,
        coefficients: x.iter().copied().collect(),
        sigma2: None,
        source: PredictorSource::NormalEquations,
    };
    let residual = table.normal_equation_residual(gamma);
    if residual > RESIDUAL_TOL * g[0] {
        return Err(Error::Degeneracy {
            order: n,
            detail: format!(
                "normal-equation residual {residual:.3e} (condition estimate {condition:.3e})"
            ),
        });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar1_gamma(r: f64, len: usize) -> AutocovSeq {
        AutocovSeq::new((0..len).map(|k| r.powi(k as i32) / (1.0 - r * r)).collect()).unwrap()
    }

    #[test]
    fn ar1_levinson() {
        let tables = durbin_levinson(&ar1_gamma(0.5, 4), 3).unwrap();
        let t = &tables[2];
        assert!((t.coefficients[0] - 0.5).abs() < 1e-15);
        assert!(t.coefficients[1].abs() < 1e-15 && t.coefficients[2].abs() < 1e-15);
        assert!((t.sigma2.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn white_noise_levinson() {
        let mut g = vec![0.0; 6];
        g[0] = 2.0;
        let tables = durbin_levinson(&AutocovSeq::new(g).unwrap(), 5).unwrap();
        assert!(tables[4].coefficients.iter().all(|&p| p == 0.0));
        assert_eq!(tables[4].sigma2, Some(2.0));
    }

    #[test]
    fn degenerate_autocovariance_is_reported() {
        // γ ≡ 1 is the covariance of a constant process.
        let g = AutocovSeq::new(vec![1.0; 4]).unwrap();
        assert!(matches!(
            durbin_levinson(&g, 3),
            Err(Error::Degeneracy { order: 1, .. })
        ));
        assert!(matches!(
            multistep_normal_solve(&g, 2, 0),
            Err(Error::Degeneracy { .. })
        ));
    }

    #[test]
    fn ar1_multistep() {
        let t = multistep_normal_solve(&ar1_gamma(0.5, 8), 4, 2).unwrap();
        assert!((t.coefficients[0] - 0.125).abs() < 1e-14);
        assert!(t.coefficients[1..].iter().all(|p| p.abs() < 1e-14));
        assert_eq!(t.source, PredictorSource::NormalEquations);
    }

    #[test]
    fn length_checks() {
        let g = ar1_gamma(0.5, 4);
        assert!(durbin_levinson(&g, 4).is_err());
        assert!(durbin_levinson(&g, 0).is_err());
        assert!(multistep_normal_solve(&g, 2, 2).is_err());
    }
}
