//! Real polynomials with the root diagnostics needed to validate ARMA factors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A polynomial with real coefficients, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coefficients: Vec<f64>,
}

impl RealPolynomial {
    /// Builds a polynomial, trimming trailing zero coefficients.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::ModelValidation(
                "polynomial coefficients must be finite".into(),
            ));
        }
        let mut coefficients = coefficients;
        while coefficients.len() > 1 && *coefficients.last().unwrap() == 0.0 {
            coefficients.pop();
        }
        if coefficients.is_empty() || (coefficients.len() == 1 && coefficients[0] == 0.0) {
            return Err(Error::ModelValidation("the zero polynomial is not allowed".into()));
        }
        Ok(Self { coefficients })
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self {
            coefficients: vec![1.0],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_derivative_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coefficients.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * k as f64;
        }
        acc
    }

    /// All complex roots, from the companion matrix eigenvalues followed by a
    /// few Newton polishing steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let p = self.degree();
        if p == 0 {
            return Vec::new();
        }
        let lead = self.coefficients[p];
        let mut companion = DMatrix::<f64>::zeros(p, p);
        for i in 1..p {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..p {
            companion[(i, p - 1)] = -self.coefficients[i] / lead;
        }
        companion
            .complex_eigenvalues()
            .iter()
            .map(|&z0| {
                let mut z = z0;
                for _ in 0..4 {
                    let dp = self.eval_derivative_complex(z);
                    if dp.norm() == 0.0 {
                        break;
                    }
                    let step = self.eval_complex(z) / dp;
                    if !step.re.is_finite() || !step.im.is_finite() {
                        break;
                    }
                    z -= step;
                }
                z
            })
            .collect()
    }

    /// Smallest root modulus, or infinity for a constant polynomial.
    pub fn min_root_modulus(&self) -> f64 {
        self.roots()
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

impl std::fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_trailing_zeros() {
        let p = RealPolynomial::new(vec![1.0, -0.5, 0.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 1);
        assert!(RealPolynomial::new(vec![0.0, 0.0]).is_err());
        assert!(RealPolynomial::new(vec![]).is_err());
        assert!(RealPolynomial::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn roots_of_quadratic() {
        // (1 - z/2)(1 - z/4) = 1 - 0.75 z + 0.125 z^2
        let p = RealPolynomial::new(vec![1.0, -0.75, 0.125]).unwrap();
        let mut moduli: Vec<f64> = p.roots().iter().map(|z| z.norm()).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((moduli[0] - 2.0).abs() < 1e-12);
        assert!((moduli[1] - 4.0).abs() < 1e-12);
        assert!((p.min_root_modulus() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_roots() {
        // 1 + z^2 / 4 has roots +-2i
        let p = RealPolynomial::new(vec![1.0, 0.0, 0.25]).unwrap();
        for z in p.roots() {
            assert!(z.re.abs() < 1e-12);
            assert!((z.im.abs() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(RealPolynomial::one().roots().is_empty());
        assert_eq!(RealPolynomial::one().min_root_modulus(), f64::INFINITY);
        assert_eq!(RealPolynomial::one().eval(3.0), 1.0);
    }
}
