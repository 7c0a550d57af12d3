//! Hankel-structured matrix–vector products.
//!
//! Every kernel in the explicit series has the form `y_j = Σ_v s_{j+v} x_v`:
//! the matrix is constant along anti-diagonals, so the product is a
//! correlation and can be evaluated with one forward and one inverse FFT once
//! the spectrum of the fixed sequence `s` is cached.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Below this many multiply-adds the quadratic loop is faster than the FFT.
const DIRECT_WORK_LIMIT: usize = 1 << 14;

/// Cached correlation `y_j = Σ_{v < in_len} segment[j + v] · x_v`, `j < out_len`.
#[derive(Clone)]
pub struct Correlator {
    segment: Vec<f64>,
    in_len: usize,
    out_len: usize,
    fft_len: usize,
    spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Correlator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Correlator")
            .field("in_len", &self.in_len)
            .field("out_len", &self.out_len)
            .field("fft_len", &self.fft_len)
            .finish()
    }
}

impl Correlator {
    /// `segment` must hold at least `in_len + out_len - 1` values.
    pub fn new(segment: &[f64], in_len: usize, out_len: usize) -> Result<Self> {
        if in_len == 0 || out_len == 0 {
            return Err(Error::Argument("correlation lengths must be positive".into()));
        }
        let needed = in_len + out_len - 1;
        if segment.len() < needed {
            return Err(Error::Argument(format!(
                "correlation needs {needed} sequence values, got {}",
                segment.len()
            )));
        }
        let segment = segment[..needed].to_vec();
        // Circular convolution of length >= len(segment) leaves outputs
        // in_len-1 .. in_len-1+out_len free of wrap-around.
        let fft_len = needed.next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);
        let mut spectrum: Vec<Complex64> = segment
            .iter()
            .map(|&s| Complex64::new(s, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
            .take(fft_len)
            .collect();
        forward.process(&mut spectrum);
        Ok(Self {
            segment,
            in_len,
            out_len,
            fft_len,
            spectrum,
            forward,
            inverse,
        })
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    /// Chooses the quadratic loop for small problems and the FFT otherwise.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        if self.in_len * self.out_len <= DIRECT_WORK_LIMIT {
            self.apply_naive(x)
        } else {
            self.apply_fast(x)
        }
    }

    pub fn apply_fast(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.in_len, "input length mismatch");
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        // Reversed input turns the correlation into a convolution.
        for (t, &xv) in x.iter().rev().enumerate() {
            buf[t] = Complex64::new(xv, 0.0);
        }
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.fft_len as f64;
        buf[self.in_len - 1..self.in_len - 1 + self.out_len]
            .iter()
            .map(|z| z.re * scale)
            .collect()
    }

    pub fn apply_naive(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.in_len, "input length mismatch");
        (0..self.out_len)
            .map(|j| {
                self.segment[j..j + self.in_len]
                    .iter()
                    .zip(x)
                    .map(|(s, v)| s * v)
                    .sum()
            })
            .collect()
    }
}
