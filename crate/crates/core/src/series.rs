//! Truncated power-series arithmetic used by the coefficient expansions.

/// Coefficients of `(1 - z)^e` up to `z^len-1`, by the ratio of successive
/// binomial terms.
pub fn one_minus_z_pow(e: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(1.0);
    for k in 1..len {
        let prev = out[k - 1];
        out.push(prev * ((k - 1) as f64 - e) / k as f64);
    }
    out
}

/// Solves `poly(z) * y(z) = series(z)` for the truncated series `y`.
///
/// `poly[0]` must be nonzero.
pub fn div_poly(series: &[f64], poly: &[f64]) -> Vec<f64> {
    let p0 = poly[0];
    let mut out: Vec<f64> = Vec::with_capacity(series.len());
    for k in 0..series.len() {
        let mut acc = series[k];
        for (i, &p) in poly.iter().enumerate().skip(1).take(k) {
            acc -= p * out[k - i];
        }
        out.push(acc / p0);
    }
    out
}

/// Truncated Cauchy product of two series; output has the length of `a`.
pub fn cauchy_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..=k.min(b.len().saturating_sub(1)) {
            acc += b[i] * a[k - i];
        }
        *o = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_series_small_cases() {
        assert_eq!(one_minus_z_pow(2.0, 4), vec![1.0, -2.0, 1.0, 0.0]);
        let s = one_minus_z_pow(-1.0, 5);
        assert!(s.iter().all(|&x| x == 1.0));
        assert!(one_minus_z_pow(0.3, 0).is_empty());
    }

    #[test]
    fn division_inverts_multiplication() {
        let poly = [1.0, -0.5, 0.06];
        let series = one_minus_z_pow(-0.3, 40);
        let back = div_poly(&cauchy_product(&series, &poly), &poly);
        for (x, y) in series.iter().zip(&back) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn cauchy_product_of_reciprocal_pair() {
        let a = one_minus_z_pow(0.3, 30);
        let b = one_minus_z_pow(-0.3, 30);
        let p = cauchy_product(&a, &b);
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(p[1..].iter().all(|x| x.abs() < 1e-15));
    }
}
