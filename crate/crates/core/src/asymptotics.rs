//! Long-memory asymptotics of finite predictors: the constants `f_k(0)`,
//! the rate `n(φ_{n,j} - φ_j) → d² Σ_{u≥j} φ_u`, the scaling
//! `n d_k(n, u) → f_k(0) sin^k(πd)`, and a Baxter-type inequality.
//!
//! Every experiment computes the explicit series and the Durbin–Levinson
//! predictor side by side and refuses to report when they disagree.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::coeffs::{autocov, expand_ar, expand_ma, infinite_predictor, tail_sum_phi, ProcessModel, Regime};
use crate::error::{Error, Result};
use crate::explicit::{d_vectors, finite_predictor_explicit, PolicyOverrides};
use crate::levinson::durbin_levinson;
use crate::quad::{half_line, Grid};

/// Largest admissible gap between the explicit and Levinson predictors.
pub const ORACLE_TOL: f64 = 1e-6;
/// Autocovariance truncation tolerance used by the experiments.
const AUTOCOV_TOL: f64 = 1e-12;

/// `f_1(0), …, f_K(0)`: odd `k` are the Taylor coefficients of
/// `arcsin(x)/π`, even `k` those of `(arcsin(x)/π)²`.
pub fn fk0(k_max: usize) -> Vec<f64> {
    let mut arcsin = vec![0.0; k_max + 1];
    // t_m = (2m)! / (4^m (m!)² (2m + 1)) multiplies x^{2m+1}.
    let mut t = 1.0;
    let mut m = 0usize;
    while 2 * m + 1 <= k_max {
        arcsin[2 * m + 1] = t / PI;
        m += 1;
        let mf = m as f64;
        t *= (2.0 * mf - 1.0).powi(2) / ((2.0 * mf) * (2.0 * mf + 1.0));
    }
    (1..=k_max)
        .map(|k| {
            if k % 2 == 1 {
                arcsin[k]
            } else {
                (1..k).map(|i| arcsin[i] * arcsin[k - i]).sum()
            }
        })
        .collect()
}

/// Partial sums `Σ_{odd k ≤ K} f_k(0) x^k` and `Σ_{even k ≤ K} f_k(0) x^k`.
pub fn arcsin_partial_sums(fk: &[f64], x: f64) -> (f64, f64) {
    let mut odd = 0.0;
    let mut even = 0.0;
    let mut power = 1.0;
    for (i, f) in fk.iter().enumerate() {
        power *= x;
        if (i + 1) % 2 == 1 {
            odd += f * power;
        } else {
            even += f * power;
        }
    }
    (odd, even)
}

/// Bounds on the remainders of [`arcsin_partial_sums`] after `K = fk.len()`
/// terms, for `0 ≤ x < 1`.
///
/// Within each parity the coefficients are nonincreasing, so the remainder
/// is at most the first omitted coefficient times a geometric series in `x²`.
pub fn arcsin_tail_bounds(k_max: usize, x: f64) -> (f64, f64) {
    let f = fk0(k_max + 2);
    let next = |parity: usize| {
        let k = if (k_max + 1) % 2 == parity { k_max + 1 } else { k_max + 2 };
        f[k - 1] * x.powi(k as i32) / (1.0 - x * x)
    };
    (next(1), next(0))
}

/// `f_1, …, f_k` on a logarithmic half-line grid, built from
/// `f_1(u) = 1/(π(1+u))`, `f_2(u) = ln(1+u)/(π² u)` and
/// `f_{k+1}(u) = ∫_0^∞ f_1(u+s) f_k(s) ds`.
#[derive(Debug, Clone)]
pub struct FkQuadrature {
    grid: Grid,
    values: Vec<Vec<f64>>,
}

fn f1(u: f64) -> f64 {
    1.0 / (PI * (1.0 + u))
}

fn f2(u: f64) -> f64 {
    if u < 1e-12 {
        (1.0 - u / 2.0) / (PI * PI)
    } else {
        u.ln_1p() / (PI * PI * u)
    }
}

impl FkQuadrature {
    pub fn new(k_max: usize) -> Result<Self> {
        let grid = half_line(-40.0, 50.0, 180, 10)?;
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let row = match k {
                1 => grid.nodes.iter().map(|&u| f1(u)).collect(),
                2 => grid.nodes.iter().map(|&u| f2(u)).collect(),
                _ => {
                    let prev = &values[k - 2];
                    grid.nodes
                        .iter()
                        .map(|&u| {
                            grid.nodes
                                .iter()
                                .zip(&grid.weights)
                                .zip(prev)
                                .map(|((&s, &w), &p)| w * f1(u + s) * p)
                                .sum()
                        })
                        .collect()
                }
            };
            values.push(row);
        }
        Ok(Self { grid, values })
    }

    /// `∫_0^∞ f_i(u) f_j(u) du`.
    pub fn inner_product(&self, i: usize, j: usize) -> f64 {
        self.grid
            .weights
            .iter()
            .zip(&self.values[i - 1])
            .zip(&self.values[j - 1])
            .map(|((w, a), b)| w * a * b)
            .sum()
    }

    /// `f_k(0) = ∫_0^∞ f_1(s) f_{k-1}(s) ds` for `k ≥ 2`, and `1/π` for `k = 1`.
    pub fn at_zero(&self, k: usize) -> f64 {
        if k == 1 {
            1.0 / PI
        } else {
            self.inner_product(1, k - 1)
        }
    }
}

fn require_long_memory(model: &ProcessModel, what: &str) -> Result<f64> {
    match model.regime() {
        Regime::LongMemory { d } => Ok(d),
        Regime::ShortMemory => Err(Error::Regime(format!(
            "{what} needs a long-memory model (0 < d < 1/2)"
        ))),
    }
}

/// Length of the infinite-predictor expansion used for tails.
fn phi_len(n_max: usize) -> usize {
    (1usize << 16).max(64 * n_max)
}

/// One-step predictors of every requested order from both sources, checked
/// against each other.
struct PairedPredictors {
    /// `(n, explicit coefficients, max |explicit - Levinson|)` in input order.
    rows: Vec<(usize, Vec<f64>, f64)>,
}

fn paired_predictors(model: &ProcessModel, n_list: &[usize], overrides: &PolicyOverrides) -> Result<PairedPredictors> {
    let n_max = *n_list
        .iter()
        .max()
        .ok_or_else(|| Error::Argument("empty list of orders".into()))?;
    if n_list.contains(&0) {
        return Err(Error::Argument("predictor orders must be positive".into()));
    }
    let gamma = autocov(model, n_max, (1usize << 20).max(64 * n_max), AUTOCOV_TOL)?;
    let levinson = durbin_levinson(&gamma, n_max)?;
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let policy = overrides.policy(model, n);
            let explicit = finite_predictor_explicit(model, n, &policy)?;
            let coeffs = explicit.table.coefficients;
            let diff = coeffs
                .iter()
                .zip(&levinson[n - 1].coefficients)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if diff > ORACLE_TOL {
                return Err(Error::OracleDisagreement {
                    n,
                    max_abs_diff: diff,
                    tolerance: ORACLE_TOL,
                });
            }
            Ok((n, coeffs, diff))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairedPredictors { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateEntry {
    pub n: usize,
    pub phi_nj: f64,
    /// `n (φ_{n,j} - φ_j)`.
    pub rate: f64,
    pub oracle_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub j: usize,
    pub phi_j: f64,
    pub entries: Vec<RateEntry>,
    /// `d² Σ_{u≥j} φ_u`.
    pub theoretical_limit: f64,
    /// `2 r(2n) - r(n)` for every consecutive pair of entries whose orders
    /// double.
    pub extrapolated: Vec<(usize, f64)>,
}

impl RateReport {
    pub fn best_estimate(&self) -> Option<f64> {
        self.extrapolated
            .last()
            .map(|e| e.1)
            .or_else(|| self.entries.last().map(|e| e.rate))
    }
}

/// `Σ_{u≥j} φ_u`. When the computed `φ_u`, `u ≥ j`, are all positive this
/// is [`tail_sum_phi`]; otherwise the signed identity
/// `Σ_{u≥j} φ_u = -c_0 Σ_{u<j} a_u` (valid because `Σ a_u = 0`) is used.
pub fn phi_tail_from(model: &ProcessModel, j: usize, len: usize) -> Result<f64> {
    require_long_memory(model, "the φ-tail")?;
    let c = expand_ma(model, 0)?;
    let a = expand_ar(model, len)?;
    let phi = infinite_predictor(&c, &a, len)?;
    if phi[j - 1..].iter().all(|&p| p > 0.0) {
        tail_sum_phi(&phi, j - 1, model)
    } else {
        Ok(-c.get(0) * a.values()[..j].iter().sum::<f64>())
    }
}

pub fn rate_experiment(model: &ProcessModel, j: usize, n_list: &[usize], overrides: &PolicyOverrides) -> Result<RateReport> {
    let d = require_long_memory(model, "the rate experiment")?;
    if j == 0 || n_list.iter().any(|&n| n < j) {
        return Err(Error::Argument(format!("need 1 ≤ j ≤ n for every order (j = {j})")));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("orders must be strictly increasing".into()));
    }
    let n_max = *n_list.last().ok_or_else(|| Error::Argument("empty list of orders".into()))?;
    let c0 = model.c0();
    let phi_j = c0 * expand_ar(model, j)?.get(j);
    let paired = paired_predictors(model, n_list, overrides)?;
    let entries: Vec<RateEntry> = paired
        .rows
        .iter()
        .map(|(n, coeffs, diff)| RateEntry {
            n: *n,
            phi_nj: coeffs[j - 1],
            rate: *n as f64 * (coeffs[j - 1] - phi_j),
            oracle_diff: *diff,
        })
        .collect();
    let extrapolated = entries
        .windows(2)
        .filter(|w| w[1].n == 2 * w[0].n)
        .map(|w| (w[1].n, 2.0 * w[1].rate - w[0].rate))
        .collect();
    let tail = phi_tail_from(model, j, phi_len(n_max))?;
    Ok(RateReport {
        j,
        phi_j,
        entries,
        theoretical_limit: d * d * tail,
        extrapolated,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaxterEntry {
    pub n: usize,
    /// `Σ_{j≤n} |φ_{n,j} - φ_j|`.
    pub lhs: f64,
    /// `Σ_{k>n} |φ_k|`.
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaxterReport {
    pub entries: Vec<BaxterEntry>,
    pub sup_ratio: f64,
}

impl BaxterReport {
    /// Relative change of the ratio between the last two entries.
    pub fn last_octave_variation(&self) -> Option<f64> {
        let k = self.entries.len();
        (k >= 2).then(|| {
            let (a, b) = (self.entries[k - 2].ratio, self.entries[k - 1].ratio);
            (b - a).abs() / a.abs()
        })
    }
}

pub fn baxter_experiment(model: &ProcessModel, n_list: &[usize], overrides: &PolicyOverrides) -> Result<BaxterReport> {
    require_long_memory(model, "the Baxter experiment")?;
    let n_max = *n_list
        .iter()
        .max()
        .ok_or_else(|| Error::Argument("empty list of orders".into()))?;
    let len = phi_len(n_max);
    let c = expand_ma(model, 0)?;
    let a = expand_ar(model, len)?;
    let phi = infinite_predictor(&c, &a, len)?;
    let paired = paired_predictors(model, n_list, overrides)?;
    let entries = paired
        .rows
        .iter()
        .map(|(n, coeffs, _)| {
            let lhs: f64 = coeffs.iter().zip(&phi).map(|(x, y)| (x - y).abs()).sum();
            let rhs = tail_sum_phi(&phi, *n, model)?;
            Ok(BaxterEntry {
                n: *n,
                lhs,
                rhs,
                ratio: lhs / rhs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_ratio = entries.iter().map(|e| e.ratio).fold(0.0, f64::max);
    Ok(BaxterReport { entries, sup_ratio })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DkEntry {
    pub k: usize,
    pub n: usize,
    pub u: usize,
    /// `n d_k(n, u)`.
    pub n_dk: f64,
    /// `f_k(0) sin^k(πd)`.
    pub target: f64,
}

pub fn dk_scaling_experiment(
    model: &ProcessModel,
    k_list: &[usize],
    u: usize,
    n_list: &[usize],
    overrides: &PolicyOverrides,
) -> Result<Vec<DkEntry>> {
    let d = require_long_memory(model, "the d_k scaling experiment")?;
    let k_top = *k_list
        .iter()
        .max()
        .ok_or_else(|| Error::Argument("empty list of depths".into()))?;
    if k_list.contains(&0) {
        return Err(Error::Argument("depths k start at 1".into()));
    }
    let f = fk0(k_top);
    let s = (PI * d).sin();
    let per_n = n_list
        .par_iter()
        .map(|&n| {
            let mut policy = overrides.policy(model, n);
            if u >= policy.v {
                return Err(Error::Argument(format!("u = {u} must be below V = {}", policy.v)));
            }
            policy.k_max = policy.k_max.max(k_top);
            let dv = d_vectors(model, n, &policy)?;
            Ok(k_list
                .iter()
                .map(|&k| DkEntry {
                    k,
                    n,
                    u,
                    n_dk: dv.get(k - 1).map_or(0.0, |row| n as f64 * row[u]),
                    target: f[k - 1] * s.powi(k as i32),
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    // Rows ordered by k, then n.
    let mut rows: Vec<DkEntry> = per_n.into_iter().flatten().collect();
    rows.sort_by_key(|e| (k_list.iter().position(|&k| k == e.k), n_list.iter().position(|&n| n == e.n)));
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), (x, y)| {
        let dx = x.ln() - mx;
        (num + dx * (y.ln() - my), den + dx * dx)
    });
    num / den
}
