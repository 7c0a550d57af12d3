//! Finite predictor coefficients from the explicit MA/AR series.
//!
//! With `β_n = Σ_v c_v a_{v+n}` and the Hankel operator
//! `(H_n x)_u = Σ_v β_{n+u+v} x_v`, the iterates `d_k(n, ·) = H_n^{k-1} β_{n+·}`
//! and `δ_k(n, ·, v) = H_n^k e_v` generate the terms
//!
//! ```text
//! b^m_k(n, j) = Σ_u a_{j+u} (H_{n+1}^{k-1} s)_u,   s_v = c_{m-v} (v ≤ m)
//! g^m_k(n, j) = b^m_k(n, j)          (k odd)
//!             = b^m_k(n, n + 1 - j)  (k even)
//! ```
//!
//! and `φ^m_{n,j} = Σ_k g^m_k(n, j)`. The partial sums are the coefficients
//! produced by `k` alternating projections onto the infinite past and the
//! future from `-n`.
//!
//! Under long memory the inner sums decay like `u^{-1}` and plain truncation
//! converges too slowly. The default strategy keeps the first `V` indices
//! exact and replaces the rest by a Nyström discretization on a
//! geometrically graded Gauss–Legendre grid, using closed-form analytic
//! continuations of `β` and `a` to real arguments.

use std::f64::consts::PI;

use crate::coeffs::{expand_ar, expand_ma, CoeffKind, CoeffSeq, ProcessModel, Regime};
use crate::error::{Error, Result};
use crate::hankel::Correlator;
use crate::levinson::{PredictorSource, PredictorTable};
use crate::quad::{log_graded, Grid};
use crate::special::{gamma, gamma_ratio};

/// `β(x) = (sin πd / π) Σ_i w_i / (x - i - d)` for `i = first, first + 1, …`.
///
/// The weights are minus the two-sided cross-correlation of the ARMA factor
/// alone; they sum to one and decay geometrically.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaContinuation {
    d: f64,
    scale: f64,
    first: i64,
    weights: Vec<f64>,
}

impl BetaContinuation {
    pub fn eval(&self, x: f64) -> f64 {
        let shift = x - self.d;
        self.scale
            * self
                .weights
                .iter()
                .enumerate()
                .map(|(k, w)| w / (shift - (self.first + k as i64) as f64))
                .sum::<f64>()
    }
}

/// `a(x) = Σ_i ψ_i a_F(x - i)` with `ψ` the expansion of `φ/θ` and
/// `a_F(y) = -Γ(y - d) / (Γ(-d) Γ(y + 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArContinuation {
    d: f64,
    inv_gamma_neg_d: f64,
    psi: Vec<f64>,
}

impl ArContinuation {
    pub fn for_model(model: &ProcessModel) -> Option<Self> {
        let (d, ar, ma) = model.farima_parts()?;
        if d <= 0.0 {
            return None;
        }
        let len = model.arma_decay_len();
        let mut unit = vec![0.0; len];
        unit[0] = 1.0;
        let psi = crate::series::div_poly(&crate::series::cauchy_product(&unit, &ar), &ma);
        Some(Self {
            d,
            inv_gamma_neg_d: 1.0 / gamma(-d),
            psi,
        })
    }

    /// Valid for `x ≥` the length of the ARMA factor expansion.
    pub fn eval(&self, x: f64) -> f64 {
        self.psi
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let y = x - i as f64;
                -p * gamma_ratio(y, -self.d, 1.0) * self.inv_gamma_neg_d
            })
            .sum()
    }
}

/// The cross-correlation `β_0..β_L` of an MA and an AR sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSeq {
    values: Vec<f64>,
    tail_bound: f64,
    continuation: Option<BetaContinuation>,
}

impl BetaSeq {
    /// Exact `β_0..=β_len` for a parametric model. Long-memory models carry
    /// the analytic continuation to real arguments.
    pub fn for_model(model: &ProcessModel, len: usize) -> Result<Self> {
        model.validate()?;
        let Some((d, ar, ma)) = model.farima_parts() else {
            let ProcessModel::Explicit { c, a } = model else {
                unreachable!("only explicit models lack rational parts")
            };
            return beta_seq(c, a, len, 0.0);
        };
        let arma = ProcessModel::Farima {
            d: 0.0,
            ar: crate::poly::RealPolynomial::new(ar)?,
            ma: crate::poly::RealPolynomial::new(ma)?,
        };
        let decay = model.arma_decay_len();
        if d == 0.0 {
            let c = expand_ma(&arma, decay)?;
            let a = expand_ar(&arma, decay + len)?;
            let values = (0..=len)
                .map(|n| (0..=decay).map(|v| c.get(v) * a.get(v + n)).sum())
                .collect();
            return Ok(Self {
                values,
                tail_bound: 0.0,
                continuation: None,
            });
        }
        // Two-sided cross-correlation of the ARMA factor over -decay..=decay.
        let c = expand_ma(&arma, 2 * decay)?;
        let a = expand_ar(&arma, 2 * decay)?;
        let weights: Vec<f64> = (-(decay as i64)..=decay as i64)
            .map(|i| {
                let start = (-i).max(0) as usize;
                -(start..=2 * decay)
                    .filter(|&v| ((v as i64) + i) as usize <= 2 * decay)
                    .map(|v| c.get(v) * a.get((v as i64 + i) as usize))
                    .sum::<f64>()
            })
            .collect();
        let continuation = BetaContinuation {
            d,
            scale: (PI * d).sin() / PI,
            first: -(decay as i64),
            weights,
        };
        let values = (0..=len).map(|n| continuation.eval(n as f64)).collect();
        Ok(Self {
            values,
            tail_bound: 0.0,
            continuation: Some(continuation),
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

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// Bound on the neglected part of the inner sums.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn continuation(&self) -> Option<&BetaContinuation> {
        self.continuation.as_ref()
    }
}

/// `β_n = Σ_v c_v a_{v+n}` for `n = 0..=len` from truncated sequences.
///
/// The omitted summands `v > N - n` are bounded by a power-law comparison
/// with the last retained summand; the bound must not exceed `tol` unless
/// `tol` is zero and the sequences have finite support.
pub fn beta_seq(c: &CoeffSeq, a: &CoeffSeq, len: usize, tol: f64) -> Result<BetaSeq> {
    if c.kind() != CoeffKind::Ma || a.kind() != CoeffKind::Ar {
        return Err(Error::Argument("beta_seq needs (MA, AR) sequences".into()));
    }
    let cv = c.values();
    let av = a.values();
    let big_n = cv.len().min(av.len()) - 1;
    // Finite-support sequences (explicit models) are summed exactly.
    let exact = tol == 0.0;
    if !exact && big_n < 2 * len {
        return Err(Error::Argument(format!(
            "β up to index {len} needs sequences of length at least {}",
            2 * len + 1
        )));
    }
    let values: Vec<f64> = if exact {
        (0..=len)
            .map(|n| cv.iter().enumerate().map(|(v, cc)| cc * a.get(v + n)).sum())
            .collect()
    } else {
        let mut segment = av.to_vec();
        segment.resize(big_n + len + 1, 0.0);
        let corr = Correlator::new(&segment, big_n + 1, len + 1)?;
        corr.apply(&cv[..=big_n])
    };
    let tail_bound = if exact {
        0.0
    } else {
        (0..=len)
            .map(|n| (cv[big_n - n] * av[big_n]).abs() * (big_n - n + 1) as f64)
            .fold(0.0, f64::max)
    };
    if tail_bound > tol && !exact {
        return Err(Error::Truncation {
            what: "β inner sum".into(),
            achieved: tail_bound,
            required: tol,
        });
    }
    Ok(BetaSeq {
        values,
        tail_bound,
        continuation: None,
    })
}

/// `y_j = Σ_{v<V} β_{n+j+v} x_v` for `j < V`, by FFT correlation.
pub fn hankel_apply(beta: &BetaSeq, offset: usize, x: &[f64]) -> Result<Vec<f64>> {
    Ok(hankel_correlator(beta, offset, x.len())?.apply_fast(x))
}

/// Quadratic reference for [`hankel_apply`].
pub fn hankel_apply_naive(beta: &BetaSeq, offset: usize, x: &[f64]) -> Result<Vec<f64>> {
    Ok(hankel_correlator(beta, offset, x.len())?.apply_naive(x))
}

fn hankel_correlator(beta: &BetaSeq, offset: usize, v: usize) -> Result<Correlator> {
    let needed = offset + 2 * v - 1;
    if beta.len() < needed {
        return Err(Error::Argument(format!(
            "Hankel product at offset {offset} with V = {v} needs β up to index {}, have {}",
            needed - 1,
            beta.len() - 1
        )));
    }
    Correlator::new(&beta.values[offset..needed], v, v)
}

/// How the infinite inner sums over `u` are closed off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailStrategy {
    /// Exact indices below `V` plus a graded Nyström discretization of the
    /// rest (long-memory FARIMA models).
    GradedQuadrature,
    /// Plain truncation at `V` and `2V`, extrapolated in `V`.
    RichardsonDouble,
    /// Plain truncation at `V` with a power-law estimate of the remainder.
    IntegralBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPolicy {
    /// Exactly summed inner indices `0..V`.
    pub v: usize,
    /// Maximum series depth.
    pub k_max: usize,
    /// The series stops once the sup-norm of the current iterate is below this.
    pub tol_term: f64,
    pub tail_strategy: TailStrategy,
    /// Largest admissible estimated error from closing the inner sums.
    pub tol_tail: f64,
    /// Extent of the graded grid in `ln x`; chosen from `d` and `n` if unset.
    pub t_max: Option<f64>,
    pub panel_width: f64,
    pub panel_order: usize,
}

/// Default stopping tolerance for the series.
pub const DEFAULT_TOL_TERM: f64 = 1e-14;
/// Default tolerance on the inner-sum tail estimate.
pub const DEFAULT_TOL_TAIL: f64 = 1e-6;
/// Default number of exact inner indices with graded quadrature.
pub const GRADED_V: usize = 512;

impl TruncationPolicy {
    pub fn for_model(model: &ProcessModel, n: usize) -> Self {
        let tol_term = DEFAULT_TOL_TERM;
        let (v, strategy) = match (model.regime(), model) {
            (Regime::LongMemory { .. }, _) => (GRADED_V, TailStrategy::GradedQuadrature),
            (_, ProcessModel::Explicit { c, a }) => (
                (c.values().len() + a.values().len()).max(64),
                TailStrategy::IntegralBound,
            ),
            _ => (
                (2 * model.arma_decay_len()).next_power_of_two().max(64),
                TailStrategy::IntegralBound,
            ),
        };
        Self {
            v,
            k_max: default_k_max(model, n, tol_term),
            tol_term,
            tail_strategy: strategy,
            tol_tail: DEFAULT_TOL_TAIL,
            t_max: None,
            panel_width: 2.0,
            panel_order: 10,
        }
    }

    /// Plain-truncation policy with `V = max(4096, 32 n)`.
    pub fn discrete(model: &ProcessModel, n: usize, strategy: TailStrategy) -> Self {
        Self {
            v: (32 * n).max(4096),
            tail_strategy: strategy,
            ..Self::for_model(model, n)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.v < 2 || self.k_max < 1 || !(self.tol_term > 0.0) || !(self.tol_tail > 0.0) {
            return Err(Error::Argument(format!(
                "truncation policy needs V ≥ 2, K ≥ 1 and positive tolerances (got V = {}, K = {}, tol = {}, tail tol = {})",
                self.v, self.k_max, self.tol_term, self.tol_tail
            )));
        }
        if !(self.panel_width > 0.0) || self.panel_order < 2 {
            return Err(Error::Argument("graded grid needs a positive panel width and order ≥ 2".into()));
        }
        Ok(())
    }

    fn graded_t_max(&self, d: f64, n: usize) -> f64 {
        self.t_max.unwrap_or_else(|| {
            ((1e12f64).ln() / (1.0 - 2.0 * d) + ((n + 1) as f64).ln() + 10.0).clamp(40.0, 600.0)
        })
    }
}

/// User overrides applied on top of [`TruncationPolicy::for_model`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyOverrides {
    pub v: Option<usize>,
    pub k_max: Option<usize>,
    pub tol_term: Option<f64>,
}

impl PolicyOverrides {
    pub fn policy(&self, model: &ProcessModel, n: usize) -> TruncationPolicy {
        let mut p = TruncationPolicy::for_model(model, n);
        if let Some(tol) = self.tol_term {
            p.tol_term = tol;
            p.k_max = default_k_max(model, n, tol);
        }
        if let Some(v) = self.v {
            p.v = v;
        }
        if let Some(k) = self.k_max {
            p.k_max = k;
        }
        p
    }
}

/// `K = ⌈ln tol / ln sin πd⌉ + 8` under long memory; under short memory the
/// rate is `ρ = (Σ|c|)(Σ_{k≥n}|a|)`, which bounds the kernels at offsets `n`
/// (`d_k(n, ·)`) and `n + 1` (the predictor series) alike.
pub fn default_k_max(model: &ProcessModel, n: usize, tol: f64) -> usize {
    let rate = match model.regime() {
        Regime::LongMemory { d } => (PI * d).sin(),
        Regime::ShortMemory => short_memory_rate(model, n.saturating_sub(1)),
    };
    if rate <= 1e-300 {
        8
    } else if rate < 1.0 {
        (tol.ln() / rate.ln()).ceil() as usize + 8
    } else {
        100_000
    }
}

/// `(Σ|c|)(Σ_{k>n}|a|)`; the series converges geometrically once it is below one.
pub fn short_memory_rate(model: &ProcessModel, n: usize) -> f64 {
    let len = model.arma_decay_len() + n + 1;
    let (Ok(c), Ok(a)) = (expand_ma(model, len), expand_ar(model, len)) else {
        return f64::INFINITY;
    };
    let sc: f64 = c.values().iter().map(|v| v.abs()).sum();
    let sa: f64 = a.values()[n + 1..].iter().map(|v| v.abs()).sum();
    sc * sa
}

/// Terms of the explicit series for one coefficient `φ^m_{n,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTerms {
    pub n: usize,
    pub j: usize,
    pub m: usize,
    /// `g^m_k(n, j)` for `k = 1..=K_used`.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub converged: bool,
    /// Estimated remainder of the series beyond the last term.
    pub tail_estimate: f64,
}

impl SeriesTerms {
    fn new(n: usize, j: usize, m: usize, terms: Vec<f64>, stopped: bool) -> Self {
        let mut acc = 0.0;
        let partial_sums = terms
            .iter()
            .map(|t| {
                acc += t;
                acc
            })
            .collect();
        let k = terms.len();
        let ratio = if k >= 4 {
            let recent = terms[k - 1].abs() + terms[k - 2].abs();
            let earlier = terms[k - 3].abs() + terms[k - 4].abs();
            if recent == 0.0 {
                0.0
            } else {
                recent / earlier
            }
        } else if terms.last().is_some_and(|t| *t == 0.0) || k == 1 {
            0.0
        } else {
            f64::INFINITY
        };
        let last = terms.last().map_or(0.0, |t| t.abs()) + if k >= 2 { terms[k - 2].abs() } else { 0.0 };
        let (converged, tail_estimate) = if stopped && ratio < 1.0 {
            (true, last * ratio / (1.0 - ratio))
        } else {
            (false, f64::INFINITY)
        };
        Self {
            n,
            j,
            m,
            terms,
            partial_sums,
            converged,
            tail_estimate,
        }
    }

    pub fn k_used(&self) -> usize {
        self.terms.len()
    }
}

/// Vector on the exact indices `0..V` and, optionally, the graded nodes.
#[derive(Debug, Clone)]
struct State {
    disc: Vec<f64>,
    cont: Vec<f64>,
}

impl State {
    fn sup_disc(&self) -> f64 {
        self.disc.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `Σ_{q<cols} rows[r][q] x_q` for a row-major block.
fn mat_vec(block: &[f64], cols: usize, x: &[f64]) -> Vec<f64> {
    block
        .chunks_exact(cols)
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// The Hankel operator `H_offset` on exact indices plus graded nodes.
#[derive(Debug)]
struct KernelOperator {
    exact: usize,
    nodes: usize,
    corr: Correlator,
    /// `β(offset + u + X_q) W_q`, exact rows.
    b_dc: Vec<f64>,
    /// `β(offset + X_q + u)`, graded rows.
    b_cd: Vec<f64>,
    /// `β(offset + X_q + X_p) W_p`, graded rows.
    b_cc: Vec<f64>,
}

impl KernelOperator {
    fn new(beta: &BetaSeq, offset: usize, exact: usize, grid: Option<&Grid>) -> Result<Self> {
        let corr = hankel_correlator(beta, offset, exact)?;
        let (mut b_dc, mut b_cd, mut b_cc) = (Vec::new(), Vec::new(), Vec::new());
        let mut nodes = 0;
        if let (Some(grid), Some(cont)) = (grid, beta.continuation()) {
            nodes = grid.len();
            let off = offset as f64;
            b_dc.reserve(exact * nodes);
            for u in 0..exact {
                for (x, w) in grid.nodes.iter().zip(&grid.weights) {
                    b_dc.push(cont.eval(off + u as f64 + x) * w);
                }
            }
            b_cd.reserve(exact * nodes);
            b_cc.reserve(nodes * nodes);
            for xq in &grid.nodes {
                for u in 0..exact {
                    b_cd.push(cont.eval(off + xq + u as f64));
                }
                for (xp, wp) in grid.nodes.iter().zip(&grid.weights) {
                    b_cc.push(cont.eval(off + xq + xp) * wp);
                }
            }
        }
        Ok(Self {
            exact,
            nodes,
            corr,
            b_dc,
            b_cd,
            b_cc,
        })
    }

    fn apply(&self, s: &State) -> State {
        let mut disc = self.corr.apply(&s.disc);
        if self.nodes == 0 {
            return State { disc, cont: Vec::new() };
        }
        add_into(&mut disc, &mat_vec(&self.b_dc, self.nodes, &s.cont));
        let mut cont = mat_vec(&self.b_cd, self.exact, &s.disc);
        add_into(&mut cont, &mat_vec(&self.b_cc, self.nodes, &s.cont));
        State { disc, cont }
    }

    fn unit(&self, v: usize) -> State {
        let mut disc = vec![0.0; self.exact];
        disc[v] = 1.0;
        State {
            disc,
            cont: vec![0.0; self.nodes],
        }
    }
}

/// `b(J) = Σ_u a_{J+u} x_u` for `J = 1..=n`.
#[derive(Debug)]
struct ArOperator {
    nodes: usize,
    corr: Correlator,
    /// `a(J + X_q) W_q`, one row per `J`.
    cont: Vec<f64>,
}

impl ArOperator {
    fn new(a: &CoeffSeq, ar_cont: Option<&ArContinuation>, n: usize, exact: usize, grid: Option<&Grid>) -> Result<Self> {
        let segment: Vec<f64> = (1..n + exact).map(|i| a.get(i)).collect();
        let corr = Correlator::new(&segment, exact, n)?;
        let mut cont = Vec::new();
        let mut nodes = 0;
        if let (Some(grid), Some(ar)) = (grid, ar_cont) {
            nodes = grid.len();
            cont.reserve(n * nodes);
            for big_j in 1..=n {
                for (x, w) in grid.nodes.iter().zip(&grid.weights) {
                    cont.push(ar.eval(big_j as f64 + x) * w);
                }
            }
        }
        Ok(Self { nodes, corr, cont })
    }

    fn apply(&self, s: &State) -> Vec<f64> {
        let mut out = self.corr.apply(&s.disc);
        if self.nodes > 0 {
            add_into(&mut out, &mat_vec(&self.cont, self.nodes, &s.cont));
        }
        out
    }
}

/// Everything the series driver needs for one `(model, n)` pair.
struct Setup {
    beta: BetaSeq,
    a: CoeffSeq,
    c: CoeffSeq,
    ar_cont: Option<ArContinuation>,
    grid: Option<Grid>,
    exact: usize,
}

impl Setup {
    fn new(model: &ProcessModel, n: usize, m: usize, exact: usize, graded: bool, policy: &TruncationPolicy) -> Result<Self> {
        if exact <= m {
            return Err(Error::Argument(format!(
                "inner truncation V = {exact} must exceed the horizon m = {m}"
            )));
        }
        let beta = BetaSeq::for_model(model, n + 1 + 2 * exact)?;
        let a = expand_ar(model, n + exact + m + 1)?;
        let c = expand_ma(model, m)?;
        let (ar_cont, grid) = match (graded, beta.continuation()) {
            (true, Some(_)) => {
                let d = model.memory();
                let t_max = policy.graded_t_max(d, n);
                let grid = log_graded(exact as f64 - 0.5, t_max, policy.panel_width, policy.panel_order)?;
                (ArContinuation::for_model(model), Some(grid))
            }
            _ => (None, None),
        };
        Ok(Self {
            beta,
            a,
            c,
            ar_cont,
            grid,
            exact,
        })
    }
}

/// Raw output of one run of the series: terms `g_k(j)` indexed `[k-1][j-1]`.
struct SeriesRun {
    odd: Vec<f64>,
    even: Vec<f64>,
    terms: Vec<Vec<f64>>,
    stopped: bool,
    /// `Σ_k` of the boundary magnitude of each iterate, for tail estimates.
    boundary_mass: f64,
}

/// Runs the explicit series for horizon `m`; `force_k` disables the
/// tolerance stop so that exactly `k_max` terms are produced.
fn run_series(setup: &Setup, n: usize, m: usize, policy: &TruncationPolicy, force_k: bool) -> Result<SeriesRun> {
    let exact = setup.exact;
    let grid = setup.grid.as_ref();
    let kernel = KernelOperator::new(&setup.beta, n + 1, exact, grid)?;
    let ar_op = ArOperator::new(&setup.a, setup.ar_cont.as_ref(), n, exact, grid)?;

    // k = 1: b^m_1(n, j) = Σ_{v≤m} c_{m-v} a_{j+v}, summed exactly.
    let first: Vec<f64> = (1..=n)
        .map(|j| (0..=m).map(|v| setup.c.get(m - v) * setup.a.get(j + v)).sum())
        .collect();
    let mut odd = first.clone();
    let mut even = vec![0.0; n];
    let mut terms = vec![first];

    let mut x = State {
        disc: vec![0.0; exact],
        cont: vec![0.0; kernel.nodes],
    };
    for v in 0..=m {
        x.disc[v] = setup.c.get(m - v);
    }
    let mut stopped = false;
    let mut boundary_mass = 0.0;
    let mut k = 1;
    while k < policy.k_max {
        x = kernel.apply(&x);
        if !force_k && x.disc.iter().chain(&x.cont).all(|v| *v == 0.0) {
            // Every later term vanishes.
            stopped = true;
            break;
        }
        k += 1;
        boundary_mass += x.disc[exact - 1].abs().max(x.disc[exact - 2].abs());
        let b = ar_op.apply(&x);
        let g: Vec<f64> = if k % 2 == 1 {
            add_into(&mut odd, &b);
            b
        } else {
            let g: Vec<f64> = b.into_iter().rev().collect();
            add_into(&mut even, &g);
            g
        };
        terms.push(g);
        if !force_k && x.sup_disc() < policy.tol_term {
            stopped = true;
            break;
        }
    }
    Ok(SeriesRun {
        odd,
        even,
        terms,
        stopped,
        boundary_mass,
    })
}

/// Explicit-series predictor with per-coefficient diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitPrediction {
    pub table: PredictorTable,
    /// One entry per `j = 1..=n`.
    pub terms: Vec<SeriesTerms>,
    /// Estimated error from closing the inner sums.
    pub inner_tail_estimate: f64,
    pub warnings: Vec<String>,
}

impl ExplicitPrediction {
    pub fn k_used(&self) -> usize {
        self.terms.first().map_or(0, SeriesTerms::k_used)
    }
}

/// One-step predictor `φ_{n,1..n}` from the explicit series.
pub fn finite_predictor_explicit(model: &ProcessModel, n: usize, policy: &TruncationPolicy) -> Result<ExplicitPrediction> {
    finite_predictor_multistep(model, n, 0, policy)
}

/// `(m + 1)`-step predictor `φ^m_{n,1..n}` from the explicit series.
pub fn finite_predictor_multistep(
    model: &ProcessModel,
    n: usize,
    m: usize,
    policy: &TruncationPolicy,
) -> Result<ExplicitPrediction> {
    model.validate()?;
    policy.validate()?;
    if n == 0 {
        return Err(Error::Argument("predictor order n must be at least 1".into()));
    }
    let mut warnings = Vec::new();
    if model.regime() == Regime::ShortMemory {
        let rate = short_memory_rate(model, n);
        if rate >= 1.0 {
            warnings.push(format!(
                "n = {n} is below the guaranteed-convergence threshold: (Σ|c|)(Σ_{{k>n}}|a|) = {rate:.4}"
            ));
        }
    }
    let graded = policy.tail_strategy == TailStrategy::GradedQuadrature;
    let (coefficients, run, inner_tail) = match policy.tail_strategy {
        TailStrategy::GradedQuadrature | TailStrategy::IntegralBound => {
            let setup = Setup::new(model, n, m, policy.v, graded, policy)?;
            let run = run_series(&setup, n, m, policy, false)?;
            let tail = if setup.grid.is_some() {
                0.0
            } else {
                integral_tail_estimate(model, &setup, &run, n)
            };
            let coeffs: Vec<f64> = run.odd.iter().zip(&run.even).map(|(o, e)| o + e).collect();
            (coeffs, run, tail)
        }
        TailStrategy::RichardsonDouble => {
            let coarse_setup = Setup::new(model, n, m, policy.v, false, policy)?;
            let coarse = run_series(&coarse_setup, n, m, policy, false)?;
            let fine_setup = Setup::new(model, n, m, 2 * policy.v, false, policy)?;
            let fine = run_series(&fine_setup, n, m, policy, false)?;
            // Inner-sum errors decay like V^{-p}: p = 1 - 2d under long memory.
            let p = 1.0 - 2.0 * model.memory();
            let factor = 1.0 / (2f64.powf(p) - 1.0);
            let mut worst = 0.0f64;
            let coeffs: Vec<f64> = (0..n)
                .map(|i| {
                    let lo = coarse.odd[i] + coarse.even[i];
                    let hi = fine.odd[i] + fine.even[i];
                    let correction = (hi - lo) * factor;
                    worst = worst.max(correction.abs());
                    hi + correction
                })
                .collect();
            (coeffs, fine, worst)
        }
    };
    if !run.stopped {
        let last = run.terms.last().map_or(0.0, |t| t.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        return Err(Error::NonConvergence {
            k_max: policy.k_max,
            last_term: last,
        });
    }
    if inner_tail > policy.tol_tail {
        return Err(Error::Truncation {
            what: format!("inner sums at V = {}", policy.v),
            achieved: inner_tail,
            required: policy.tol_tail,
        });
    }
    let terms = collect_terms(&run.terms, n, m, run.stopped);
    Ok(ExplicitPrediction {
        table: PredictorTable {
            n,
            horizon: m,
            coefficients,
            sigma2: None,
            source: PredictorSource::ExplicitSeries,
        },
        terms,
        inner_tail_estimate: inner_tail,
        warnings,
    })
}

fn collect_terms(terms: &[Vec<f64>], n: usize, m: usize, stopped: bool) -> Vec<SeriesTerms> {
    (1..=n)
        .map(|j| {
            let column = terms.iter().map(|row| row[j - 1]).collect();
            SeriesTerms::new(n, j, m, column, stopped)
        })
        .collect()
}

/// Power-law estimate of what plain truncation at `V` leaves out: iterate
/// values at the cut, extended by `u^{-1}` against the decay of `a` and `β`.
fn integral_tail_estimate(model: &ProcessModel, setup: &Setup, run: &SeriesRun, n: usize) -> f64 {
    let v = setup.exact;
    let d = model.memory();
    let a_cut = (1..=n).map(|j| setup.a.get(j + v - 1).abs()).fold(0.0, f64::max);
    let beta_cut = setup.beta.get(n + v).abs();
    let sum_a: f64 = setup.a.values().iter().map(|x| x.abs()).sum();
    let rho = if d > 0.0 { (PI * d).sin() } else { 0.5 };
    run.boundary_mass * v as f64 * (a_cut / (1.0 + d) + beta_cut * sum_a / (1.0 - rho))
}

/// Iterates `d_k(n, u)` for `u < V`, `k = 1..=K_used`.
pub fn d_vectors(model: &ProcessModel, n: usize, policy: &TruncationPolicy) -> Result<Vec<Vec<f64>>> {
    let beta = BetaSeq::for_model(model, n + 2 * policy.v)?;
    let block = delta_block(model, &beta, n, 0, policy)?;
    Ok(block.values.into_iter().map(|mut per_v| per_v.swap_remove(0)).collect())
}

/// `δ_k(n, u, v)` for `u < V`, `v ≤ v_max`, `k = 1..=K_used`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaBlock {
    /// `values[k - 1][v][u]`.
    values: Vec<Vec<Vec<f64>>>,
}

impl DeltaBlock {
    pub fn k_used(&self) -> usize {
        self.values.len()
    }

    pub fn v_max(&self) -> usize {
        self.values.first().map_or(0, |b| b.len() - 1)
    }

    pub fn width(&self) -> usize {
        self.values.first().map_or(0, |b| b[0].len())
    }

    /// `δ_k(n, u, v)`; `k = 0` is the identity.
    pub fn get(&self, k: usize, u: usize, v: usize) -> f64 {
        if k == 0 {
            return if u == v { 1.0 } else { 0.0 };
        }
        self.values[k - 1][v][u]
    }
}

/// Builds `δ_k(n, ·, v) = H_n^k e_v` for `v = 0..=v_max`.
///
/// With graded quadrature the iterates also live on the graded nodes, but
/// only the exact indices are returned.
pub fn delta_block(
    model: &ProcessModel,
    beta: &BetaSeq,
    n: usize,
    v_max: usize,
    policy: &TruncationPolicy,
) -> Result<DeltaBlock> {
    policy.validate()?;
    let exact = policy.v;
    if v_max >= exact {
        return Err(Error::Argument(format!("v_max = {v_max} must be below V = {exact}")));
    }
    let grid = match (policy.tail_strategy, beta.continuation()) {
        (TailStrategy::GradedQuadrature, Some(_)) => Some(log_graded(
            exact as f64 - 0.5,
            policy.graded_t_max(model.memory(), n),
            policy.panel_width,
            policy.panel_order,
        )?),
        _ => None,
    };
    let kernel = KernelOperator::new(beta, n, exact, grid.as_ref())?;
    let mut states: Vec<State> = (0..=v_max).map(|v| kernel.unit(v)).collect();
    let mut values = Vec::new();
    for _ in 0..policy.k_max {
        states = states.iter().map(|s| kernel.apply(s)).collect();
        values.push(states.iter().map(|s| s.disc.clone()).collect::<Vec<_>>());
        let sup = states.iter().map(State::sup_disc).fold(0.0, f64::max);
        if sup < policy.tol_term {
            return Ok(DeltaBlock { values });
        }
    }
    let last = states.iter().map(State::sup_disc).fold(0.0, f64::max);
    Err(Error::NonConvergence {
        k_max: policy.k_max,
        last_term: last,
    })
}

/// Partial sums `Σ_{l≤k} g^m_l(n, j)` for `k = 1..=k`: the coefficients
/// after `k` alternating projections, first onto the infinite past.
pub fn projection_iterates(
    model: &ProcessModel,
    n: usize,
    j: usize,
    m: usize,
    k: usize,
    policy: &TruncationPolicy,
) -> Result<Vec<f64>> {
    model.validate()?;
    if j == 0 || j > n || k == 0 {
        return Err(Error::Argument(format!("need 1 ≤ j ≤ n and k ≥ 1 (got j = {j}, n = {n}, k = {k})")));
    }
    let policy = TruncationPolicy { k_max: k, ..policy.clone() };
    policy.validate()?;
    let graded = policy.tail_strategy == TailStrategy::GradedQuadrature;
    let setup = Setup::new(model, n, m, policy.v, graded, &policy)?;
    let run = run_series(&setup, n, m, &policy, true)?;
    let mut acc = 0.0;
    Ok(run
        .terms
        .iter()
        .map(|row| {
            acc += row[j - 1];
            acc
        })
        .collect())
}
