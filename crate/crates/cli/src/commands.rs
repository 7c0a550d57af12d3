//! One function per subcommand; each returns the table plus extra metadata.

use predictorlab::asymptotics::{baxter_experiment, dk_scaling_experiment, rate_experiment};
use predictorlab::coeffs::{autocov, expand_ar, expand_ma, ProcessModel, Regime};
use predictorlab::explicit::finite_predictor_multistep;
use predictorlab::levinson::{durbin_levinson, multistep_normal_solve};
use serde_json::{json, Map, Value};

use crate::config::{RunConfig, Source};
use crate::output::{Cell, Table};
use crate::CliError;

/// Autocovariance truncation tolerance relative to `γ(0)`.
const AUTOCOV_TOL: f64 = 1e-12;

pub struct Report {
    pub table: Table,
    pub extra: Map<String, Value>,
    /// Reported after the output has been written.
    pub deferred_error: Option<CliError>,
}

impl Report {
    fn plain(table: Table) -> Self {
        Self {
            table,
            extra: Map::new(),
            deferred_error: None,
        }
    }
}

fn autocov_terms(max_lag: usize) -> usize {
    (1usize << 20).max(64 * max_lag)
}

fn oracle_tolerance(model: &ProcessModel) -> f64 {
    match model.regime() {
        Regime::LongMemory { .. } => 1e-6,
        Regime::ShortMemory => 1e-9,
    }
}

pub fn coeffs(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.big_n;
    let c = expand_ma(&cfg.model, n)?;
    let a = expand_ar(&cfg.model, n)?;
    let gamma = autocov(&cfg.model, n, autocov_terms(n), AUTOCOV_TOL)?;
    let c0 = c.get(0);
    let mut table = Table::new(&["n", "c", "a", "gamma", "phi"]);
    for i in 0..=n {
        table.push(vec![
            Cell::Int(i),
            Cell::Float(c.get(i)),
            Cell::Float(a.get(i)),
            Cell::Float(gamma.values()[i]),
            Cell::Float(c0 * a.get(i)),
        ]);
    }
    let mut report = Report::plain(table);
    report
        .extra
        .insert("autocov_tail_estimate".into(), json!(gamma.tail_estimate()));
    Ok(report)
}

pub fn predict(cfg: &RunConfig) -> Result<Report, CliError> {
    let [n] = cfg.n_list[..] else {
        return Err(CliError::Config("predict takes a single order --n".into()));
    };
    if n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    let m = cfg.m;
    let want_levinson = cfg.source != Source::Explicit;
    let want_explicit = cfg.source != Source::Levinson;
    let mut extra = Map::new();

    let levinson = if want_levinson {
        let gamma = autocov(&cfg.model, n + m, autocov_terms(n + m), AUTOCOV_TOL)?;
        let table = if m == 0 {
            durbin_levinson(&gamma, n)?.pop().expect("order n ≥ 1")
        } else {
            multistep_normal_solve(&gamma, n, m)?
        };
        if let Some(s2) = table.sigma2 {
            extra.insert("sigma2".into(), json!(s2));
        }
        Some(table)
    } else {
        None
    };
    let explicit = if want_explicit {
        let policy = cfg.overrides.policy(&cfg.model, n);
        let p = finite_predictor_multistep(&cfg.model, n, m, &policy)?;
        for w in &p.warnings {
            eprintln!("warning: {w}");
        }
        extra.insert("k_used".into(), json!(p.k_used()));
        extra.insert("converged".into(), json!(p.terms.iter().all(|t| t.converged)));
        Some(p)
    } else {
        None
    };

    let mut columns = vec!["j".to_string()];
    if want_levinson {
        columns.push("phi_levinson".into());
    }
    if want_explicit {
        columns.push("phi_explicit".into());
    }
    if want_levinson && want_explicit {
        columns.push("abs_diff".into());
    }
    let k_terms = match (&explicit, cfg.terms) {
        (Some(p), true) => p.k_used(),
        _ => 0,
    };
    columns.extend((1..=k_terms).map(|k| format!("g{k}")));
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    let mut worst = 0.0f64;
    for j in 1..=n {
        let mut row = vec![Cell::Int(j)];
        let lev = levinson.as_ref().map(|t| t.coefficient(j));
        let exp = explicit.as_ref().map(|p| p.table.coefficient(j));
        row.extend(lev.map(Cell::Float));
        row.extend(exp.map(Cell::Float));
        if let (Some(x), Some(y)) = (lev, exp) {
            worst = worst.max((x - y).abs());
            row.push(Cell::Float((x - y).abs()));
        }
        if let Some(p) = explicit.as_ref().filter(|_| k_terms > 0) {
            row.extend(p.terms[j - 1].terms.iter().map(|g| Cell::Float(*g)));
        }
        table.rows.push(row);
    }
    let tolerance = oracle_tolerance(&cfg.model);
    let deferred_error = (want_levinson && want_explicit && worst > tolerance).then(|| {
        CliError::Lib(predictorlab::Error::OracleDisagreement {
            n,
            max_abs_diff: worst,
            tolerance,
        })
    });
    Ok(Report {
        table,
        extra,
        deferred_error,
    })
}

pub fn rate(cfg: &RunConfig) -> Result<Report, CliError> {
    let report = rate_experiment(&cfg.model, cfg.j, &cfg.n_list, &cfg.overrides)?;
    let mut table = Table::new(&["n", "phi_nj", "rate", "limit"]);
    for e in &report.entries {
        table.push(vec![
            Cell::Int(e.n),
            Cell::Float(e.phi_nj),
            Cell::Float(e.rate),
            Cell::Float(report.theoretical_limit),
        ]);
    }
    let mut out = Report::plain(table);
    out.extra.insert("phi_j".into(), json!(report.phi_j));
    out.extra.insert(
        "extrapolated".into(),
        Value::Array(
            report
                .extrapolated
                .iter()
                .map(|(n, v)| json!({ "n": n, "rate": v }))
                .collect(),
        ),
    );
    Ok(out)
}

pub fn baxter(cfg: &RunConfig) -> Result<Report, CliError> {
    let report = baxter_experiment(&cfg.model, &cfg.n_list, &cfg.overrides)?;
    let mut table = Table::new(&["n", "lhs", "rhs", "ratio"]);
    for e in &report.entries {
        table.push(vec![
            Cell::Int(e.n),
            Cell::Float(e.lhs),
            Cell::Float(e.rhs),
            Cell::Float(e.ratio),
        ]);
    }
    let mut out = Report::plain(table);
    out.extra.insert("sup_ratio".into(), json!(report.sup_ratio));
    Ok(out)
}

pub fn dkscale(cfg: &RunConfig) -> Result<Report, CliError> {
    let rows = dk_scaling_experiment(&cfg.model, &cfg.k_list, cfg.u, &cfg.n_list, &cfg.overrides)?;
    let mut table = Table::new(&["k", "n", "n_dk", "target"]);
    for e in rows {
        table.push(vec![
            Cell::Int(e.k),
            Cell::Int(e.n),
            Cell::Float(e.n_dk),
            Cell::Float(e.target),
        ]);
    }
    Ok(Report::plain(table))
}
