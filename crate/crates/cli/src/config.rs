//! Flag parsing and resolution: command-line flags override an optional
//! `key=value` config file, which overrides built-in defaults.

use std::collections::BTreeMap;
use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use predictorlab::coeffs::{CoeffKind, CoeffSeq, ProcessModel};
use predictorlab::explicit::PolicyOverrides;
use predictorlab::poly::RealPolynomial;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "predictorlab", version, about = "Finite predictor coefficients of stationary processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Coeffs,
    Predict,
    Rate,
    Baxter,
    Dkscale,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// MA, AR, autocovariance and infinite-predictor coefficients.
    Coeffs(Flags),
    /// Finite predictor from Durbin-Levinson and from the explicit series.
    Predict(Flags),
    /// n (φ_{n,j} - φ_j) against its long-memory limit.
    Rate(Flags),
    /// Baxter-type inequality ratios.
    Baxter(Flags),
    /// n d_k(n, u) against f_k(0) sin^k(πd).
    Dkscale(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Self::Coeffs(f) => (CommandKind::Coeffs, f),
            Self::Predict(f) => (CommandKind::Predict, f),
            Self::Rate(f) => (CommandKind::Rate, f),
            Self::Baxter(f) => (CommandKind::Baxter, f),
            Self::Dkscale(f) => (CommandKind::Dkscale, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Ar1,
    Farima,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Levinson,
    Explicit,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Raw flags; every value is optional so that the config file can fill gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Process model.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// AR(1) coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<String>,
    /// Memory parameter of a FARIMA model.
    #[arg(long)]
    pub d: Option<String>,
    /// AR polynomial φ(z), constant term first (explicit model: a_0, a_1, …).
    #[arg(long, allow_hyphen_values = true)]
    pub arpoly: Option<String>,
    /// MA polynomial θ(z), constant term first (explicit model: c_0, c_1, …).
    #[arg(long, allow_hyphen_values = true)]
    pub mapoly: Option<String>,
    /// Predictor orders: comma list, `a..b` expands to a, 2a, 4a, … ≤ b.
    #[arg(long)]
    pub n: Option<String>,
    /// Prediction horizon (0 for one step).
    #[arg(long)]
    pub m: Option<String>,
    /// Coefficient index for the rate experiment.
    #[arg(long)]
    pub j: Option<String>,
    /// Largest coefficient index for `coeffs`.
    #[arg(long = "N")]
    pub big_n: Option<String>,
    /// Exactly summed inner indices V.
    #[arg(long)]
    pub vmax: Option<String>,
    /// Maximum series depth K.
    #[arg(long)]
    pub kmax: Option<String>,
    /// Series stopping tolerance.
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long, value_enum)]
    pub source: Option<Source>,
    /// Add the per-term columns g1..gK to `predict`.
    #[arg(long)]
    pub terms: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (standard output if absent).
    #[arg(long)]
    pub out: Option<String>,
    /// Depths for `dkscale`, comma list.
    #[arg(long)]
    pub k: Option<String>,
    /// Inner index for `dkscale`.
    #[arg(long)]
    pub u: Option<String>,
    /// `key=value` file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<String>,
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ProcessModel,
    pub model_meta: Value,
    pub n_list: Vec<usize>,
    pub m: usize,
    pub j: usize,
    pub big_n: usize,
    pub overrides: PolicyOverrides,
    pub source: Source,
    pub terms: bool,
    pub format: Format,
    pub out: Option<String>,
    pub k_list: Vec<usize>,
    pub u: usize,
}

const CONFIG_KEYS: &[&str] = &[
    "model", "r", "d", "arpoly", "mapoly", "n", "m", "j", "N", "vmax", "kmax", "tol", "source",
    "terms", "format", "out", "k", "u",
];

fn read_config_file(path: &str) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {path}: {e}")))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{path}:{}: expected key=value", lineno + 1))
        })?;
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::Config(format!("{path}:{}: unknown key `{key}`", lineno + 1)));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Resolver {
    file: BTreeMap<String, String>,
}

impl Resolver {
    fn get(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.file.get(key).cloned())
    }

    fn parse<T: std::str::FromStr>(&self, flag: &Option<String>, key: &str) -> Result<Option<T>, CliError> {
        self.get(flag, key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| CliError::Config(format!("invalid value `{s}` for --{key}")))
            })
            .transpose()
    }

    fn value_enum<T: ValueEnum>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|s| T::from_str(s, false).map_err(|_| CliError::Config(format!("invalid value `{s}` for --{key}"))))
            .transpose()
    }
}

fn parse_list(s: &str, key: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("invalid number `{t}` in --{key}")))
        })
        .collect()
}

/// Parses `64,128` and `16..512` (powers-of-two expansion) forms.
pub fn parse_orders(s: &str, key: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("invalid order list `{s}` for --{key}"));
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if let Some((a, b)) = item.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a == 0 || a > b {
                return Err(bad());
            }
            let mut x = a;
            while x <= b {
                out.push(x);
                x *= 2;
            }
        } else {
            out.push(item.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn build_model(kind: ModelKind, res: &Resolver, flags: &Flags) -> Result<(ProcessModel, Value), CliError> {
    match kind {
        ModelKind::Ar1 => {
            let r: f64 = res
                .parse(&flags.r, "r")?
                .ok_or_else(|| CliError::Config("--model ar1 needs --r".into()))?;
            Ok((ProcessModel::ar1(r)?, json!({ "kind": "ar1", "r": r })))
        }
        ModelKind::Farima => {
            let d: f64 = res
                .parse(&flags.d, "d")?
                .ok_or_else(|| CliError::Config("--model farima needs --d".into()))?;
            let ar = parse_list(&res.get(&flags.arpoly, "arpoly").unwrap_or_else(|| "1".into()), "arpoly")?;
            let ma = parse_list(&res.get(&flags.mapoly, "mapoly").unwrap_or_else(|| "1".into()), "mapoly")?;
            let meta = json!({ "kind": "farima", "d": d, "arpoly": ar, "mapoly": ma });
            let model = ProcessModel::farima(d, RealPolynomial::new(ar)?, RealPolynomial::new(ma)?)?;
            Ok((model, meta))
        }
        ModelKind::Explicit => {
            let c = res
                .get(&flags.mapoly, "mapoly")
                .ok_or_else(|| CliError::Config("--model explicit needs --mapoly (the c sequence)".into()))?;
            let a = res
                .get(&flags.arpoly, "arpoly")
                .ok_or_else(|| CliError::Config("--model explicit needs --arpoly (the a sequence)".into()))?;
            let c = parse_list(&c, "mapoly")?;
            let a = parse_list(&a, "arpoly")?;
            let meta = json!({ "kind": "explicit", "c": c, "a": a });
            let model = ProcessModel::explicit(CoeffSeq::new(CoeffKind::Ma, c)?, CoeffSeq::new(CoeffKind::Ar, a)?)?;
            Ok((model, meta))
        }
    }
}

impl RunConfig {
    pub fn resolve(command: CommandKind, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let res = Resolver { file };
        let kind = res
            .value_enum(flags.model, "model")?
            .ok_or_else(|| CliError::Config("--model is required".into()))?;
        let (model, model_meta) = build_model(kind, &res, flags)?;
        let default_n = match command {
            CommandKind::Predict => "8",
            CommandKind::Rate => "64..512",
            CommandKind::Baxter => "16..512",
            CommandKind::Dkscale => "512..2048",
            CommandKind::Coeffs => "1",
        };
        let n_list = parse_orders(&res.get(&flags.n, "n").unwrap_or_else(|| default_n.into()), "n")?;
        let k_list = parse_orders(&res.get(&flags.k, "k").unwrap_or_else(|| "1".into()), "k")?;
        let terms = flags.terms
            || match res.file.get("terms").map(String::as_str) {
                None | Some("false") => false,
                Some("true") => true,
                Some(other) => return Err(CliError::Config(format!("invalid value `{other}` for --terms"))),
            };
        let tol: Option<f64> = res.parse(&flags.tol, "tol")?;
        if tol.is_some_and(|t| !(t > 0.0)) {
            return Err(CliError::Config("--tol must be positive".into()));
        }
        Ok(Self {
            model,
            model_meta,
            n_list,
            m: res.parse(&flags.m, "m")?.unwrap_or(0),
            j: res.parse(&flags.j, "j")?.unwrap_or(1),
            big_n: res.parse(&flags.big_n, "N")?.unwrap_or(10),
            overrides: PolicyOverrides {
                v: res.parse(&flags.vmax, "vmax")?,
                k_max: res.parse(&flags.kmax, "kmax")?,
                tol_term: tol,
            },
            source: res.value_enum(flags.source, "source")?.unwrap_or(Source::Both),
            terms,
            format: res.value_enum(flags.format, "format")?.unwrap_or(Format::Csv),
            out: res.get(&flags.out, "out"),
            k_list,
            u: res.parse(&flags.u, "u")?.unwrap_or(0),
        })
    }

    /// The resolved configuration, embedded in JSON output.
    pub fn meta(&self, command: CommandKind) -> Value {
        let name = match command {
            CommandKind::Coeffs => "coeffs",
            CommandKind::Predict => "predict",
            CommandKind::Rate => "rate",
            CommandKind::Baxter => "baxter",
            CommandKind::Dkscale => "dkscale",
        };
        json!({
            "command": name,
            "model": self.model_meta,
            "n": self.n_list,
            "m": self.m,
            "j": self.j,
            "N": self.big_n,
            "vmax": self.overrides.v,
            "kmax": self.overrides.k_max,
            "tol": self.overrides.tol_term,
            "source": format!("{:?}", self.source).to_lowercase(),
            "terms": self.terms,
            "k": self.k_list,
            "u": self.u,
        })
    }
}
