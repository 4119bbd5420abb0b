//! Run configuration: command-line flags layered over an optional TOML file.
//!
//! Flag names and file keys coincide (`--grid-step` ↔ `grid-step = 0.01`);
//! a flag wins over the file.

use clap::{Args, ValueEnum};
use complex_oscillator::eigenstates::{default_extent, SpatialGrid, DEFAULT_STEP};
use complex_oscillator::potential::PotentialParams;
use complex_oscillator::states::{
    binomial_coefficients, poisson_coefficients, BinomialSpec, CoefficientVector, PoissonSpec,
};
use complex_oscillator::Complex64;
use serde::{Deserialize, Deserializer, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Failure, Outcome, PARAMETER_DOMAIN, UNSUPPORTED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Binomial,
    Poisson,
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Gram,
    Continuity,
    Binorm,
    Wigner,
    Limit,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Gram,
        Suite::Continuity,
        Suite::Binorm,
        Suite::Wigner,
        Suite::Limit,
    ];
}

/// Comma-separated suite names; the empty string selects none.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(transparent)]
pub struct SuiteList(pub Vec<Suite>);

impl FromStr for SuiteList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| Suite::from_str(t, true))
            .collect::<Result<Vec<_>, _>>()
            .map(SuiteList)
    }
}

/// A time value: a number, or a multiple of π written like `pi`, `pi/4`,
/// `3pi/4` or `0.5*pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Time(pub f64);

impl FromStr for Time {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let bad = || format!("cannot read {s:?} as a time");
        let Some(at) = t.find("pi") else {
            return t.parse().map(Time).map_err(|_| bad());
        };
        let factor = match t[..at].trim_end_matches('*').trim() {
            "" => 1.0,
            "-" => -1.0,
            f => f.parse::<f64>().map_err(|_| bad())?,
        };
        let divisor = match t[at + 2..].trim() {
            "" => 1.0,
            rest => rest
                .strip_prefix('/')
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        Ok(Time(factor * PI / divisor))
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Time(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Some(match Raw::deserialize(d)? {
        Raw::One(v) => vec![v],
        Raw::Many(v) => v,
    }))
}

/// Every user-settable knob; `None` means "not given here".
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// TOML file with the same keys as the flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Defaults to sqrt((4ac - b^2)/pi)
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,

    /// Half-width L of the spatial grid [-L, L]
    #[arg(long)]
    pub grid_extent: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,

    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    /// Binomial trial count
    #[arg(long)]
    pub n: Option<usize>,
    /// Binomial success probability; a list sweeps Wigner cells
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub p: Option<Vec<f64>>,
    /// Index offset of the packet; a list sweeps Wigner cells
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub r: Option<Vec<usize>>,
    /// Real part of the Poisson amplitude; a list sweeps Wigner cells
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(deserialize_with = "one_or_many")]
    pub z_re: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_im: Option<f64>,
    /// Eigen-index for `--state eigen`
    #[arg(long)]
    pub level: Option<usize>,
    /// Highest eigen-index of the basis checked by `verify`
    #[arg(long)]
    pub n_max: Option<usize>,

    /// Comma-separated times; `pi/4` style values accepted
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<Time>>,
    /// Step for the time derivative in continuity residuals
    #[arg(long)]
    pub dt: Option<f64>,

    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; outputs do not depend on this
    #[arg(long)]
    pub workers: Option<usize>,

    #[arg(long)]
    pub wigner_x_extent: Option<f64>,
    #[arg(long)]
    pub wigner_p_extent: Option<f64>,
    /// Odd node count along x
    #[arg(long)]
    pub wigner_x_count: Option<usize>,
    #[arg(long)]
    pub wigner_p_count: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,

    /// Comma-separated subset of gram,continuity,binorm,wigner,limit
    #[arg(long)]
    pub suites: Option<SuiteList>,
    /// Seed for the random coefficient vectors of the wigner suite
    #[arg(long)]
    pub seed: Option<u64>,
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($field:ident),* $(,)?) => {
        Options {
            config: $top.config.or($base.config),
            $($field: $top.$field.or($base.$field),)*
        }
    };
}

impl Options {
    /// Reads the config file, if any, and lets the flags override it.
    pub fn resolve_file(self) -> Outcome<Options> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        Ok(self.over(read_config(&path)?))
    }

    /// Field-wise `self` where set, else `base`.
    fn over(self, base: Options) -> Options {
        overlay!(self, base;
            a, b, c, lambda, grid_extent, grid_step, state, n, p, r, z_re, z_im, level,
            n_max, times, dt, out, format, workers, wigner_x_extent, wigner_p_extent,
            wigner_x_count, wigner_p_count, method, suites, seed)
    }
}

pub fn read_config(path: &Path) -> Outcome<Options> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(PARAMETER_DOMAIN, format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::new(PARAMETER_DOMAIN, format!("bad config {}: {e}", path.display())))
}

/// Validated parameters and where `λ` came from.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamRecord {
    #[serde(flatten)]
    pub params: PotentialParams,
    pub lambda_source: &'static str,
    pub ermakov_defect: f64,
}

/// `a = π/4, b = √π/2, c = 1` unless overridden; `λ` defaults to the value
/// that makes the family exactly solvable.
pub fn potential_params(opts: &Options) -> Outcome<ParamRecord> {
    let a = opts.a.unwrap_or(PI / 4.0);
    let b = opts.b.unwrap_or(PI.sqrt() / 2.0);
    let c = opts.c.unwrap_or(1.0);
    let (params, source) = match opts.lambda {
        Some(lambda) => (PotentialParams::new(a, b, c, lambda)?, "given"),
        None => (PotentialParams::with_consistent_lambda(a, b, c)?, "derived"),
    };
    Ok(ParamRecord {
        params,
        lambda_source: source,
        ermakov_defect: params.ermakov_defect(),
    })
}

/// The Wigner map is only defined for the Hermitian oscillator.
pub fn oscillator_params(opts: &Options) -> Outcome<ParamRecord> {
    let offending: Vec<String> = [("a", opts.a), ("b", opts.b), ("lambda", opts.lambda)]
        .iter()
        .filter_map(|(name, v)| v.filter(|v| *v != 0.0).map(|v| format!("{name} = {v}")))
        .collect();
    if !offending.is_empty() {
        return Err(Failure::new(
            UNSUPPORTED,
            format!(
                "the Wigner map needs the oscillator limit a = b = lambda = 0 \
                 (the potential must be real), got {}",
                offending.join(", ")
            ),
        ));
    }
    let params = PotentialParams::new(0.0, 0.0, opts.c.unwrap_or(1.0), 0.0)?;
    Ok(ParamRecord {
        params,
        lambda_source: "oscillator-limit",
        ermakov_defect: params.ermakov_defect(),
    })
}

/// One packet as configured, with a label for file naming and reports.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum StateSpec {
    Binomial { n: usize, p: f64, r: usize },
    Poisson { z: Complex64, r: usize, truncation: usize },
    Eigen { level: usize },
}

impl StateSpec {
    pub fn coefficients(&self) -> Outcome<CoefficientVector> {
        Ok(match *self {
            StateSpec::Binomial { n, p, r } => binomial_coefficients(&BinomialSpec::new(n, p, r)?),
            StateSpec::Poisson { z, r, .. } => poisson_coefficients(&PoissonSpec::new(z, r)?),
            StateSpec::Eigen { level } => CoefficientVector::eigenstate(level),
        })
    }

    pub fn label(&self) -> String {
        match self {
            StateSpec::Binomial { n, p, r } => format!("binomial n={n} p={p} r={r}"),
            StateSpec::Poisson { z, r, .. } => format!("poisson z={}{:+}i r={r}", z.re, z.im),
            StateSpec::Eigen { level } => format!("eigenstate {level}"),
        }
    }
}

/// All packets selected by the (possibly list-valued) state options.
pub fn state_cells(opts: &Options) -> Outcome<Vec<StateSpec>> {
    let rs = opts.r.clone().unwrap_or_else(|| vec![0]);
    let kind = opts.state.unwrap_or(StateKind::Binomial);
    let cells: Vec<StateSpec> = match kind {
        StateKind::Binomial => {
            let n = opts.n.unwrap_or(30);
            let ps = opts.p.clone().unwrap_or_else(|| vec![0.1]);
            let mut cells = Vec::new();
            for &p in &ps {
                let spec = BinomialSpec::new(n, p, 0)?;
                for &r in &rs {
                    cells.push(StateSpec::Binomial { n: spec.n, p: spec.p, r });
                }
            }
            cells
        }
        StateKind::Poisson => {
            let im = opts.z_im.unwrap_or(0.0);
            let res = opts.z_re.clone().unwrap_or_else(|| vec![1.0]);
            let mut cells = Vec::new();
            for &re in &res {
                for &r in &rs {
                    let spec = PoissonSpec::new(Complex64::new(re, im), r)?;
                    cells.push(StateSpec::Poisson {
                        z: spec.z,
                        r,
                        truncation: spec.truncation,
                    });
                }
            }
            cells
        }
        StateKind::Eigen => vec![StateSpec::Eigen {
            level: opts.level.unwrap_or(0),
        }],
    };
    if cells.is_empty() {
        return Err(Failure::new(PARAMETER_DOMAIN, "no state selected"));
    }
    Ok(cells)
}

/// The one packet of commands that do not sweep.
pub fn single_state(opts: &Options) -> Outcome<StateSpec> {
    let mut cells = state_cells(opts)?;
    if cells.len() != 1 {
        return Err(Failure::new(
            PARAMETER_DOMAIN,
            format!("this command takes one state, the options select {}", cells.len()),
        ));
    }
    Ok(cells.remove(0))
}

/// Grid for states up to `highest_level`, defaulting the extent from it.
pub fn spatial_grid(opts: &Options, highest_level: usize) -> Outcome<SpatialGrid> {
    let extent = opts.grid_extent.unwrap_or_else(|| default_extent(highest_level));
    let step = opts.grid_step.unwrap_or(DEFAULT_STEP);
    Ok(SpatialGrid::new(extent, step)?)
}

pub fn times(opts: &Options) -> Vec<f64> {
    opts.times
        .as_ref()
        .map(|t| t.iter().map(|t| t.0).collect())
        .unwrap_or_else(|| vec![0.0, PI / 4.0, PI / 2.0])
}

pub fn time_step(opts: &Options) -> Outcome<f64> {
    let dt = opts.dt.unwrap_or(1e-4);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Failure::new(PARAMETER_DOMAIN, format!("dt must be positive, got {dt}")));
    }
    Ok(dt)
}

pub fn format(opts: &Options) -> Format {
    opts.format.unwrap_or(Format::Csv)
}

pub fn out_dir(opts: &Options) -> PathBuf {
    opts.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}
