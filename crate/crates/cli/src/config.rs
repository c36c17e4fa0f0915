//! Run configuration: flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use fdensity::{GridSpec, HorizonGrid};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Keys accepted in a `--config` file. Flags given on the command line win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub set: Option<String>,
    pub modulus: Option<String>,
    pub expr: Option<String>,
    pub seq: Option<String>,
    pub grid: Option<String>,
    pub eps: Option<Eps>,
    pub tol: Option<f64>,
    pub target: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub lemma_probe: Option<usize>,
    pub grid_max: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Eps {
    List(Vec<f64>),
    Text(String),
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

fn triple(spec: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("grid must be min:max:factor, got `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.trim().parse::<f64>().map_err(|_| bad())?;
    }
    Ok(out)
}

/// `min:max:factor` with integer `1 <= min <= max` and `factor > 1`.
pub fn horizon_grid(spec: &str) -> Result<HorizonGrid, CliError> {
    let [min, max, factor] = triple(spec)?;
    let int = |v: f64| {
        (v.fract() == 0.0 && v >= 1.0 && v <= u64::MAX as f64)
            .then_some(v as u64)
            .ok_or_else(|| CliError::Usage(format!("grid bounds must be positive integers, got `{spec}`")))
    };
    HorizonGrid::geometric(int(min)?, int(max)?, factor).map_err(CliError::from_lib_usage)
}

/// `min:max:step`: linear spacing when `min = 0`, geometric factor otherwise.
pub fn point_grid(spec: &str) -> Result<GridSpec<f64>, CliError> {
    let [min, max, s] = triple(spec)?;
    let grid = if min == 0.0 {
        GridSpec::linear(min, max, s)
    } else {
        GridSpec::geometric(min, max, s)
    };
    grid.map_err(CliError::from_lib_usage)
}

pub fn epsilons(eps: &Eps) -> Result<Vec<f64>, CliError> {
    let list = match eps {
        Eps::List(v) => v.clone(),
        Eps::Text(s) => s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("epsilon `{}` is not a number", p.trim())))
            })
            .collect::<Result<_, _>>()?,
    };
    if list.is_empty() || list.iter().any(|&e| e.is_nan() || e <= 0.0 || e.is_infinite()) {
        return Err(CliError::Usage(format!("epsilons must be positive and finite, got {list:?}")));
    }
    Ok(list)
}

pub fn tolerance(tol: f64) -> Result<f64, CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(CliError::Usage(format!("tolerance must be positive, got {tol}")))
    }
}
