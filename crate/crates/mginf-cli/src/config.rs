//! Config-file loading and flag/file resolution.
//!
//! Precedence: command-line flag, then config file, then default. `beta`
//! beats `beta_fraction` at equal precedence.

use std::path::Path;

use mginf::simulator::{RenewalGrid, RenewalOrigin};
use mginf::ServiceLawParams;
use serde::Deserialize;

use crate::args::{CommonArgs, OriginArg};
use crate::UsageError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_CYCLES: usize = 100_000;
pub const DEFAULT_REPLICATIONS: usize = 8;

#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    pub beta_fraction: Option<f64>,
    pub cycles: Option<usize>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub renewal: Option<RenewalFileConfig>,
    pub sweep: Option<SweepLists>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct RenewalFileConfig {
    pub origin: Option<String>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct SweepLists {
    #[serde(default)]
    pub rho: Vec<f64>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub beta_fraction: Vec<f64>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("malformed JSON in {}: {e}", path.display())))
}

/// Everything a command may need, resolved from flags and file.
pub struct Resolved {
    pub params: ServiceLawParams,
    pub seed: u64,
    pub cycles: usize,
    pub replications: usize,
    pub renewal: Option<RenewalGrid>,
}

pub fn resolve(common: &CommonArgs) -> Result<Resolved, UsageError> {
    let file = match &common.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };
    let lambda = common
        .lambda
        .or(file.lambda)
        .ok_or_else(|| UsageError("missing --lambda (or lambda in the config file)".into()))?;
    let rho = common
        .rho
        .or(file.rho)
        .ok_or_else(|| UsageError("missing --rho (or rho in the config file)".into()))?;
    let p = common.p.or(file.p).unwrap_or(0.0);

    let params = if let Some(beta) = common.beta {
        ServiceLawParams::new(lambda, rho, beta, p)
    } else if let Some(frac) = common.beta_fraction {
        ServiceLawParams::from_beta_fraction(lambda, rho, frac, p)
    } else if let Some(beta) = file.beta {
        ServiceLawParams::new(lambda, rho, beta, p)
    } else if let Some(frac) = file.beta_fraction {
        ServiceLawParams::from_beta_fraction(lambda, rho, frac, p)
    } else {
        ServiceLawParams::new(lambda, rho, 0.0, p)
    }
    .map_err(|e| UsageError(e.to_string()))?;

    let renewal = resolve_renewal(&file)?;
    Ok(Resolved {
        params,
        seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        cycles: file.cycles.unwrap_or(DEFAULT_CYCLES),
        replications: file.replications.unwrap_or(DEFAULT_REPLICATIONS),
        renewal,
    })
}

fn resolve_renewal(file: &FileConfig) -> Result<Option<RenewalGrid>, UsageError> {
    let Some(rf) = &file.renewal else {
        return Ok(None);
    };
    let Some(t_max) = rf.t_max else {
        return Ok(None);
    };
    Ok(Some(RenewalGrid {
        origin: parse_origin_str(rf.origin.as_deref().unwrap_or("idle_start"))?,
        t_max,
        points: rf.points.unwrap_or(50),
    }))
}

pub fn parse_origin_str(s: &str) -> Result<RenewalOrigin, UsageError> {
    match s {
        "busy_start" | "busy-start" => Ok(RenewalOrigin::BusyStart),
        "idle_start" | "idle-start" => Ok(RenewalOrigin::IdleStart),
        other => Err(UsageError(format!(
            "unknown renewal origin {other:?} (expected busy_start or idle_start)"
        ))),
    }
}

impl From<OriginArg> for RenewalOrigin {
    fn from(o: OriginArg) -> Self {
        match o {
            OriginArg::BusyStart => RenewalOrigin::BusyStart,
            OriginArg::IdleStart => RenewalOrigin::IdleStart,
        }
    }
}
