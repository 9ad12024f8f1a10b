//! Serializable report shapes. Every report deserializes back losslessly
//! (serde_json is built with `float_roundtrip`), so a stored report is full
//! provenance for the run that produced it.

use mginf::busy_analytics::{
    busy_cycle_mean, busy_period_mean, conjectured_busy_law, PeakednessReport,
};
use mginf::moments::{MomentMethod, TruncationLengths};
use mginf::simulator::{RenewalGrid, SimStats};
use mginf::ServiceLawParams;
use serde::{Deserialize, Serialize};

/// Fully-resolved parameter echo: raw inputs plus the derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub lambda: f64,
    pub rho: f64,
    pub p: f64,
    pub beta: f64,
    pub alpha: f64,
    pub a_rate: f64,
    pub beta_max: f64,
    pub atom: f64,
}

impl From<&ServiceLawParams> for ParamsEcho {
    fn from(s: &ServiceLawParams) -> Self {
        ParamsEcho {
            lambda: s.lambda(),
            rho: s.rho(),
            p: s.p(),
            beta: s.beta(),
            alpha: s.alpha(),
            a_rate: s.a_rate(),
            beta_max: s.beta_max(),
            atom: s.atom(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub max_error: f64,
}

impl CheckResult {
    pub fn from_error(name: &str, max_error: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            status: if max_error <= tolerance {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            max_error,
        }
    }

    pub fn skipped(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            status: CheckStatus::Skipped,
            max_error: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub command: String,
    pub config: Option<ParamsEcho>,
    pub grid: bool,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsEcho {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperTruncation {
    pub m_a: usize,
    pub m_b: usize,
    /// The second condition's exponent is ambiguous in the source material;
    /// it is evaluated best-effort and reported for reference only.
    pub note: String,
}

impl From<&TruncationLengths> for PaperTruncation {
    fn from(t: &TruncationLengths) -> Self {
        PaperTruncation {
            m_a: t.paper_a,
            m_b: t.paper_b,
            note: "paper-form, unverified".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsReport {
    pub command: String,
    pub config: ParamsEcho,
    pub n: u32,
    pub method: MomentMethod,
    pub value: f64,
    pub error_bound: Option<f64>,
    pub truncation: usize,
    pub bounds: BoundsEcho,
    pub paper_truncation: Option<PaperTruncation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjecturedEcho {
    pub q: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusyReport {
    pub command: String,
    pub config: ParamsEcho,
    pub pi: f64,
    pub qi: f64,
    pub pi_cycle: f64,
    pub qi_cycle: f64,
    pub busy_mean: f64,
    pub cycle_mean: f64,
    pub conjectured: ConjecturedEcho,
    /// Finite-difference slope of all three analytic renewal curves matches
    /// lambda e^{-rho} within 1e-6 relative; absent at beta = -lambda where
    /// the curves are undefined.
    pub slope_ok: Option<bool>,
    /// Constant offset of the printed renewal function above the ordinary
    /// cycle-start oracle, e^{-rho} + 2X; absent at beta = -lambda.
    pub renewal_constant_gap: Option<f64>,
}

impl BusyReport {
    pub fn build(params: &ServiceLawParams, slope_ok: Option<bool>, gap: Option<f64>) -> Self {
        let pk = PeakednessReport::compute(params);
        let conj = conjectured_busy_law(params);
        BusyReport {
            command: "busy".to_string(),
            config: params.into(),
            pi: pk.pi,
            qi: pk.qi,
            pi_cycle: pk.pi_cycle,
            qi_cycle: pk.qi_cycle,
            busy_mean: busy_period_mean(params),
            cycle_mean: busy_cycle_mean(params),
            conjectured: ConjecturedEcho {
                q: conj.atom_mass,
                mu: conj.rate,
            },
            slope_ok,
            renewal_constant_gap: gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub target: f64,
    pub estimate: f64,
    pub se: f64,
    pub rule: String,
    pub pass: bool,
}

impl Verdict {
    pub fn three_se(name: &str, target: f64, value: f64, se: f64) -> Self {
        Verdict {
            name: name.to_string(),
            target,
            estimate: value,
            se,
            rule: "within 3 se".to_string(),
            pass: (value - target).abs() <= 3.0 * se,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfigEcho {
    pub params: ParamsEcho,
    pub cycles: usize,
    pub replications: usize,
    pub seed: u64,
    pub renewal: Option<RenewalGrid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub command: String,
    pub config: SimConfigEcho,
    pub stats: SimStats,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
}
