//! Closed-form busy-period and busy-cycle layer.
//!
//! For this service family the M|G|infinity busy period is exponential with
//! an atom at the origin. Three facts pin the closed form down: the atom
//! equals the service law's own atom `q = G(0)` (a zero-length busy period
//! happens exactly when the opening customer brings zero service), the mean
//! is `(e^rho - 1)/lambda`, and the Laplace transform at `s = 1/alpha` equals
//! the peakedness formula below. Together they force
//!
//! ```text
//! B = 0 with probability q,   B ~ Exp(mu) otherwise,   mu = A e^{-rho},
//! ```
//!
//! captured by [`BusyPeriodLaw`] and used throughout as a derived oracle —
//! the simulator tests it independently.
//!
//! The *peakedness* of the busy period is the Laplace transform of its
//! length at `s = 1/alpha`; the busy-cycle version multiplies in the idle
//! period's `Exp(lambda)` transform, giving the exact ratio
//! `pi_cycle = rho/(rho + 1) pi`. The *modified peakedness* rescales to
//! strip the part common to all service laws:
//! `qi = pi rho/(e^rho - rho - 1) + 1` and
//! `qi_cycle = pi_cycle rho/(e^rho - rho) + 1`.
//!
//! [`renewal_function_paper`] reproduces a published closed form for the
//! expected number of busy-period beginnings in `[0, t]` exactly as printed.
//! Its constant term does not match either convention of the re-derived
//! oracle ([`renewal_oracle`]); the slope and the transient coefficient do.
//! The discrepancy is a fixed offset `e^{-rho} + 2X` (see
//! [`renewal_constant_gap`]), reported rather than silently patched so the
//! printed form stays traceable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::service_law::ServiceLawParams;

/// The conjectured busy-period law: an atom at zero plus an exponential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusyPeriodLaw {
    /// Probability of a zero-length busy period, `q = G(0)`.
    pub atom_mass: f64,
    /// Rate of the positive part, `mu = A e^{-rho}` (zero at `beta = -lambda`).
    pub rate: f64,
}

impl BusyPeriodLaw {
    /// Mean busy-period length `(1 - q)/mu`; zero for the degenerate law,
    /// where every busy period has zero length.
    pub fn mean(&self) -> f64 {
        if self.atom_mass >= 1.0 || self.rate == 0.0 {
            0.0
        } else {
            (1.0 - self.atom_mass) / self.rate
        }
    }

    /// Laplace transform `q + (1 - q) mu/(mu + s)` at `s >= 0`.
    pub fn laplace(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 1.0;
        }
        self.atom_mass + (1.0 - self.atom_mass) * (self.rate / (self.rate + s))
    }
}

/// Peakedness and modified peakedness for busy period and busy cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakednessReport {
    pub pi: f64,
    pub qi: f64,
    pub pi_cycle: f64,
    pub qi_cycle: f64,
}

impl PeakednessReport {
    pub fn compute(params: &ServiceLawParams) -> Self {
        PeakednessReport {
            pi: peakedness_busy(params),
            qi: modified_peakedness_busy(params),
            pi_cycle: peakedness_cycle(params),
            qi_cycle: modified_peakedness_cycle(params),
        }
    }
}

/// Which renewal process the re-derived closed form describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenewalConvention {
    /// Renewal instants at busy-cycle starts; the count excludes the origin.
    OrdinaryCycleStart,
    /// Time zero at an idle-period start; the first busy period begins after
    /// an `Exp(lambda)` delay.
    DelayedIdleStart,
}

/// Mean busy-period length `(e^rho - 1)/lambda`.
///
/// This is the M|G|infinity value for mean service time `alpha`; at the
/// degenerate boundary `beta = -lambda` the nominal `rho` no longer equals
/// `lambda` times the actual mean and the realized busy periods are all
/// zero — use [`conjectured_busy_law`] and [`BusyPeriodLaw::mean`] there.
pub fn busy_period_mean(params: &ServiceLawParams) -> f64 {
    params.rho().exp_m1() / params.lambda()
}

/// Mean busy-cycle length: idle mean `1/lambda` plus the busy mean,
/// `e^rho / lambda`.
pub fn busy_cycle_mean(params: &ServiceLawParams) -> f64 {
    params.rho().exp() / params.lambda()
}

/// Busy-period peakedness: the Laplace transform of the busy-period length
/// at `s = 1/alpha`,
///
/// ```text
/// pi = (e^{-rho} (lambda + beta)(rho + 1) - lambda p - beta)
///    / (lambda (e^{-rho} (rho + alpha beta) + 1 - p))
/// ```
///
/// At `beta = -lambda` the busy period is identically zero and `pi = 1`
/// (the formula reaches the same value by continuity).
pub fn peakedness_busy(params: &ServiceLawParams) -> f64 {
    if params.is_degenerate() {
        return 1.0;
    }
    let (lambda, rho, beta, p) = (params.lambda(), params.rho(), params.beta(), params.p());
    let erho = (-rho).exp();
    let num = erho * (lambda + beta) * (rho + 1.0) - lambda * p - beta;
    let den = lambda * (erho * (rho + params.alpha() * beta) + 1.0 - p);
    num / den
}

/// Modified busy-period peakedness `qi = pi rho/(e^rho - rho - 1) + 1`,
/// computed from the definitional relation applied to [`peakedness_busy`].
pub fn modified_peakedness_busy(params: &ServiceLawParams) -> f64 {
    let rho = params.rho();
    peakedness_busy(params) * rho / (rho.exp() - rho - 1.0) + 1.0
}

/// Busy-cycle peakedness: the cycle transform at `s = 1/alpha`. Since the
/// cycle is an independent `Exp(lambda)` idle period plus the busy period,
/// `pi_cycle = rho/(rho + 1) pi` exactly.
pub fn peakedness_cycle(params: &ServiceLawParams) -> f64 {
    let rho = params.rho();
    rho / (rho + 1.0) * peakedness_busy(params)
}

/// Modified busy-cycle peakedness `qi_cycle = pi_cycle rho/(e^rho - rho) + 1`.
pub fn modified_peakedness_cycle(params: &ServiceLawParams) -> f64 {
    let rho = params.rho();
    peakedness_cycle(params) * rho / (rho.exp() - rho) + 1.0
}

/// The published closed form for the busy-cycle renewal function, verbatim:
///
/// ```text
/// R(t) = e^{-rho}(1 + lambda t)
///      + (1 - e^{-rho}) (lambda p + beta)/(lambda + beta) e^{-At}
///      + (1 - e^{-rho}) (lambda p + beta)/(lambda + beta)
/// ```
///
/// Singular at `beta = -lambda`. Its asymptotic slope `lambda e^{-rho}` and
/// `e^{-At}` coefficient agree with [`renewal_oracle`]; its constant term
/// does not (see [`renewal_constant_gap`]).
pub fn renewal_function_paper(params: &ServiceLawParams, t: f64) -> Result<f64> {
    if params.is_degenerate() {
        return Err(Error::DegenerateParameter);
    }
    let (lambda, beta, p) = (params.lambda(), params.beta(), params.p());
    let erho = (-params.rho()).exp();
    let one_minus = -(-params.rho()).exp_m1();
    let mixture = (lambda * p + beta) / (lambda + beta);
    Ok(erho * (1.0 + lambda * t)
        + one_minus * mixture * (-params.a_rate() * t).exp()
        + one_minus * mixture)
}

/// The busy-period law forced by the atom, the mean, and the transform
/// value: `q = G(0)`, `mu = A e^{-rho}`. `beta = -lambda` gives `q = 1`,
/// `mu = 0`, read as a busy period identically zero.
pub fn conjectured_busy_law(params: &ServiceLawParams) -> BusyPeriodLaw {
    BusyPeriodLaw {
        atom_mass: params.atom(),
        rate: params.a_rate() * (-params.rho()).exp(),
    }
}

/// Laplace transform of the conjectured busy-period law at `s >= 0`.
///
/// At `s = 1/alpha` this equals [`peakedness_busy`] to machine precision —
/// the keystone identity tying the conjectured law to the closed form.
pub fn laplace_conjectured(params: &ServiceLawParams, s: f64) -> f64 {
    conjectured_busy_law(params).laplace(s)
}

/// Renewal function of the conjectured cycle law, re-derived by inverting
/// `phi(s) = lambda/(lambda + s) (q + (1 - q) mu/(mu + s))` through partial
/// fractions. Writing `X = (1 - e^{-rho})(lambda p + beta)/(lambda + beta)`:
///
/// - ordinary (cycle-start) count: `lambda e^{-rho} t - X (1 - e^{-At})`;
/// - delayed (idle-start) count:
///   `lambda e^{-rho} t + (lambda (1 - e^{-rho})/A)(1 - e^{-At})`.
///
/// Both slopes equal `lambda e^{-rho} = 1/busy_cycle_mean`, as the
/// elementary renewal theorem requires.
pub fn renewal_oracle(
    params: &ServiceLawParams,
    t: f64,
    convention: RenewalConvention,
) -> Result<f64> {
    if params.is_degenerate() {
        return Err(Error::DegenerateParameter);
    }
    let (lambda, beta, p) = (params.lambda(), params.beta(), params.p());
    let a = params.a_rate();
    let erho = (-params.rho()).exp();
    let one_minus = -(-params.rho()).exp_m1();
    let transient = -(-a * t).exp_m1(); // 1 - e^{-At}
    let linear = lambda * erho * t;
    Ok(match convention {
        RenewalConvention::OrdinaryCycleStart => {
            let x = one_minus * (lambda * p + beta) / (lambda + beta);
            linear - x * transient
        }
        RenewalConvention::DelayedIdleStart => linear + lambda * one_minus / a * transient,
    })
}

/// Fixed offset between the printed renewal function and the ordinary
/// oracle: `R_paper(t) - R_ordinary(t) = e^{-rho} + 2X` for every `t`.
pub fn renewal_constant_gap(params: &ServiceLawParams) -> Result<f64> {
    if params.is_degenerate() {
        return Err(Error::DegenerateParameter);
    }
    let x = -(-params.rho()).exp_m1() * (params.lambda() * params.p() + params.beta())
        / (params.lambda() + params.beta());
    Ok((-params.rho()).exp() + 2.0 * x)
}

/// Time grid with the printed renewal function and both oracle conventions
/// evaluated on it. All three curves share the asymptotic slope
/// `lambda e^{-rho}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewalCurve {
    pub t_grid: Vec<f64>,
    pub r_paper: Vec<f64>,
    pub r_oracle_ordinary: Vec<f64>,
    pub r_oracle_delayed: Vec<f64>,
}

impl RenewalCurve {
    pub fn compute(params: &ServiceLawParams, t_max: f64, points: usize) -> Result<Self> {
        assert!(t_max > 0.0, "t_max must be positive");
        assert!(points >= 1, "need at least one grid point");
        let mut t_grid = Vec::with_capacity(points);
        let mut r_paper = Vec::with_capacity(points);
        let mut r_ord = Vec::with_capacity(points);
        let mut r_del = Vec::with_capacity(points);
        for j in 1..=points {
            let t = t_max * j as f64 / points as f64;
            t_grid.push(t);
            r_paper.push(renewal_function_paper(params, t)?);
            r_ord.push(renewal_oracle(
                params,
                t,
                RenewalConvention::OrdinaryCycleStart,
            )?);
            r_del.push(renewal_oracle(
                params,
                t,
                RenewalConvention::DelayedIdleStart,
            )?);
        }
        Ok(RenewalCurve {
            t_grid,
            r_paper,
            r_oracle_ordinary: r_ord,
            r_oracle_delayed: r_del,
        })
    }
}

/// Finite-difference slope of an analytic renewal curve over `[t1, t2]`.
pub fn renewal_slope(
    params: &ServiceLawParams,
    f: impl Fn(&ServiceLawParams, f64) -> Result<f64>,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    Ok((f(params, t2)? - f(params, t1)?) / (t2 - t1))
}
