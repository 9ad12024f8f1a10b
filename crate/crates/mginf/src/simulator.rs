//! Seeded, replicable Monte Carlo simulation of the M|G|infinity queue.
//!
//! With infinitely many servers no event queue is needed: during a busy
//! period the only state worth tracking is the latest departure time. Each
//! cycle is generated as
//!
//! 1. an idle period (the memoryless overshoot of the Poisson arrival stream
//!    past the previous busy end, so it is exactly `Exp(lambda)`),
//! 2. a busy period opened by the next arrival: every further arrival before
//!    the current busy end joins (no queueing) and pushes the busy end to
//!    `max(busy_end, arrival + service)`; the first arrival at or past the
//!    busy end closes the period and opens the next cycle.
//!
//! An arrival exactly at the busy end (a probability-zero tie) starts a new
//! cycle; the rule is fixed so runs are reproducible.
//!
//! Replications are independent: replication `i` owns a PCG64-MCG generator
//! seeded by [`crate::seed::replication_seed`]`(master_seed, i)`. They may
//! run in parallel; results are collected per replication and reduced in
//! index order, so the output is bit-identical for any thread count.

use rand::{Rng, RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::busy_analytics::conjectured_busy_law;
use crate::error::{Error, Result};
use crate::seed::replication_seed;
use crate::service_law::ServiceLawParams;

/// Minimum pooled cycles (or positive busy lengths for the KS test) before
/// summary statistics are considered meaningful.
pub const MIN_SAMPLES: usize = 1000;

/// Where the renewal-curve timeline starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenewalOrigin {
    /// Time zero at a busy-period beginning, which is counted.
    BusyStart,
    /// Time zero at an idle-period beginning (empty system).
    IdleStart,
}

/// Grid on which the empirical renewal curve is accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenewalGrid {
    pub origin: RenewalOrigin,
    pub t_max: f64,
    pub points: usize,
}

/// Full simulation configuration. `n_cycles` is per replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ServiceLawParams,
    pub n_cycles: usize,
    pub replications: usize,
    pub master_seed: u64,
    pub renewal: Option<RenewalGrid>,
}

/// One busy cycle: the idle period that opened it and the busy period that
/// followed. `busy_len = 0` occurs with positive probability exactly when
/// the service law has an atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSample {
    pub idle_len: f64,
    pub busy_len: f64,
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// One-sample Kolmogorov-Smirnov outcome at the 5% level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub distance: f64,
    /// `1.36 / sqrt(n)`, the asymptotic 5% critical value.
    pub threshold: f64,
    pub pass: bool,
    pub n: usize,
}

/// Empirical renewal counts per grid point, averaged over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRenewal {
    pub origin: RenewalOrigin,
    pub t_grid: Vec<f64>,
    pub mean_counts: Vec<f64>,
    pub se: Vec<f64>,
    pub replications: usize,
}

/// Monte Carlo summaries of a cycle sample.
///
/// Every standard error is the pooled sample standard deviation over
/// `sqrt(n)` (binomial for the atom fraction; delta method for the squared
/// coefficient of variation). The Laplace-transform estimates average
/// `exp(-len / alpha)`, i.e. the transform at `s = 1/alpha`, so they target
/// the busy and cycle peakedness. `cv2_positive_busy` and `ks` are absent
/// when fewer than [`MIN_SAMPLES`] positive busy lengths exist (for example
/// at `beta = -lambda`, where every busy period is empty).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub n_total_cycles: usize,
    pub mean_busy: Estimate,
    pub mean_idle: Estimate,
    pub mean_cycle: Estimate,
    pub atom_fraction: Estimate,
    pub lt_busy_at_inv_alpha: Estimate,
    pub lt_cycle_at_inv_alpha: Estimate,
    pub cv2_positive_busy: Option<Estimate>,
    pub ks: Option<KsReport>,
    pub empirical_renewal: Option<EmpiricalRenewal>,
}

fn exp_draw<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// Generates the cycles of one replication on a single continuous timeline.
fn run_replication(params: &ServiceLawParams, n_cycles: usize, seed: u64) -> Vec<CycleSample> {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let lambda = params.lambda();
    let mut out = Vec::with_capacity(n_cycles);
    let mut prev_busy_end = 0.0_f64;
    let mut pending = exp_draw(&mut rng, lambda); // next arrival instant
    for _ in 0..n_cycles {
        let idle_len = pending - prev_busy_end;
        let busy_start = pending;
        let mut busy_end = busy_start + params.sample(&mut rng);
        loop {
            pending += exp_draw(&mut rng, lambda);
            if pending >= busy_end {
                break;
            }
            busy_end = busy_end.max(pending + params.sample(&mut rng));
        }
        out.push(CycleSample {
            idle_len,
            busy_len: busy_end - busy_start,
        });
        prev_busy_end = busy_end;
    }
    out
}

/// Runs all replications (in parallel) and returns their cycle samples in
/// replication order.
pub fn simulate_cycles(config: &SimConfig) -> Vec<Vec<CycleSample>> {
    assert!(config.n_cycles >= 1, "n_cycles must be at least 1");
    assert!(config.replications >= 1, "replications must be at least 1");
    (0..config.replications)
        .into_par_iter()
        .map(|i| {
            run_replication(
                &config.params,
                config.n_cycles,
                replication_seed(config.master_seed, i as u64),
            )
        })
        .collect()
}

/// Busy-period start times of one replication, up to `t_max`.
fn run_renewal_replication(
    params: &ServiceLawParams,
    origin: RenewalOrigin,
    t_max: f64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let lambda = params.lambda();
    let mut starts = Vec::new();
    let mut pending = match origin {
        RenewalOrigin::BusyStart => 0.0,
        RenewalOrigin::IdleStart => exp_draw(&mut rng, lambda),
    };
    loop {
        if pending > t_max {
            break;
        }
        starts.push(pending);
        let mut busy_end = pending + params.sample(&mut rng);
        loop {
            pending += exp_draw(&mut rng, lambda);
            if pending >= busy_end {
                break;
            }
            busy_end = busy_end.max(pending + params.sample(&mut rng));
        }
    }
    starts
}

/// Ensemble estimate of the renewal function: each replication regenerates a
/// fresh timeline from the configured origin and counts busy-period
/// beginnings in `[0, t]` per grid point; the mean and standard error are
/// taken across replications.
pub fn estimate_renewal_curve(config: &SimConfig) -> Result<EmpiricalRenewal> {
    let grid = config.renewal.ok_or(Error::MissingRenewalGrid)?;
    assert!(grid.t_max > 0.0, "renewal t_max must be positive");
    assert!(grid.points >= 1, "renewal grid needs at least one point");
    assert!(config.replications >= 1, "replications must be at least 1");
    let t_grid: Vec<f64> = (1..=grid.points)
        .map(|j| grid.t_max * j as f64 / grid.points as f64)
        .collect();
    let per_rep: Vec<Vec<f64>> = (0..config.replications)
        .into_par_iter()
        .map(|i| {
            let starts = run_renewal_replication(
                &config.params,
                grid.origin,
                grid.t_max,
                replication_seed(config.master_seed, i as u64),
            );
            // starts are ascending; one sweep gives counts at every grid point
            let mut counts = Vec::with_capacity(t_grid.len());
            let mut idx = 0usize;
            for &t in &t_grid {
                while idx < starts.len() && starts[idx] <= t {
                    idx += 1;
                }
                counts.push(idx as f64);
            }
            counts
        })
        .collect();

    let r = config.replications as f64;
    let mut mean_counts = vec![0.0; t_grid.len()];
    let mut se = vec![0.0; t_grid.len()];
    for counts in &per_rep {
        for (m, &c) in mean_counts.iter_mut().zip(counts) {
            *m += c;
        }
    }
    for m in &mut mean_counts {
        *m /= r;
    }
    if config.replications > 1 {
        for counts in &per_rep {
            for ((s, &c), &m) in se.iter_mut().zip(counts).zip(&mean_counts) {
                *s += (c - m) * (c - m);
            }
        }
        for s in &mut se {
            *s = (*s / (r - 1.0)).sqrt() / r.sqrt();
        }
    }
    Ok(EmpiricalRenewal {
        origin: grid.origin,
        t_grid,
        mean_counts,
        se,
        replications: config.replications,
    })
}

struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn new() -> Self {
        Welford {
            n: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn estimate(&self) -> Estimate {
        let n = self.n as f64;
        let var = if self.n > 1 { self.m2 / (n - 1.0) } else { 0.0 };
        Estimate {
            value: self.mean,
            se: (var / n).sqrt(),
        }
    }
}

/// Pooled summaries over replications (reduced in replication order).
///
/// Requires at least [`MIN_SAMPLES`] cycles in total. The renewal curve is
/// not computed here; see [`estimate_renewal_curve`].
pub fn estimate_stats(reps: &[Vec<CycleSample>], params: &ServiceLawParams) -> Result<SimStats> {
    let n_total: usize = reps.iter().map(|r| r.len()).sum();
    if n_total < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_SAMPLES,
            got: n_total,
        });
    }
    let inv_alpha = 1.0 / params.alpha();
    let mut busy = Welford::new();
    let mut idle = Welford::new();
    let mut cycle = Welford::new();
    let mut lt_busy = Welford::new();
    let mut lt_cycle = Welford::new();
    let mut zeros = 0usize;
    let mut positive = Vec::new();
    for rep in reps {
        for s in rep {
            let c = s.idle_len + s.busy_len;
            busy.push(s.busy_len);
            idle.push(s.idle_len);
            cycle.push(c);
            lt_busy.push((-s.busy_len * inv_alpha).exp());
            lt_cycle.push((-c * inv_alpha).exp());
            if s.busy_len == 0.0 {
                zeros += 1;
            } else {
                positive.push(s.busy_len);
            }
        }
    }
    let frac = zeros as f64 / n_total as f64;
    let atom_fraction = Estimate {
        value: frac,
        se: (frac * (1.0 - frac) / n_total as f64).sqrt(),
    };
    let cv2_positive_busy = if positive.len() >= MIN_SAMPLES {
        Some(cv_squared(&positive))
    } else {
        None
    };
    let ks = ks_exponential_check(&positive, params).ok();
    Ok(SimStats {
        n_total_cycles: n_total,
        mean_busy: busy.estimate(),
        mean_idle: idle.estimate(),
        mean_cycle: cycle.estimate(),
        atom_fraction,
        lt_busy_at_inv_alpha: lt_busy.estimate(),
        lt_cycle_at_inv_alpha: lt_cycle.estimate(),
        cv2_positive_busy,
        ks,
        empirical_renewal: None,
    })
}

/// Squared coefficient of variation `s^2 / mean^2` with a delta-method
/// standard error built from central moments up to fourth order:
///
/// ```text
/// Var(cv2) ~ (4 m2^3 / mean^6 + (m4 - m2^2) / mean^4 - 4 m2 m3 / mean^5) / n
/// ```
fn cv_squared(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let cv2 = m2 / (mean * mean);
    let var = (4.0 * m2.powi(3) / mean.powi(6) + (m4 - m2 * m2) / mean.powi(4)
        - 4.0 * m2 * m3 / mean.powi(5))
        / n;
    Estimate {
        value: cv2,
        se: var.max(0.0).sqrt(),
    }
}

/// One-sample Kolmogorov-Smirnov test of `samples` against the exponential
/// part of the conjectured busy-period law, `Exp(mu)` with
/// `mu = A e^{-rho}`. Needs at least [`MIN_SAMPLES`] observations; the pass
/// threshold is the asymptotic 5% value `1.36/sqrt(n)`.
pub fn ks_exponential_check(samples: &[f64], params: &ServiceLawParams) -> Result<KsReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let mu = conjectured_busy_law(params).rate;
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut distance = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = -(-mu * x).exp_m1(); // 1 - e^{-mu x}
        distance = distance
            .max(((i + 1) as f64 / n - f).abs())
            .max((f - i as f64 / n).abs());
    }
    let threshold = 1.36 / n.sqrt();
    Ok(KsReport {
        distance,
        threshold,
        pass: distance < threshold,
        n: xs.len(),
    })
}
