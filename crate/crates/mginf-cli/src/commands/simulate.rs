use mginf::busy_analytics::{
    conjectured_busy_law, peakedness_busy, peakedness_cycle, renewal_function_paper,
    renewal_oracle, RenewalConvention,
};
use mginf::simulator::{
    estimate_renewal_curve, estimate_stats, simulate_cycles, EmpiricalRenewal, RenewalGrid,
    SimConfig,
};
use mginf::ServiceLawParams;

use crate::args::{Format, SimulateArgs};
use crate::config;
use crate::output::{emit_csv, emit_json};
use crate::report::{SimConfigEcho, SimulateReport, Verdict};
use crate::{CmdResult, UsageError};

pub const COMPARISON_HEADER: &str = "t,empirical,se,r_paper,r_oracle_ordinary,r_oracle_delayed";

pub fn run(args: SimulateArgs) -> CmdResult {
    let resolved = config::resolve(&args.common)?;
    let params = resolved.params;
    let cycles = args.cycles.unwrap_or(resolved.cycles);
    let replications = args.replications.unwrap_or(resolved.replications);
    if cycles < 1 || replications < 1 {
        return Err(UsageError(
            "--cycles and --replications must be at least 1".into(),
        ));
    }

    // flags override the file's renewal block field by field
    let mut renewal = resolved.renewal;
    if args.t_max.is_some() || args.points.is_some() || args.renewal_origin.is_some() {
        let base = renewal.unwrap_or(RenewalGrid {
            origin: mginf::simulator::RenewalOrigin::IdleStart,
            t_max: 0.0,
            points: 50,
        });
        let t_max = args.t_max.unwrap_or(base.t_max);
        if t_max <= 0.0 {
            return Err(UsageError(
                "renewal curve requested without a positive --t-max".into(),
            ));
        }
        renewal = Some(RenewalGrid {
            origin: args.renewal_origin.map(Into::into).unwrap_or(base.origin),
            t_max,
            points: args.points.unwrap_or(base.points),
        });
    }
    if let Some(grid) = &renewal {
        if grid.points < 1 {
            return Err(UsageError("--points must be at least 1".into()));
        }
        if params.is_degenerate() && args.common.format == Some(Format::Csv) {
            return Err(UsageError(
                "the renewal comparison is undefined at beta = -lambda".into(),
            ));
        }
    }

    let sim_config = SimConfig {
        params,
        n_cycles: cycles,
        replications,
        master_seed: resolved.seed,
        renewal,
    };

    let run_sim =
        || -> Result<(mginf::simulator::SimStats, Option<EmpiricalRenewal>), UsageError> {
            let reps = simulate_cycles(&sim_config);
            let mut stats = estimate_stats(&reps, &params).map_err(UsageError::new)?;
            let empirical = match renewal {
                Some(_) => Some(estimate_renewal_curve(&sim_config).map_err(UsageError::new)?),
                None => None,
            };
            stats.empirical_renewal = empirical.clone();
            Ok((stats, empirical))
        };
    let (stats, empirical) = if args.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
            .map_err(UsageError::new)?;
        pool.install(run_sim)?
    } else {
        run_sim()?
    };

    match args.common.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let emp = empirical.ok_or_else(|| {
                UsageError("the renewal comparison needs --t-max (and optionally --points)".into())
            })?;
            let mut rows = Vec::with_capacity(emp.t_grid.len());
            for (j, &t) in emp.t_grid.iter().enumerate() {
                rows.push(vec![
                    t,
                    emp.mean_counts[j],
                    emp.se[j],
                    renewal_function_paper(&params, t).map_err(UsageError::new)?,
                    renewal_oracle(&params, t, RenewalConvention::OrdinaryCycleStart)
                        .map_err(UsageError::new)?,
                    renewal_oracle(&params, t, RenewalConvention::DelayedIdleStart)
                        .map_err(UsageError::new)?,
                ]);
            }
            emit_csv(&args.common.out, COMPARISON_HEADER, rows)?;
            Ok(0)
        }
        Format::Json => {
            let verdicts = build_verdicts(&params, &stats);
            let all_pass = verdicts.iter().all(|v| v.pass);
            let report = SimulateReport {
                command: "simulate".to_string(),
                config: SimConfigEcho {
                    params: (&params).into(),
                    cycles,
                    replications,
                    seed: resolved.seed,
                    renewal,
                },
                stats,
                verdicts,
                all_pass,
            };
            emit_json(&args.common.out, &report)?;
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

/// Each Monte Carlo estimate against its analytic target. Mean targets come
/// from the conjectured busy-period law so the degenerate point (busy
/// periods identically zero) is scored correctly.
fn build_verdicts(params: &ServiceLawParams, stats: &mginf::simulator::SimStats) -> Vec<Verdict> {
    let conj = conjectured_busy_law(params);
    let idle_mean = 1.0 / params.lambda();
    let mut verdicts = vec![
        Verdict::three_se(
            "mean_busy",
            conj.mean(),
            stats.mean_busy.value,
            stats.mean_busy.se,
        ),
        Verdict::three_se(
            "mean_idle",
            idle_mean,
            stats.mean_idle.value,
            stats.mean_idle.se,
        ),
        Verdict::three_se(
            "mean_cycle",
            idle_mean + conj.mean(),
            stats.mean_cycle.value,
            stats.mean_cycle.se,
        ),
        Verdict::three_se(
            "atom_fraction",
            conj.atom_mass,
            stats.atom_fraction.value,
            stats.atom_fraction.se,
        ),
        Verdict::three_se(
            "lt_busy_at_inv_alpha",
            peakedness_busy(params),
            stats.lt_busy_at_inv_alpha.value,
            stats.lt_busy_at_inv_alpha.se,
        ),
        Verdict::three_se(
            "lt_cycle_at_inv_alpha",
            peakedness_cycle(params),
            stats.lt_cycle_at_inv_alpha.value,
            stats.lt_cycle_at_inv_alpha.se,
        ),
    ];
    if let Some(cv2) = &stats.cv2_positive_busy {
        verdicts.push(Verdict {
            name: "cv2_positive_busy".to_string(),
            target: 1.0,
            estimate: cv2.value,
            se: cv2.se,
            rule: "within 5 se".to_string(),
            pass: (cv2.value - 1.0).abs() <= 5.0 * cv2.se,
        });
    }
    if let Some(ks) = &stats.ks {
        verdicts.push(Verdict {
            name: "ks_exponential_positive_busy".to_string(),
            target: ks.threshold,
            estimate: ks.distance,
            se: 0.0,
            rule: "KS distance below the 5% critical value".to_string(),
            pass: ks.pass,
        });
    }
    if let Some(emp) = &stats.empirical_renewal {
        if !params.is_degenerate() {
            verdicts.push(slope_verdict(params, emp));
            verdicts.push(pointwise_verdict(params, emp));
        }
    }
    // keystone cross-check: the two transform estimates against each other
    // through the exact ratio identity
    let rho = params.rho();
    let ratio_target = rho / (rho + 1.0) * stats.lt_busy_at_inv_alpha.value;
    let se = (stats.lt_cycle_at_inv_alpha.se.powi(2)
        + (rho / (rho + 1.0) * stats.lt_busy_at_inv_alpha.se).powi(2))
    .sqrt();
    verdicts.push(Verdict {
        name: "cycle_ratio_consistency".to_string(),
        target: ratio_target,
        estimate: stats.lt_cycle_at_inv_alpha.value,
        se,
        rule: "within 3 se".to_string(),
        pass: (stats.lt_cycle_at_inv_alpha.value - ratio_target).abs() <= 3.0 * se,
    });
    verdicts
}

/// Least-squares slope of the empirical curve over the second half of the
/// grid, within 2% of lambda e^{-rho}.
fn slope_verdict(params: &ServiceLawParams, emp: &EmpiricalRenewal) -> Verdict {
    let expected = params.lambda() * (-params.rho()).exp();
    let half = emp.t_grid.len() / 2;
    let ts = &emp.t_grid[half..];
    let ys = &emp.mean_counts[half..];
    let n = ts.len() as f64;
    let t_bar = ts.iter().sum::<f64>() / n;
    let y_bar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &y) in ts.iter().zip(ys) {
        num += (t - t_bar) * (y - y_bar);
        den += (t - t_bar) * (t - t_bar);
    }
    let slope = if den > 0.0 { num / den } else { f64::NAN };
    Verdict {
        name: "renewal_slope".to_string(),
        target: expected,
        estimate: slope,
        se: 0.0,
        rule: "within 2%".to_string(),
        pass: (slope - expected).abs() <= 0.02 * expected,
    }
}

/// Empirical counts against the matching analytic oracle, pointwise within
/// 4 standard errors. Counting the origin makes the busy-start curve sit
/// exactly one above the ordinary cycle-start oracle.
fn pointwise_verdict(params: &ServiceLawParams, emp: &EmpiricalRenewal) -> Verdict {
    use mginf::simulator::RenewalOrigin;
    let mut worst_z = 0.0_f64;
    for (j, &t) in emp.t_grid.iter().enumerate() {
        let target = match emp.origin {
            RenewalOrigin::IdleStart => {
                renewal_oracle(params, t, RenewalConvention::DelayedIdleStart).unwrap()
            }
            RenewalOrigin::BusyStart => {
                1.0 + renewal_oracle(params, t, RenewalConvention::OrdinaryCycleStart).unwrap()
            }
        };
        let se = emp.se[j].max(1e-12);
        worst_z = worst_z.max((emp.mean_counts[j] - target).abs() / se);
    }
    Verdict {
        name: "renewal_pointwise_vs_oracle".to_string(),
        target: 4.0,
        estimate: worst_z,
        se: 0.0,
        rule: "worst |z| across the grid at most 4".to_string(),
        pass: worst_z <= 4.0,
    }
}
