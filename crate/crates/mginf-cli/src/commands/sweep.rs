use mginf::busy_analytics::{busy_period_mean, PeakednessReport};
use mginf::moments::moment_bounds;
use mginf::ServiceLawParams;

use crate::args::SweepArgs;
use crate::config;
use crate::output::emit_csv;
use crate::{CmdResult, UsageError};

pub const SWEEP_HEADER: &str = "rho,p,beta_fraction,beta,atom,pi,qi,pi_cycle,qi_cycle,\
busy_mean,m1_lower,m1_upper,m2_lower,m2_upper,m3_lower,m3_upper,m4_lower,m4_upper";

/// Cartesian sweep over the config file's (rho, p, beta_fraction) lists.
/// beta is specified as a fraction of the admissible interval because
/// beta_max itself moves with (rho, p). Degenerate rows (fraction 0) report
/// zero moment bounds: every moment is exactly zero there.
pub fn run(args: SweepArgs) -> CmdResult {
    args.common
        .fixed_format(crate::args::Format::Csv, "sweep")?;
    let file = match &args.common.config {
        Some(path) => config::load_file(path)?,
        None => return Err(UsageError("sweep requires --config <file>".into())),
    };
    let sweep = file
        .sweep
        .clone()
        .ok_or_else(|| UsageError("config file has no \"sweep\" section".into()))?;
    let lambda = args.common.lambda.or(file.lambda).unwrap_or(1.0);

    let mut rows = Vec::new();
    for &rho in &sweep.rho {
        for &p in &sweep.p {
            for &frac in &sweep.beta_fraction {
                let params =
                    ServiceLawParams::from_beta_fraction(lambda, rho, frac, p).map_err(|e| {
                        UsageError(format!(
                            "sweep point (rho={rho}, p={p}, beta_fraction={frac}): {e}"
                        ))
                    })?;
                rows.push(sweep_row(&params, frac));
            }
        }
    }
    emit_csv(&args.common.out, SWEEP_HEADER, rows)?;
    Ok(0)
}

fn sweep_row(params: &ServiceLawParams, frac: f64) -> Vec<f64> {
    let pk = PeakednessReport::compute(params);
    let mut row = vec![
        params.rho(),
        params.p(),
        frac,
        params.beta(),
        params.atom(),
        pk.pi,
        pk.qi,
        pk.pi_cycle,
        pk.qi_cycle,
        busy_period_mean(params),
    ];
    for n in 1..=4 {
        match moment_bounds(params, n) {
            Ok(b) => {
                row.push(b.lower);
                row.push(b.upper);
            }
            // degenerate point: all moments are exactly zero
            Err(_) => {
                row.push(0.0);
                row.push(0.0);
            }
        }
    }
    row
}
