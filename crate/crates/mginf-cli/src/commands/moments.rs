use mginf::moments::{
    moment_bounds, moment_grid, moment_quadrature, moment_series, truncation_length,
};

use crate::args::{MethodArg, MomentsArgs};
use crate::config;
use crate::output::emit_json;
use crate::report::{BoundsEcho, MomentsReport, PaperTruncation};
use crate::{CmdResult, UsageError};

pub fn run(args: MomentsArgs) -> CmdResult {
    args.common
        .fixed_format(crate::args::Format::Json, "moments")?;
    if args.n < 1 {
        return Err(UsageError("--n must be at least 1".into()));
    }
    if args.eps <= 0.0 {
        return Err(UsageError("--eps must be positive".into()));
    }
    if args.m < 1 {
        return Err(UsageError("--m must be at least 1".into()));
    }
    if !(args.tail_tol > 0.0 && args.tail_tol < 1.0) {
        return Err(UsageError("--tail-tol must lie in (0, 1)".into()));
    }
    let resolved = config::resolve(&args.common)?;
    let params = resolved.params;

    let estimate = match args.method {
        MethodArg::Series => moment_series(&params, args.n, args.eps).map_err(|e| {
            UsageError(match e {
                mginf::Error::RhoTooLarge(rho) => {
                    format!("the series route requires rho < ln 2 = 0.6931...; got rho = {rho}")
                }
                other => other.to_string(),
            })
        })?,
        MethodArg::Grid => moment_grid(&params, args.n, args.m, args.tail_tol),
        MethodArg::Quadrature => moment_quadrature(&params, args.n).map_err(UsageError::new)?,
        MethodArg::Bounds => moment_bounds(&params, args.n)
            .map_err(UsageError::new)?
            .midpoint_estimate(),
    };
    let bounds = moment_bounds(&params, args.n).map_err(UsageError::new)?;
    let paper_truncation = truncation_length(&params, args.n, args.eps)
        .ok()
        .map(|t| PaperTruncation::from(&t));

    let report = MomentsReport {
        command: "moments".to_string(),
        config: (&params).into(),
        n: args.n,
        method: estimate.method,
        value: estimate.value,
        error_bound: estimate.error_bound,
        truncation: estimate.truncation,
        bounds: BoundsEcho {
            lower: bounds.lower,
            upper: bounds.upper,
        },
        paper_truncation,
    };
    emit_json(&args.common.out, &report)?;
    Ok(0)
}
