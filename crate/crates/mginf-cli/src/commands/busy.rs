use mginf::busy_analytics::{
    renewal_constant_gap, renewal_function_paper, renewal_oracle, RenewalConvention, RenewalCurve,
};

use crate::args::{BusyArgs, Format};
use crate::config;
use crate::output::{emit_csv, emit_json};
use crate::report::BusyReport;
use crate::{CmdResult, UsageError};

pub const CURVE_HEADER: &str = "t,r_paper,r_oracle_ordinary,r_oracle_delayed";

pub fn run(args: BusyArgs) -> CmdResult {
    if args.t_max <= 0.0 {
        return Err(UsageError("--t-max must be positive".into()));
    }
    if args.points < 1 {
        return Err(UsageError("--points must be at least 1".into()));
    }
    let resolved = config::resolve(&args.common)?;
    let params = resolved.params;

    match args.common.format.unwrap_or(Format::Json) {
        Format::Csv => {
            if params.is_degenerate() {
                return Err(UsageError(
                    "the renewal curve is undefined at beta = -lambda".into(),
                ));
            }
            let curve =
                RenewalCurve::compute(&params, args.t_max, args.points).map_err(UsageError::new)?;
            let rows = (0..curve.t_grid.len())
                .map(|i| {
                    vec![
                        curve.t_grid[i],
                        curve.r_paper[i],
                        curve.r_oracle_ordinary[i],
                        curve.r_oracle_delayed[i],
                    ]
                })
                .collect();
            emit_csv(&args.common.out, CURVE_HEADER, rows)?;
            Ok(0)
        }
        Format::Json => {
            let (slope_ok, gap) = if params.is_degenerate() {
                (None, None)
            } else {
                (
                    Some(slope_check(&params)),
                    Some(renewal_constant_gap(&params).expect("non-degenerate")),
                )
            };
            let report = BusyReport::build(&params, slope_ok, gap);
            emit_json(&args.common.out, &report)?;
            Ok(0)
        }
    }
}

/// Finite-difference slope of all three analytic curves over [50/A, 100/A]
/// against lambda e^{-rho}, at 1e-6 relative.
fn slope_check(params: &mginf::ServiceLawParams) -> bool {
    let a = params.a_rate();
    let (t1, t2) = (50.0 / a, 100.0 / a);
    let expected = params.lambda() * (-params.rho()).exp();
    let ok = |y2: f64, y1: f64| ((y2 - y1) / (t2 - t1) - expected).abs() <= 1e-6 * expected;
    let paper = ok(
        renewal_function_paper(params, t2).unwrap(),
        renewal_function_paper(params, t1).unwrap(),
    );
    let ord = ok(
        renewal_oracle(params, t2, RenewalConvention::OrdinaryCycleStart).unwrap(),
        renewal_oracle(params, t1, RenewalConvention::OrdinaryCycleStart).unwrap(),
    );
    let del = ok(
        renewal_oracle(params, t2, RenewalConvention::DelayedIdleStart).unwrap(),
        renewal_oracle(params, t1, RenewalConvention::DelayedIdleStart).unwrap(),
    );
    paper && ord && del
}
