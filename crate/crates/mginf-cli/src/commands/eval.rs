use crate::args::EvalArgs;
use crate::config;
use crate::output::emit_csv;
use crate::{CmdResult, UsageError};

pub fn run(args: EvalArgs) -> CmdResult {
    args.common.fixed_format(crate::args::Format::Csv, "eval")?;
    let resolved = config::resolve(&args.common)?;
    let params = resolved.params;
    match (&args.t, &args.u) {
        (Some(ts), None) => {
            if params.is_degenerate() {
                return Err(UsageError(
                    "pdf is undefined at beta = -lambda (point mass at zero); \
                     use --u for quantiles"
                        .into(),
                ));
            }
            let rows = ts
                .iter()
                .map(|&t| {
                    let pdf = if t < 0.0 {
                        0.0
                    } else {
                        params.pdf(t).expect("non-degenerate")
                    };
                    vec![t, params.cdf(t), pdf, params.survival(t)]
                })
                .collect();
            emit_csv(&args.common.out, "t,cdf,pdf,survival", rows)?;
            Ok(0)
        }
        (None, Some(us)) => {
            let mut rows = Vec::with_capacity(us.len());
            for &u in us {
                let q = params.quantile(u).map_err(UsageError::new)?;
                rows.push(vec![u, q]);
            }
            emit_csv(&args.common.out, "u,quantile", rows)?;
            Ok(0)
        }
        _ => Err(UsageError(
            "exactly one of --t <list> or --u <list> is required".into(),
        )),
    }
}
