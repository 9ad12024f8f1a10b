use crate::args::ValidateArgs;
use crate::battery;
use crate::config;
use crate::output::emit_json;
use crate::report::ValidateReport;
use crate::CmdResult;

pub fn run(args: ValidateArgs) -> CmdResult {
    args.common
        .fixed_format(crate::args::Format::Json, "validate")?;
    let (config_echo, checks) = if args.grid {
        (None, battery::grid_battery())
    } else {
        let resolved = config::resolve(&args.common)?;
        (
            Some((&resolved.params).into()),
            battery::point_battery(&resolved.params),
        )
    };
    let all_pass = battery::all_pass(&checks);
    let report = ValidateReport {
        command: "validate".to_string(),
        config: config_echo,
        grid: args.grid,
        checks,
        all_pass,
    };
    emit_json(&args.common.out, &report)?;
    Ok(if all_pass { 0 } else { 1 })
}
