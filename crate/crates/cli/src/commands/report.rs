use super::write_file;
use crate::args::ReportArgs;
use crate::error::CliResult;
use crate::report::{render_table, EvalReport};

pub fn cmd_report(args: &ReportArgs) -> CliResult<String> {
    let rows = args
        .reports
        .iter()
        .map(|p| EvalReport::read(p).map(|r| r.table_row()))
        .collect::<CliResult<Vec<_>>>()?;
    let table = render_table(&rows, args.format)?;
    match &args.out {
        Some(path) => {
            write_file(path, &table)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(table),
    }
}
