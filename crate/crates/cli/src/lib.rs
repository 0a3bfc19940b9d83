//! Command-line front end: argument handling, file formats and reports.

mod args;
mod commands;
pub mod error;
pub mod format;
pub mod report;
mod selftest;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use error::{CliError, EXIT_BUDGET, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
pub use report::{Record, RunReport};

use commands::{execute, task_name, Ctx, Output};

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::usage(format!("cannot start {t} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(_threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    Ok(f())
}

/// Runs the command line `args` (program name first), writing the report to
/// `out` and diagnostics to `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut report = RunReport::new(echo.join(" "));
    let (result, notes) = {
        let mut ctx = Ctx {
            json: cli.json,
            report: &mut report,
            notes: Vec::new(),
        };
        let r = with_threads(cli.threads, || execute(&cli.command, &mut ctx)).and_then(|r| r);
        (r, ctx.notes)
    };
    for n in notes {
        let _ = writeln!(err, "stardisc: {n}");
    }
    let result = result.and_then(|o| report.validate().map(|_| o));
    match result {
        Ok(Output::Raw(text)) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Ok(Output::Report) => {
            let _ = out.write_all(report.render(cli.json).as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let mut rec = Record::new(task_name(&cli.command));
            rec.error = Some(e.to_string());
            report.records.retain(|r| r.check_ok());
            report.records.push(rec);
            let _ = out.write_all(report.render(cli.json).as_bytes());
            let _ = writeln!(err, "stardisc: error: {e}");
            e.exit_code()
        }
    }
}
