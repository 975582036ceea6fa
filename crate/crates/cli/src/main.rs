use std::io::Write;
use std::process::ExitCode;

use binquad_cli::{run, Cli, CliError, Report};
use clap::Parser;

fn emit(report: &Report, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) if path.as_os_str() != "-" => std::fs::write(path, &report.body)?,
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(report.body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|report| {
        for note in &report.notes {
            eprintln!("{note}");
        }
        emit(&report, cli.command.output().out.as_deref())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
