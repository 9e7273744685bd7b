use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use levy_transience_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if shown { 0 } else { 1 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            eprintln!("seed: {}", report.seed);
            eprintln!("{}", report.summary);
            let written = match &cli.out {
                Some(dir) => report.write_to(dir),
                None => std::io::stdout()
                    .write_all(report.render(cli.format).as_bytes())
                    .map_err(|e| levy_transience_cli::CliError::Usage(e.to_string())),
            };
            if let Err(e) = written {
                eprintln!("{e}");
                return ExitCode::from(e.exit_code() as u8);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
