use std::process::ExitCode;

use clap::Parser;
use triperim::cli::{gallery_instance, run, Cli, Command, Format, Outcome, RunConfig};
use triperim::report::Report;

fn emit(outcome: &Outcome, format: Format) -> ExitCode {
    match format {
        Format::Json => println!("{}", outcome.report.to_json()),
        Format::Text if outcome.exit_code == 2 => eprint!("{}", outcome.report.to_text()),
        Format::Text => print!("{}", outcome.report.to_text()),
    }
    ExitCode::from(outcome.exit_code)
}

fn input_error(message: String, format: Format) -> ExitCode {
    emit(&Outcome { report: Report::input_error(message), exit_code: 2 }, format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(msg) => return input_error(msg, cli.format),
    };
    let text = match (&cli.input, config.command) {
        (Some(path), c) if c != Command::Gallery => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                return input_error(format!("cannot read {}: {e}", path.display()), cli.format)
            }
        },
        _ => None,
    };
    if let (Some(path), Command::Gallery) = (&cli.export, config.command) {
        let written = gallery_instance(&config)
            .map_err(|e| e.to_string())
            .and_then(|doc| std::fs::write(path, doc.to_json()).map_err(|e| e.to_string()));
        if let Err(e) = written {
            return input_error(format!("cannot export to {}: {e}", path.display()), cli.format);
        }
    }
    emit(&run(&config, text.as_deref()), cli.format)
}
