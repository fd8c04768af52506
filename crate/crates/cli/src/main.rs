//! `tribell` command-line front end.
//!
//! Exit codes: 0 success, 1 computation mismatch or runtime failure, 2 usage.

mod args;
mod commands;
mod manifest;
mod state;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use crate::args::{Cli, Command, Format};
use crate::commands::Report;

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Reproduce(a) => commands::reproduce(a),
        Command::Optimize(a) => commands::optimize_cmd(a, cli.radians),
        Command::LhvScan(a) => commands::lhv_scan(a),
        Command::Sample(a) => commands::sample(a, cli.radians),
        Command::Correlations(a) => commands::correlations(a, cli.radians),
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Table => report.table.clone(),
        Format::Csv => report.csv.clone(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("JSON values always render");
            s.push('\n');
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pair_count = match &cli.command {
        Command::Sample(a) => Some(a.pairs.pairs.len()),
        Command::Correlations(a) => Some(a.pairs.pairs.len()),
        _ => None,
    };
    if let Some(n) = pair_count.filter(|&n| n != 1 && n != 3) {
        Cli::command()
            .error(
                clap::error::ErrorKind::WrongNumberOfValues,
                format!("--pairs must be given once or three times, got {n}"),
            )
            .exit();
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": format!("{e:#}") }));
            return ExitCode::from(1);
        }
    };
    let text = render(&report, cli.format);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("{}", serde_json::json!({ "error": format!("writing {}: {e}", path.display()) }));
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
