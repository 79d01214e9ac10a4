//! `xhack`: simulate data, search pipelines, report, and audit a reported
//! explanation metric.
//!
//! Every command resolves its flags into a [`run::RunConfig`], writes it to
//! the output directory as `run_config.json`, and can be re-run from that
//! file with `xhack replay`.

mod args;
mod commands;
mod outputs;
mod run;
mod svg;

use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    causes: Vec<String>,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: ErrorBody<'a>,
}

fn report_error(kind: &str, message: String, causes: Vec<String>) {
    let body = ErrorJson { error: ErrorBody { kind, message, causes } };
    eprintln!("{}", serde_json::to_string(&body).unwrap_or_else(|_| "{\"error\":{}}".into()));
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            report_error("usage", e.kind().to_string(), vec![e.to_string().trim().to_string()]);
            return ExitCode::from(2);
        }
    };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(if cli.verbose { "info" } else { "warn" })),
        )
        .init();

    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let causes = e.chain().skip(1).map(|c| c.to_string()).collect();
            report_error("failed", e.to_string(), causes);
            ExitCode::FAILURE
        }
    }
}
