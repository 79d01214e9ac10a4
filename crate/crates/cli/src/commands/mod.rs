mod detect;
mod report;
mod search;
mod simulate;

use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::args::{Cli, Command};
use crate::run::RunConfig;

pub fn dispatch(cli: Cli) -> Result<()> {
    let (run, out, workers) = match cli.command {
        Command::Simulate(a) => {
            let out = a.out.clone();
            (RunConfig::Simulate(simulate::resolve(a)?), out, 0)
        }
        Command::Search(a) => {
            let (out, workers) = (a.out.clone(), a.workers);
            (RunConfig::Search(search::resolve(a)?), out, workers)
        }
        Command::Report(a) => {
            let out = a.out.clone();
            (RunConfig::Report(report::resolve(a)?), out, 0)
        }
        Command::Detect(a) => {
            let out = a.out.clone();
            (RunConfig::Detect(detect::resolve(a)?), out, 0)
        }
        Command::Replay(a) => {
            let text = std::fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
            let run: RunConfig =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", a.config.display()))?;
            (run, a.out, a.workers)
        }
    };
    execute(&run, &out, workers)
}

pub fn execute(run: &RunConfig, out: &Path, workers: usize) -> Result<()> {
    tracing::info!(command = run.name(), out = %out.display(), "running");
    match run {
        RunConfig::Simulate(r) => simulate::execute(r, run, out),
        RunConfig::Search(r) => search::execute(r, run, out, workers),
        RunConfig::Report(r) => report::execute(r, run, out),
        RunConfig::Detect(r) => detect::execute(r, run, out),
    }
}

/// Column index from a name or a plain index.
pub fn resolve_feature(names: &[String], feature: &str) -> Result<usize> {
    if let Some(j) = names.iter().position(|n| n == feature) {
        return Ok(j);
    }
    match feature.parse::<usize>() {
        Ok(j) if j < names.len() => Ok(j),
        _ => bail!("unknown feature `{feature}`; columns are {}", names.join(", ")),
    }
}

/// Report and detect must not write into the result directory they read.
fn check_separate(result: &Path, out: &Path) -> Result<()> {
    if let (Ok(a), Ok(b)) = (result.canonicalize(), out.canonicalize()) {
        if a == b {
            bail!("--out must differ from the result directory {}", result.display());
        }
    }
    Ok(())
}
