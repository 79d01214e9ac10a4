use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use xhack::audit::{build_distribution, default_bins, locate, Metric};
use xhack::persist::{self, write_json};

use super::{check_separate, resolve_feature};
use crate::args::DetectArgs;
use crate::outputs::{self, CommandManifest, Execution};
use crate::run::{DetectRun, RunConfig};

pub const TAIL_REPORT: &str = "tail_report.json";

pub fn resolve(a: DetectArgs) -> Result<DetectRun> {
    let metric: Metric = a.metric.parse()?;
    let (result, _) = persist::load(&a.result).with_context(|| format!("loading {}", a.result.display()))?;
    resolve_feature(&result.feature_names, &metric.feature)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        anyhow::bail!("alpha {} must lie in (0, 1)", a.alpha);
    }
    Ok(DetectRun {
        result: a.result,
        metric: metric.to_string(),
        reported: a.reported,
        alpha: a.alpha,
        min_accuracy: a.min_accuracy,
    })
}

pub fn execute(r: &DetectRun, run: &RunConfig, out: &Path) -> Result<()> {
    let mut exec = Execution::start(0);
    let (result, _) = persist::load(&r.result).with_context(|| format!("loading {}", r.result.display()))?;
    check_separate(&r.result, out)?;
    outputs::prepare_dir(out)?;
    let metric: Metric = r.metric.parse()?;
    let min_accuracy = r.min_accuracy.unwrap_or(result.baseline.accuracy);
    let (dist, report) = exec.time("locate", || -> Result<_> {
        let dist = build_distribution(&result, &metric, min_accuracy)?;
        let report = locate(&dist, r.reported, r.alpha)?;
        Ok((dist, report))
    })?;

    write_json(&out.join(TAIL_REPORT), &report)?;
    let file = std::fs::File::create(out.join("distribution.csv"))?;
    dist.write_csv(std::io::BufWriter::new(file))?;
    write_json(&out.join("histogram.json"), &dist.histogram(default_bins(dist.values.len()))?)?;

    let verdict = if report.flagged { "FLAGGED" } else { "not flagged" };
    println!(
        "{metric} = {} sits at percentile {:.3} of {} pipelines with accuracy ≥ {min_accuracy} (range {} to {}); \
         two-sided tail {:.3} vs α = {}: {verdict}{}",
        report.reported_value,
        report.empirical_percentile,
        report.n,
        report.min,
        report.max,
        report.two_sided_tail,
        report.alpha,
        if report.outside_range { " (outside the observed range)" } else { "" }
    );

    outputs::write_run_config(out, run)?;
    outputs::write_command_manifest(
        out,
        &CommandManifest {
            tool_version: outputs::tool_version(),
            command: run.name(),
            seed: Some(result.seed),
            inputs: BTreeMap::from([("result".to_string(), outputs::sha256_result_dir(&r.result)?)]),
            files: vec![TAIL_REPORT.into(), "distribution.csv".into(), "histogram.json".into()],
        },
    )?;
    exec.finish(out)
}
