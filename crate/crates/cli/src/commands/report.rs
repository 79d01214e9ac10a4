use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use xhack::audit::{build_distribution, default_bins, Metric};
use xhack::persist::{self, relative_change_rows, write_json};
use xhack::search::{aggregate_range, pareto_points, Aggregate, SearchResult, Sense};
use xhack::summary::{slope_sign, DEFAULT_SIGN_BAND};

use super::{check_separate, resolve_feature};
use crate::args::{ReportArgs, ReportKind};
use crate::outputs::{self, CommandManifest, Execution};
use crate::run::{ReportRun, RunConfig};
use crate::svg::{bounds, Plot, BASELINE, CANDIDATE, HIGHLIGHT};

pub fn resolve(a: ReportArgs) -> Result<ReportRun> {
    let (result, _) = persist::load(&a.result).with_context(|| format!("loading {}", a.result.display()))?;
    let feature = a.feature.as_deref().map(|f| resolve_feature(&result.feature_names, f)).transpose()?;
    let needs_feature = matches!(a.kind, ReportKind::Slopes | ReportKind::Pareto)
        || (a.kind == ReportKind::Histogram && a.metric.is_none());
    if needs_feature && feature.is_none() {
        bail!("report kind {:?} needs --feature", a.kind);
    }
    if let Some(m) = &a.metric {
        m.parse::<Metric>()?;
    }
    Ok(ReportRun {
        result: a.result,
        kind: a.kind,
        feature,
        metric: a.metric,
        min_accuracy: a.min_accuracy,
        bins: a.bins,
        svg: a.svg,
    })
}

pub fn execute(r: &ReportRun, run: &RunConfig, out: &Path) -> Result<()> {
    let mut exec = Execution::start(0);
    let (result, _) = persist::load(&r.result).with_context(|| format!("loading {}", r.result.display()))?;
    check_separate(&r.result, out)?;
    outputs::prepare_dir(out)?;
    let files = exec.time("report", || match r.kind {
        ReportKind::ImportanceChange => importance_change(&result, r, out),
        ReportKind::Slopes => slopes(&result, r, out),
        ReportKind::Pareto => pareto(&result, r, out),
        ReportKind::Histogram => histogram(&result, r, out),
    })?;
    for f in &files {
        println!("wrote {}", out.join(f).display());
    }
    outputs::write_run_config(out, run)?;
    outputs::write_command_manifest(
        out,
        &CommandManifest {
            tool_version: outputs::tool_version(),
            command: run.name(),
            seed: Some(result.seed),
            inputs: BTreeMap::from([("result".to_string(), outputs::sha256_result_dir(&r.result)?)]),
            files,
        },
    )?;
    exec.finish(out)
}

fn write_svg(out: &Path, name: &str, plot: &Plot, files: &mut Vec<String>) -> Result<()> {
    fs::write(out.join(name), plot.render()).with_context(|| format!("writing {name}"))?;
    files.push(name.into());
    Ok(())
}

fn importance_change(result: &SearchResult, r: &ReportRun, out: &Path) -> Result<Vec<String>> {
    if result.baseline.degenerate {
        bail!("the baseline's explanation is all zeros, so relative change is undefined");
    }
    let rows = relative_change_rows(result);
    let name = "importance_change.csv";
    let mut header = vec!["config_id"];
    header.extend(result.feature_names.iter().map(String::as_str));
    outputs::write_csv(
        &out.join(name),
        &header,
        rows.iter().map(|(id, v)| std::iter::once(id.to_string()).chain(v.iter().map(|x| x.to_string())).collect()),
    )?;
    let mut files = vec![name.to_string()];
    if r.svg {
        let y = bounds(rows.iter().flat_map(|(_, v)| v.iter().copied()).chain([0.0]));
        let mut plot = Plot::new("Change in importance share vs baseline", "feature", "relative change", (0.0, 1.0), y)
            .with_x_categories(result.feature_names.clone());
        plot.hline(0.0, BASELINE);
        let n = rows.len().max(1) as f64;
        for (k, (_, v)) in rows.iter().enumerate() {
            // Spread points sideways by their order so overlaps stay visible.
            let jitter = (k as f64 / n - 0.5) * 0.5;
            for (j, x) in v.iter().enumerate() {
                plot.point(j as f64 + jitter, *x, 3.0, CANDIDATE);
            }
        }
        write_svg(out, "importance_change.svg", &plot, &mut files)?;
    }
    Ok(files)
}

fn slopes(result: &SearchResult, r: &ReportRun, out: &Path) -> Result<Vec<String>> {
    let j = r.feature.expect("checked in resolve");
    let name = "slopes.csv";
    let lines: Vec<(u64, bool, _)> = result
        .all()
        .enumerate()
        .filter_map(|(k, e)| {
            let s = if e.degenerate { None } else { e.slopes.features[j].clone() };
            s.map(|s| (e.id(), k == 0, (s, e.accuracy, e.config.family.name())))
        })
        .collect();
    outputs::write_csv(
        &out.join(name),
        &["config_id", "role", "family", "accuracy", "slope", "intercept", "x_min", "x_max"],
        lines.iter().map(|(id, base, (s, acc, fam))| {
            vec![
                id.to_string(),
                if *base { "baseline" } else { "candidate" }.to_string(),
                fam.to_string(),
                acc.to_string(),
                s.slope.to_string(),
                s.intercept.to_string(),
                s.x_min.to_string(),
                s.x_max.to_string(),
            ]
        }),
    )?;
    let mut files = vec![name.to_string()];
    if r.svg {
        let xs = bounds(lines.iter().flat_map(|(_, _, (s, _, _))| [s.x_min, s.x_max]));
        let ys = bounds(lines.iter().flat_map(|(_, _, (s, _, _))| {
            [s.intercept + s.slope * s.x_min, s.intercept + s.slope * s.x_max]
        }));
        let feature = &result.feature_names[j];
        let mut plot = Plot::new(&format!("SHAP dependence lines for {feature}"), feature, "SHAP value", xs, ys);
        // Baseline last so it sits on top.
        for (_, base, (s, _, _)) in lines.iter().filter(|l| !l.1).chain(lines.iter().filter(|l| l.1)) {
            let (color, width) = if *base { (BASELINE, 3.0) } else { (CANDIDATE, 1.0) };
            plot.line(
                (s.x_min, s.intercept + s.slope * s.x_min),
                (s.x_max, s.intercept + s.slope * s.x_max),
                color,
                width,
            );
        }
        write_svg(out, "slopes.svg", &plot, &mut files)?;
    }
    Ok(files)
}

#[derive(Serialize)]
struct ParetoSummary {
    feature: String,
    aggregate: Aggregate,
    sense: Sense,
    min_accuracy: f64,
    /// Spread of the aggregate over every pipeline at or above `min_accuracy`.
    range: Option<f64>,
    /// The same over front members only.
    front_range: Option<f64>,
    front_ids: Vec<u64>,
}

fn pareto(result: &SearchResult, r: &ReportRun, out: &Path) -> Result<Vec<String>> {
    let j = r.feature.expect("checked in resolve");
    let aggregate = match &result.directed {
        Some(d) if d.target_feature == j => d.signed_aggregate,
        _ => Aggregate::Slope,
    };
    let sense = match &result.directed {
        Some(d) if d.target_feature == j => Sense::against(d.baseline_sign),
        _ => Sense::against(result.baseline.aggregate(j, aggregate).map_or(0, |x| slope_sign(x, DEFAULT_SIGN_BAND))),
    };
    let points = pareto_points(result.all(), j, aggregate, sense);
    let min_accuracy = r.min_accuracy.unwrap_or(result.baseline.accuracy);
    let front: Vec<_> = points.iter().filter(|p| p.rank == 0).cloned().collect();
    let summary = ParetoSummary {
        feature: result.feature_names[j].clone(),
        aggregate,
        sense,
        min_accuracy,
        range: aggregate_range(&points, min_accuracy),
        front_range: aggregate_range(&front, min_accuracy),
        front_ids: front.iter().map(|p| p.config_id).collect(),
    };
    let base_id = result.baseline.id();
    outputs::write_csv(
        &out.join("pareto.csv"),
        &["config_id", "role", "accuracy", "aggregate", "rank", "front"],
        points.iter().map(|p| {
            vec![
                p.config_id.to_string(),
                if p.config_id == base_id { "baseline" } else { "candidate" }.to_string(),
                p.accuracy.to_string(),
                p.aggregate.to_string(),
                p.rank.to_string(),
                (p.rank == 0).to_string(),
            ]
        }),
    )?;
    write_json(&out.join("pareto.json"), &summary)?;
    let mut files = vec!["pareto.csv".to_string(), "pareto.json".to_string()];
    if r.svg {
        let xs = bounds(points.iter().map(|p| p.accuracy));
        let ys = bounds(points.iter().map(|p| p.aggregate));
        let mut plot = Plot::new(
            &format!("Accuracy vs {} aggregate", summary.feature),
            "accuracy",
            &format!("{aggregate:?} of {}", summary.feature),
            xs,
            ys,
        );
        plot.hline(0.0, "#999999");
        for p in &points {
            let color = if p.config_id == base_id {
                BASELINE
            } else if p.rank == 0 {
                HIGHLIGHT
            } else {
                CANDIDATE
            };
            plot.point(p.accuracy, p.aggregate, if p.rank == 0 { 5.0 } else { 3.0 }, color);
        }
        let mut front_sorted = front.clone();
        front_sorted.sort_by(|a, b| a.accuracy.total_cmp(&b.accuracy));
        for w in front_sorted.windows(2) {
            plot.line((w[0].accuracy, w[0].aggregate), (w[1].accuracy, w[1].aggregate), HIGHLIGHT, 1.5);
        }
        write_svg(out, "pareto.svg", &plot, &mut files)?;
    }
    Ok(files)
}

fn histogram(result: &SearchResult, r: &ReportRun, out: &Path) -> Result<Vec<String>> {
    let metric: Metric = match (&r.metric, r.feature) {
        (Some(m), _) => m.parse()?,
        (None, Some(j)) => format!("slope:{}", result.feature_names[j]).parse()?,
        (None, None) => bail!("histogram needs --metric or --feature"),
    };
    let min_accuracy = r.min_accuracy.unwrap_or(result.baseline.accuracy);
    let dist = build_distribution(result, &metric, min_accuracy)?;
    let hist = dist.histogram(r.bins.unwrap_or_else(|| default_bins(dist.values.len())))?;
    let path = out.join("distribution.csv");
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    dist.write_csv(std::io::BufWriter::new(file))?;
    write_json(&out.join("histogram.json"), &hist)?;
    let mut files = vec!["distribution.csv".to_string(), "histogram.json".to_string()];
    if r.svg {
        let xs = (hist.edges[0], *hist.edges.last().expect("at least one bin"));
        let xs = if xs.0 == xs.1 { bounds([xs.0]) } else { xs };
        let top = hist.counts.iter().copied().max().unwrap_or(1) as f64;
        let mut plot = Plot::new(
            &format!("{metric} over {} pipelines (accuracy ≥ {min_accuracy})", dist.values.len()),
            &metric.to_string(),
            "pipelines",
            xs,
            (0.0, top * 1.1),
        );
        for (k, &c) in hist.counts.iter().enumerate() {
            let (lo, hi) = (hist.edges[k], hist.edges[k + 1]);
            let (lo, hi) = if lo == hi { xs } else { (lo, hi) };
            plot.bar(lo, hi, c as f64, CANDIDATE);
        }
        let column = resolve_feature(&result.feature_names, &metric.feature)?;
        if let Some(b) = metric.value(&result.baseline, column) {
            plot.vline(b, BASELINE, "baseline");
        }
        write_svg(out, "histogram.svg", &plot, &mut files)?;
    }
    Ok(files)
}
