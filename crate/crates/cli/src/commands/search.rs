use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use xhack::persist::{self, read_json, write_json, Provenance};
use xhack::search::{
    cherry_pick, directed_search, search, Aggregate, Condition, DirectedParams, SearchMode, SearchResult, SearchSpace,
};
use xhack::shapley::ExplainerConfig;
use xhack::tabular::{draw_explain_sample, load_csv, split, FeatureSchema};

use super::resolve_feature;
use crate::args::{AggregateArg, ExplainerArg, ModeArg, SearchArgs};
use crate::outputs::{self, Execution};
use crate::run::{CherryRun, RunConfig, SearchRun};

pub const CHERRY_CSV: &str = "cherry_pick.csv";
pub const CHERRY_JSON: &str = "cherry_pick.json";

fn column_names(schema_path: &Path, data: &Path) -> Result<Vec<String>> {
    let schema = FeatureSchema::from_json_file(schema_path)?;
    Ok(load_csv(data, &schema)?.column_names().to_vec())
}

pub fn resolve(a: SearchArgs) -> Result<SearchRun> {
    let schema = match a.schema {
        Some(p) => p,
        None => a.data.parent().unwrap_or(Path::new(".")).join("schema.json"),
    };
    let names = column_names(&schema, &a.data).with_context(|| format!("loading {}", a.data.display()))?;

    let mut space = match &a.space {
        Some(p) => read_json::<SearchSpace>(p)?,
        None => SearchSpace::defensible(50),
    };
    if let Some(b) = a.budget {
        space.budget = b;
    }
    space.validate()?;

    let explainer = match a.explainer {
        ExplainerArg::Exact => ExplainerConfig { seed: a.seed, ..ExplainerConfig::exact() },
        ExplainerArg::Sampled => ExplainerConfig::sampled(a.coalitions, a.seed),
    };
    explainer.validate(names.len())?;

    let feature = a.feature.as_deref().map(|f| resolve_feature(&names, f)).transpose()?;
    let (mode, directed, cherry) = match a.mode {
        ModeArg::Cherry => {
            let features = match feature {
                Some(j) => vec![j],
                None => (0..names.len()).collect(),
            };
            (SearchMode::Cherry, None, Some(CherryRun { features, top_k: a.top_k }))
        }
        ModeArg::Directed => {
            let mut p = match (&a.params, feature) {
                (Some(path), _) => read_json::<DirectedParams>(path)?,
                (None, Some(j)) => DirectedParams::new(j),
                (None, None) => bail!("directed mode needs --feature or --params"),
            };
            if let Some(j) = feature {
                p.target_feature = j;
            }
            if p.target_feature >= names.len() {
                bail!("target feature {} out of range for {} columns", p.target_feature, names.len());
            }
            if let Some(l) = a.lambda {
                p.lambda = Some(l);
            }
            if let Some(m) = a.mu {
                p.mu = m;
            }
            if let Some(agg) = a.aggregate {
                p.signed_aggregate = match agg {
                    AggregateArg::Slope => Aggregate::Slope,
                    AggregateArg::MeanSignedShap => Aggregate::MeanSignedShap,
                };
            }
            (SearchMode::Directed, Some(p), None)
        }
    };
    Ok(SearchRun {
        data: a.data,
        schema,
        seed: a.seed,
        test_fraction: a.test_fraction,
        background: a.background,
        eval_rows: a.eval_rows,
        explainer,
        space,
        mode,
        directed,
        cherry,
    })
}

#[derive(Serialize)]
struct CherryRow {
    feature: String,
    condition: String,
    superior: usize,
    picked: usize,
    proportion: Option<f64>,
    picked_ids: Vec<u64>,
}

fn cherry_rows(result: &SearchResult, c: &CherryRun) -> Vec<CherryRow> {
    let mut rows = Vec::new();
    for &j in &c.features {
        let conditions = [
            (format!("topple-top-{}", c.top_k), Condition::Topple { feature: j, k: c.top_k }),
            ("flip-slope".to_string(), Condition::Flip { feature: j, aggregate: Aggregate::Slope }),
        ];
        for (name, cond) in conditions {
            let pick = cherry_pick(result, |e| cond.holds(&result.baseline, e));
            rows.push(CherryRow {
                feature: result.feature_names[j].clone(),
                condition: name,
                superior: pick.superior,
                picked: pick.picked.len(),
                proportion: pick.proportion,
                picked_ids: pick.picked.iter().map(|e| e.id()).collect(),
            });
        }
    }
    rows
}

pub fn execute(r: &SearchRun, run: &RunConfig, out: &Path, workers: usize) -> Result<()> {
    let mut exec = Execution::start(workers);
    let (split_data, sample) = exec.time("load", || -> Result<_> {
        let schema = FeatureSchema::from_json_file(&r.schema)?;
        let data = load_csv(&r.data, &schema).with_context(|| format!("loading {}", r.data.display()))?;
        let s = split(&data, r.test_fraction, r.seed)?;
        let e = draw_explain_sample(&s, r.background, r.eval_rows, r.seed)?;
        Ok((s, e))
    })?;
    let result = exec.time("search", || match (&r.mode, &r.directed) {
        (SearchMode::Directed, Some(p)) => {
            Ok(directed_search(&r.space, &split_data, &sample, p, &r.explainer, r.seed, workers)?)
        }
        (SearchMode::Directed, None) => bail!("directed run without parameters"),
        _ => Ok(search(&r.space, &split_data, &sample, &r.explainer, r.seed, workers)?),
    })?;

    outputs::prepare_dir(out)?;
    let provenance = Provenance {
        tool_version: outputs::tool_version(),
        inputs: [("data", &r.data), ("schema", &r.schema)]
            .into_iter()
            .map(|(k, p)| Ok((k.to_string(), outputs::sha256_file(p)?)))
            .collect::<Result<_>>()?,
    };
    exec.time("write", || persist::save(&result, out, &provenance))?;

    if let Some(c) = &r.cherry {
        let rows = cherry_rows(&result, c);
        write_json(&out.join(CHERRY_JSON), &rows)?;
        outputs::write_csv(
            &out.join(CHERRY_CSV),
            &["feature", "condition", "superior", "picked", "proportion", "picked_ids"],
            rows.iter().map(|row| {
                vec![
                    row.feature.clone(),
                    row.condition.clone(),
                    row.superior.to_string(),
                    row.picked.to_string(),
                    outputs::opt(row.proportion),
                    row.picked_ids.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
                ]
            }),
        )?;
        for row in &rows {
            let share = row.proportion.map_or("n/a".to_string(), |p| format!("{:.1}%", 100.0 * p));
            println!("{:>10} {:<16} {}/{} superior candidates ({share})", row.feature, row.condition, row.picked, row.superior);
        }
    }
    if let Some(d) = &result.directed {
        println!(
            "target {} baseline sign {:+} λ = {} μ = {}",
            result.feature_names[d.target_feature], d.baseline_sign, d.lambda, d.mu
        );
        for c in result.candidates.iter().take(5) {
            println!(
                "  #{:<4} Q = {:<22} accuracy {:.4} {} / {}",
                c.id(),
                c.q_score.map_or("undefined".to_string(), |q| q.to_string()),
                c.accuracy,
                c.config.family,
                c.config.preprocess.name()
            );
        }
    }
    println!(
        "baseline accuracy {:.4}; {} candidates, {} failed; results in {}",
        result.baseline.accuracy,
        result.candidates.len(),
        result.failures.len(),
        out.display()
    );
    outputs::write_run_config(out, run)?;
    exec.finish(out)
}
