use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use xhack::persist::{read_json, write_json};
use xhack::tabular::{simulate_collinear, F1Source, SimulationSpec};

use crate::args::SimulateArgs;
use crate::outputs::{self, CommandManifest, Execution};
use crate::run::{RunConfig, SimulateRun};

pub const DATA_CSV: &str = "data.csv";
pub const SCHEMA_JSON: &str = "schema.json";

pub fn resolve(a: SimulateArgs) -> Result<SimulateRun> {
    let mut spec = match &a.spec {
        Some(path) => read_json::<SimulationSpec>(path)?,
        None => SimulationSpec::new(1000, 0.0, 0.0, xhack::DEFAULT_SEED),
    };
    if let Some(n) = a.n_rows {
        spec.n_rows = n;
    }
    if let Some(s) = a.sigma {
        spec.sigma1 = s;
        spec.sigma2 = s;
    }
    if let Some(s) = a.sigma1 {
        spec.sigma1 = s;
    }
    if let Some(s) = a.sigma2 {
        spec.sigma2 = s;
    }
    if a.independent_f1 {
        spec.f1_source = F1Source::Independent;
    }
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    spec.validate()?;
    Ok(SimulateRun { spec })
}

pub fn execute(r: &SimulateRun, run: &RunConfig, out: &Path) -> Result<()> {
    let mut exec = Execution::start(0);
    outputs::prepare_dir(out)?;
    let ds = exec.time("simulate", || simulate_collinear(&r.spec))?;
    let schema = r.spec.schema();

    let path = out.join(DATA_CSV);
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = ds.column_names().to_vec();
    header.push(schema.target_name.clone());
    w.write_record(&header)?;
    for i in 0..ds.n_rows() {
        let mut rec: Vec<String> = ds.row(i).iter().map(|v| v.to_string()).collect();
        rec.push(ds.target()[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    write_json(&out.join(SCHEMA_JSON), &schema)?;

    outputs::write_run_config(out, run)?;
    outputs::write_command_manifest(
        out,
        &CommandManifest {
            tool_version: outputs::tool_version(),
            command: run.name(),
            seed: Some(r.spec.seed),
            inputs: BTreeMap::from([("spec".to_string(), outputs::sha256_json(&r.spec)?)]),
            files: vec![DATA_CSV.into(), SCHEMA_JSON.into()],
        },
    )?;
    println!("wrote {} rows to {}", ds.n_rows(), path.display());
    exec.finish(out)
}
