//! Command-line front end: merges configuration, runs the computations,
//! writes hashed artifacts and reports a JSON summary.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod manifest;
pub mod scan;

use std::path::Path;

use serde_json::{json, Map, Value};

use commands::{Artifact, Body};
use config::{Formats, RunConfig};
use error::CliError;
use manifest::{Manifest, MANIFEST_FILE};

fn selected(body: &Body, f: Formats) -> bool {
    match body {
        Body::Json(_) => f.json,
        Body::Csv(_) => f.csv,
        Body::Svg(..) => f.svg,
    }
}

/// Runs every computation the configuration asks for.
pub fn compute(run: &RunConfig) -> Result<(Vec<Artifact>, Value), CliError> {
    let mut artifacts = Vec::new();
    let mut results = Map::new();
    let all = run.command == "all";
    if let Some(p) = &run.profile {
        let o = commands::profile(p)?;
        artifacts.extend(o.artifacts);
        results.insert("profile".into(), o.summary);
    }
    if let Some(s) = &run.spectrum {
        let o = commands::spectrum(s)?;
        artifacts.extend(o.artifacts);
        results.insert("spectrum".into(), o.summary);
    }
    if let Some(r) = &run.reduced {
        let o = commands::reduced(r)?;
        artifacts.extend(o.artifacts);
        results.insert("reduced".into(), o.summary);
    }
    if let Some(e) = &run.evolve {
        let (growth, study) = if all { (true, true) } else { (!e.dt_study, e.dt_study) };
        let o = commands::evolve(e, growth, study)?;
        artifacts.extend(o.artifacts);
        results.insert("evolve".into(), o.summary);
    }
    artifacts.retain(|a| selected(&a.body, run.output.formats));
    Ok((artifacts, Value::Object(results)))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Computes, writes the artifacts and the manifest, and returns the stdout
/// summary.
pub fn execute(run: &RunConfig) -> Result<Value, CliError> {
    let (artifacts, results) = compute(run)?;
    let files: Vec<String> = artifacts.iter().map(|a| a.name.to_string()).collect();
    let manifest = Manifest::new(run, files.clone()).render();
    let hash = manifest::sha256_hex(manifest.as_bytes());

    let dir = &run.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    for a in &artifacts {
        let text = match &a.body {
            Body::Json(v) => format::render_json(v.clone(), &hash),
            Body::Csv(t) => format::render_csv(t, &hash),
            Body::Svg(points, title) => format::render_svg(points, title, &hash),
        };
        write(dir, a.name, &text)?;
    }
    write(dir, MANIFEST_FILE, &manifest)?;

    let mut all_files = files;
    all_files.push(MANIFEST_FILE.into());
    all_files.sort();
    Ok(json!({
        "command": run.command,
        "manifest_sha256": hash,
        "out_dir": dir.display().to_string(),
        "files": all_files,
        "results": results,
    }))
}

/// Parses nothing itself; returns the process exit code after printing the
/// summary to stdout or the error to stderr.
pub fn main_with(cli: &config::Cli) -> i32 {
    match config::resolve(cli).and_then(|run| execute(&run)) {
        Ok(summary) => {
            println!("{}", serde_json::to_string(&summary).expect("serializable"));
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
