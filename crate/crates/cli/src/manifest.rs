use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Parser;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::failure::usage;
use crate::output::{Report, Status};
use crate::{Cli, Command};

/// A batch of subcommand runs, each written to its own file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub jobs: Vec<Job>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    /// Subcommand name, e.g. `return-prob`.
    pub command: String,
    /// Flags without the leading dashes; `true` stands for a bare flag.
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    /// Relative paths resolve against the manifest's directory.
    pub output: PathBuf,
    #[serde(default)]
    pub json: bool,
}

impl Job {
    fn argv(&self) -> anyhow::Result<Vec<String>> {
        let mut argv = vec!["swalk".to_string()];
        if self.json {
            argv.push("--json".into());
        }
        argv.push(self.command.clone());
        for (key, value) in &self.params {
            if key == "seed" {
                return Err(usage("give the seed as the job's 'seed' field"));
            }
            match value {
                Value::Bool(true) => argv.push(format!("--{key}")),
                Value::Bool(false) => {}
                Value::String(s) => argv.extend([format!("--{key}"), s.clone()]),
                Value::Number(n) => argv.extend([format!("--{key}"), n.to_string()]),
                other => {
                    return Err(usage(format!(
                        "parameter '{key}' has unsupported value {other}"
                    )))
                }
            }
        }
        match (self.command.as_str(), self.seed) {
            ("return-prob", Some(seed)) => argv.extend(["--seed".into(), seed.to_string()]),
            ("return-prob", None) if self.params.get("mc") == Some(&Value::Bool(true)) => {
                return Err(usage("Monte Carlo jobs need an explicit seed"));
            }
            _ => {}
        }
        Ok(argv)
    }
}

pub fn run(path: &Path) -> anyhow::Result<Report> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut status = Status::Ok;
    let mut lines = Vec::new();
    let mut written = Vec::new();
    for (index, job) in manifest.jobs.iter().enumerate() {
        let cli = Cli::try_parse_from(job.argv()?)
            .with_context(|| format!("job {index} ({})", job.command))?;
        if matches!(cli.command, Command::Manifest(_)) {
            return Err(usage("manifests cannot nest"));
        }
        let report =
            crate::run(cli.command).with_context(|| format!("job {index} ({})", job.command))?;
        let output = base.join(&job.output);
        fs::write(&output, report.render(cli.json))
            .with_context(|| format!("writing {}", output.display()))?;
        status = status.max(report.status);
        lines.push(format!("{} -> {}", job.command, job.output.display()));
        written.push(json!({"command": job.command, "output": job.output}));
    }
    Ok(Report::new("manifest", lines.join("\n"), json!({"jobs": written})).with_status(status))
}
