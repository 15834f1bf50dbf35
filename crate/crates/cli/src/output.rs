use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::args::Command;
use crate::Failure;

/// Everything a subcommand produces before anything is written.
pub struct Outcome {
    /// Primary result (JSON or CSV text).
    pub body: String,
    /// Write `body` to stdout when there is no `--out`.
    pub body_to_stdout: bool,
    /// Sibling files as `(suffix, contents)`, written only with `--out`.
    pub siblings: Vec<(&'static str, String)>,
    /// Resolved configuration echoed into the manifest.
    pub config: Value,
    pub tolerance: Option<f64>,
    pub summary: Value,
    /// Reported after all outputs are written.
    pub failure: Option<Failure>,
}

impl Outcome {
    pub fn new(body: String, config: Value, tolerance: Option<f64>, summary: Value) -> Self {
        Self {
            body,
            body_to_stdout: true,
            siblings: Vec::new(),
            config,
            tolerance,
            summary,
            failure: None,
        }
    }
}

/// Run provenance. Only `wall_seconds` changes between identical reruns.
#[derive(Serialize)]
pub struct Manifest {
    pub program: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub tolerance: Option<f64>,
    pub threads: usize,
    pub outputs: Vec<String>,
    pub summary: Value,
    pub wall_seconds: f64,
}

impl Manifest {
    pub fn new(command: &Command, outcome: &Outcome, out: Option<&Path>, wall_seconds: f64) -> Self {
        let outputs = match out {
            Some(path) => std::iter::once(path.to_path_buf())
                .chain(outcome.siblings.iter().map(|(suffix, _)| sibling(path, suffix)))
                .map(|p| p.display().to_string())
                .collect(),
            None => Vec::new(),
        };
        Self {
            program: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.name(),
            config: outcome.config.clone(),
            tolerance: outcome.tolerance,
            threads: rayon::current_num_threads(),
            outputs,
            summary: outcome.summary.clone(),
            wall_seconds,
        }
    }
}

/// `dir/stem.suffix` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::io(anyhow::Error::new(e).context(format!("writing {}", path.display()))))
}

pub fn emit(outcome: &Outcome, manifest: &Manifest, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(Failure::io)?;
    text.push('\n');
    match out {
        Some(path) => {
            write_file(path, &outcome.body)?;
            for (suffix, contents) in &outcome.siblings {
                write_file(&sibling(path, suffix), contents)?;
            }
            write_file(&sibling(path, "manifest.json"), &text)?;
        }
        None => {
            if outcome.body_to_stdout {
                std::io::stdout().write_all(outcome.body.as_bytes()).map_err(Failure::io)?;
            }
            std::io::stderr().write_all(text.as_bytes()).map_err(Failure::io)?;
        }
    }
    Ok(())
}

pub fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(Failure::io)?;
    s.push('\n');
    Ok(s)
}

pub fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(Failure::io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::io(anyhow::anyhow!("{e}")))?;
    String::from_utf8(bytes).map_err(Failure::io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_replaces_extension() {
        assert_eq!(sibling(Path::new("out/run.json"), "manifest.json"), PathBuf::from("out/run.manifest.json"));
        assert_eq!(sibling(Path::new("run"), "eigenvalues.csv"), PathBuf::from("run.eigenvalues.csv"));
    }

    #[test]
    fn csv_headers_are_snake_case() {
        #[derive(Serialize)]
        struct Row {
            bin_center: f64,
            model: Option<f64>,
        }
        let s = csv_rows([Row { bin_center: 0.5, model: None }]).unwrap();
        assert_eq!(s, "bin_center,model\n0.5,\n");
    }
}
