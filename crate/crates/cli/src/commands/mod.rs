//! Command implementations.

pub mod demo;
pub mod ensemble;
pub mod gen;
pub mod importance;
pub mod train_eval;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use syncpred_core::Dataset;

/// Command-line inputs shared by every command.
pub struct Invocation<'a> {
    pub config: Option<&'a Path>,
    pub seed: Option<u64>,
    pub out: &'a Path,
    pub overrides: &'a [String],
}

/// Text embedded at the top of every output file.
pub fn provenance<C: Serialize>(command: &str, seed: u64, config: &C) -> Result<String> {
    Ok(format!(
        "syncpred {command}\nseed: {seed}\nconfig: {}",
        serde_json::to_string(config)?
    ))
}

/// Creates `dir/name`, writes the provenance as `# ` lines and returns the
/// buffered file.
pub fn create_with_header(dir: &Path, name: &str, header: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    for line in header.lines() {
        writeln!(w, "# {line}")?;
    }
    Ok(w)
}

pub fn csv_with_header(dir: &Path, name: &str, header: &str) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create_with_header(dir, name, header)?))
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    Dataset::load(dir).with_context(|| format!("loading dataset {}", dir.display()))
}

/// `r` values to sweep: the requested ones, or the stored training iteration.
pub fn resolve_r(requested: &[usize], ds: &Dataset) -> Vec<usize> {
    if requested.is_empty() {
        vec![ds.spec.training_iter]
    } else {
        requested.to_vec()
    }
}
