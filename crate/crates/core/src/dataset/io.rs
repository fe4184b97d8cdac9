use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{column_names, draw_graph, Dataset, DatasetSpec, Sample};
use crate::dynamics::PhaseConfig;
use crate::error::{Error, Result};
use crate::graph::GraphFeatures;
use crate::rng;

const FORMAT: &str = "syncpred-dataset";
const VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const ROWS_FILE: &str = "dynamics.csv";

/// Per-sample metadata stored next to the dynamics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub seed: u64,
    pub label: bool,
    pub features: GraphFeatures,
    pub quartiles: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub format: String,
    pub version: u32,
    pub spec: DatasetSpec,
    pub draws: u64,
    /// Whether the table has a header row (only when all graphs share a size).
    pub header: bool,
    pub samples: Vec<SampleRecord>,
}

impl Dataset {
    /// Writes `manifest.json` and `dynamics.csv` into `dir`. Each line of
    /// `provenance` is prefixed with `# ` at the top of the table.
    pub fn save(&self, dir: &Path, provenance: Option<&str>) -> Result<()> {
        fs::create_dir_all(dir)?;
        let sizes: Vec<usize> = self.samples.iter().map(Sample::num_nodes).collect();
        let header = sizes.windows(2).all(|w| w[0] == w[1]);
        let manifest = DatasetManifest {
            format: FORMAT.into(),
            version: VERSION,
            spec: self.spec.clone(),
            draws: self.draws,
            header,
            samples: self
                .samples
                .iter()
                .map(|s| SampleRecord {
                    seed: s.seed,
                    label: s.label,
                    features: s.features,
                    quartiles: s.quartiles,
                })
                .collect(),
        };
        serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join(MANIFEST_FILE))?), &manifest)?;

        let mut out = BufWriter::new(File::create(dir.join(ROWS_FILE))?);
        if let Some(p) = provenance {
            for line in p.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        let with_features = self.spec.include_graph_features;
        let r = self.spec.training_iter;
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        if let (true, Some(&n)) = (header, sizes.first()) {
            w.write_record(column_names(n, r, with_features))?;
        }
        for s in &self.samples {
            let row = s.vectorize(r, with_features)?;
            w.write_record(row.iter().map(f64::to_string))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a dataset written by [`Dataset::save`]. Graphs are regenerated
    /// from their draw seeds and checked against the stored features.
    pub fn load(dir: &Path) -> Result<Dataset> {
        let manifest: DatasetManifest = serde_json::from_reader(File::open(dir.join(MANIFEST_FILE))?)?;
        if manifest.format != FORMAT || manifest.version != VERSION {
            return Err(Error::Parse(format!(
                "unsupported dataset format {} v{}",
                manifest.format, manifest.version
            )));
        }
        let spec = manifest.spec;
        spec.validate()?;
        let r = spec.training_iter;
        let space = spec.model.space();
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .comment(Some(b'#'))
            .has_headers(manifest.header)
            .from_path(dir.join(ROWS_FILE))?;
        let mut samples = Vec::with_capacity(manifest.samples.len());
        let mut rows = reader.records();
        for (i, rec) in manifest.samples.into_iter().enumerate() {
            let row = rows
                .next()
                .ok_or_else(|| Error::Parse(format!("table ends before sample {i}")))??;
            let values = row
                .iter()
                .map(|v| v.parse::<f64>().map_err(|e| Error::Parse(format!("sample {i}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let graph = draw_graph(&spec, rec.label, &mut rng::from_seed(rec.seed))?;
            let features = graph.features()?;
            if features != rec.features {
                return Err(Error::Parse(format!("sample {i}: regenerated graph does not match its features")));
            }
            let n = graph.n();
            let extra = 3 + if spec.include_graph_features { 5 } else { 0 };
            if values.len() != (r + 1) * n + extra {
                return Err(Error::SizeMismatch {
                    expected: (r + 1) * n + extra,
                    actual: values.len(),
                });
            }
            let trajectory = values[..(r + 1) * n]
                .chunks(n.max(1))
                .map(|c| PhaseConfig::from_values(space, c))
                .collect::<Result<Vec<_>>>()?;
            samples.push(Sample {
                seed: rec.seed,
                graph,
                features,
                trajectory,
                quartiles: rec.quartiles,
                label: rec.label,
            });
        }
        if rows.next().is_some() {
            return Err(Error::Parse("table has more rows than the manifest".into()));
        }
        Ok(Dataset {
            spec,
            samples,
            draws: manifest.draws,
        })
    }
}
