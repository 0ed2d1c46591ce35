//! On-disk formats: CSV fronts (`f1..fM`), CSV traces
//! (`generation,evaluations,hv`) and the JSON experiment manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use nexus_opt_core::indicators::ReferenceBox;
use nexus_opt_core::solvers::TracePoint;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, HvChoice};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.md";

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let name = path
        .file_name()
        .with_context(|| format!("{} has no file name", path.display()))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn numbered_header(prefix: char, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

fn csv_bytes(header: &[String], rows: &[Vec<f64>]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        ensure!(
            row.len() == header.len(),
            "row of length {} under a header of {} columns",
            row.len(),
            header.len()
        );
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    Ok(w.into_inner()?)
}

/// Objective vectors under the header `f1..fM`. An empty front still needs
/// `num_objectives` for its header.
pub fn front_csv(rows: &[Vec<f64>], num_objectives: usize) -> anyhow::Result<Vec<u8>> {
    csv_bytes(&numbered_header('f', num_objectives), rows)
}

/// Objectives followed by decisions, header `f1..fM,x1..xD`.
pub fn front_with_decisions_csv(
    objectives: &[Vec<f64>],
    decisions: &[Vec<f64>],
    num_objectives: usize,
    dim: usize,
) -> anyhow::Result<Vec<u8>> {
    ensure!(objectives.len() == decisions.len(), "objective and decision row counts differ");
    let mut header = numbered_header('f', num_objectives);
    header.extend(numbered_header('x', dim));
    let rows: Vec<Vec<f64>> = objectives
        .iter()
        .zip(decisions)
        .map(|(f, x)| f.iter().chain(x).copied().collect())
        .collect();
    csv_bytes(&header, &rows)
}

pub fn decisions_csv(rows: &[Vec<f64>], dim: usize) -> anyhow::Result<Vec<u8>> {
    csv_bytes(&numbered_header('x', dim), rows)
}

/// Reads a numeric CSV whose header is `<prefix>1..<prefix>K`; returns K and
/// the rows.
pub fn read_matrix(path: &Path, prefix: char) -> anyhow::Result<(usize, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.clone();
    let expected = numbered_header(prefix, header.len());
    if header.iter().ne(expected.iter().map(String::as_str)) {
        bail!("{}: unexpected header {:?}", path.display(), header);
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("{}: bad number on data row {}", path.display(), line + 1))?;
        rows.push(row);
    }
    Ok((header.len(), rows))
}

pub fn read_front(path: &Path) -> anyhow::Result<(usize, Vec<Vec<f64>>)> {
    read_matrix(path, 'f')
}

pub fn trace_csv(trace: &[TracePoint]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["generation", "evaluations", "hv"])?;
    for t in trace {
        w.write_record([
            t.generation.to_string(),
            t.evaluations.to_string(),
            t.hv.to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub fn read_trace(path: &Path) -> anyhow::Result<Vec<TracePoint>> {
    #[derive(Deserialize)]
    struct Row {
        generation: usize,
        evaluations: usize,
        hv: f64,
    }
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize::<Row>()
        .map(|row| {
            let row = row?;
            Ok(TracePoint {
                generation: row.generation,
                evaluations: row.evaluations,
                hv: row.hv,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub lower: Vec<f64>,
    pub reference: Vec<f64>,
}

impl From<&ReferenceBox> for BoxRecord {
    fn from(b: &ReferenceBox) -> Self {
        Self {
            lower: b.lower.clone(),
            reference: b.reference.clone(),
        }
    }
}

impl BoxRecord {
    pub fn to_box(&self) -> anyhow::Result<ReferenceBox> {
        Ok(ReferenceBox::new(self.lower.clone(), self.reference.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvRecord {
    pub method: HvChoice,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub variant: String,
    pub run: usize,
    pub seed: u64,
    pub evaluations: usize,
    pub front_size: usize,
    /// Normalized hypervolume of the final front in the experiment box.
    pub hv: f64,
    /// Paths relative to the manifest's directory.
    pub front_file: PathBuf,
    pub trace_file: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decisions_file: Option<PathBuf>,
    /// Box behind the trace column of `trace_file`.
    pub trace_box: BoxRecord,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub problem: String,
    pub objectives: usize,
    pub dimension: usize,
    pub config: ExperimentConfig,
    /// Box every run's `hv` is normalized by.
    pub reference_box: BoxRecord,
    pub hv: HvRecord,
    pub runs: Vec<RunRecord>,
}

impl Manifest {
    pub fn load_dir(dir: &Path) -> anyhow::Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn write_dir(&self, dir: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())
    }

    /// Variant names in first-appearance order.
    pub fn variants(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.runs {
            if !names.contains(&r.variant) {
                names.push(r.variant.clone());
            }
        }
        names
    }

    pub fn find_run(&self, variant: &str, run: usize) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.variant == variant && r.run == run)
    }
}
