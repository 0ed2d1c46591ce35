//! Result tables: one row per instance with per-column "mean (std)" cells,
//! rank-sum markers against a champion column and the best mean in bold.

use std::fmt::Write as _;

use nexus_opt_core::indicators::{summarize, ComparisonVerdict, Marker};
use serde::Serialize;

pub const PROBLEM_NAME: &str = "FEWN";

/// One table column: a label and its per-run indicator values.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub problem: String,
    pub objectives: usize,
    pub dimension: usize,
    pub verdict: ComparisonVerdict,
}

impl Table {
    pub fn new(
        problem: &str,
        objectives: usize,
        dimension: usize,
        columns: &[Column],
        champion: Option<usize>,
        level: f64,
    ) -> Self {
        let runs: Vec<(String, Vec<f64>)> = columns
            .iter()
            .map(|c| (c.label.clone(), c.values.clone()))
            .collect();
        Self {
            problem: problem.to_string(),
            objectives,
            dimension,
            verdict: summarize(&runs, champion, level),
        }
    }

    /// Markdown table. A tally row of "+ / - / ≈" counts follows when there is
    /// a champion and at least one other column; the champion shows "/".
    pub fn to_markdown(&self) -> String {
        let algs = &self.verdict.algorithms;
        let mut out = String::new();
        let _ = write!(out, "| Problem | M | D |");
        for a in algs {
            let _ = write!(out, " {} |", a.name);
        }
        out.push_str("\n| --- | --- | --- |");
        for _ in algs {
            out.push_str(" --- |");
        }
        let _ = write!(
            out,
            "\n| {} | {} | {} |",
            self.problem, self.objectives, self.dimension
        );
        for a in algs {
            let mut cell = if a.best {
                format!("**{}**", a.cell)
            } else {
                a.cell.clone()
            };
            if let Some(m) = a.marker {
                cell.push(' ');
                cell.push_str(m.symbol());
            }
            let _ = write!(out, " {cell} |");
        }
        out.push('\n');
        if let Some(champion) = self.verdict.champion.filter(|_| algs.len() > 1) {
            out.push_str("| + / - / ≈ | | |");
            for (i, a) in algs.iter().enumerate() {
                let tally = match a.marker {
                    Some(m) if i != champion => {
                        let count = |k: Marker| usize::from(m == k);
                        format!(
                            "{} / {} / {}",
                            count(Marker::Better),
                            count(Marker::Worse),
                            count(Marker::Similar)
                        )
                    }
                    _ => "/".to_string(),
                };
                let _ = write!(out, " {tally} |");
            }
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> Vec<SummaryRow> {
        self.verdict
            .algorithms
            .iter()
            .enumerate()
            .map(|(i, a)| SummaryRow {
                problem: self.problem.clone(),
                objectives: self.objectives,
                dimension: self.dimension,
                algorithm: a.name.clone(),
                runs: a.runs,
                mean: a.mean,
                std: a.std,
                cell: a.cell.clone(),
                marker: a.marker.map(|m| m.symbol().to_string()).unwrap_or_default(),
                champion: self.verdict.champion == Some(i),
                best: a.best,
            })
            .collect()
    }

    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.rows() {
            w.serialize(row)?;
        }
        Ok(w.into_inner()?)
    }

    pub fn to_json(&self) -> anyhow::Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(&self.rows())?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

/// Machine-readable form of one table column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub objectives: usize,
    pub dimension: usize,
    pub algorithm: String,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub cell: String,
    /// "+", "-", "≈" or empty.
    pub marker: String,
    pub champion: bool,
    pub best: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(label: &str, values: &[f64]) -> Column {
        Column {
            label: label.to_string(),
            values: values.to_vec(),
        }
    }

    #[test]
    fn markdown_layout() {
        let cols = [
            column("a", &[0.1, 0.2, 0.3, 0.2, 0.1]),
            column("b", &[0.8, 0.9, 0.85, 0.95, 0.9]),
        ];
        let t = Table::new("FEWN", 5, 567, &cols, Some(1), 0.05);
        let md = t.to_markdown();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines[0], "| Problem | M | D | a | b |");
        assert_eq!(lines[1], "| --- | --- | --- | --- | --- |");
        assert_eq!(
            lines[2],
            "| FEWN | 5 | 567 | 1.8000E-01 (8.37E-02) - | **8.8000E-01 (5.70E-02)** |"
        );
        assert_eq!(lines[3], "| + / - / ≈ | | | 0 / 1 / 0 | / |");
    }

    #[test]
    fn single_column_has_no_markers() {
        let t = Table::new("FEWN", 5, 567, &[column("a", &[0.5, 0.6, 0.7])], Some(0), 0.05);
        let md = t.to_markdown();
        assert_eq!(md.lines().count(), 3);
        assert_eq!(md.lines().nth(2).unwrap(), "| FEWN | 5 | 567 | **6.0000E-01 (1.00E-01)** |");
    }

    #[test]
    fn machine_readable_rows() {
        let cols = [column("a", &[0.5]), column("b", &[0.5])];
        let t = Table::new("FEWN", 5, 567, &cols, None, 0.05);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert!(csv.starts_with("problem,objectives,dimension,algorithm,runs,mean,std,cell,marker,champion,best\n"));
        let json: serde_json::Value = serde_json::from_slice(&t.to_json().unwrap()).unwrap();
        assert_eq!(json[0]["best"], true);
        assert_eq!(json[1]["best"], false);
        assert_eq!(json[0]["cell"], "5.0000E-01 (0.00E+00)");
    }
}
