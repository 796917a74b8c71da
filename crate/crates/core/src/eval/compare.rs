use std::fmt::Write as _;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{Learner, ModelSpec};

use super::cv::{cross_validate, CvOptions, CvReport};

/// Published 10-fold accuracies (%) on Statlog and Cleveland, shown next to a
/// run's own numbers.
pub const REFERENCE_ACCURACY: [(&str, [f64; 2]); 3] = [
    ("dv-logistic", [85.58, 85.73]),
    ("pso-elm", [91.99, 93.38]),
    ("cnn", [97.25, 98.42]),
];

pub fn reference_accuracy(model: &str, dataset: &str) -> Option<f64> {
    let column = match dataset.to_ascii_lowercase().as_str() {
        d if d.contains("statlog") => 0,
        d if d.contains("cleveland") => 1,
        _ => return None,
    };
    REFERENCE_ACCURACY
        .iter()
        .find(|(m, _)| *m == model)
        .map(|(_, v)| v[column])
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Done(CvReport),
    Failed(String),
}

impl Cell {
    pub fn mean(&self) -> Option<f64> {
        match self {
            Cell::Done(r) => Some(r.mean_accuracy),
            Cell::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: String,
    pub config: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub datasets: Vec<String>,
    pub rows: Vec<ComparisonRow>,
    pub options: CvOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delta {
    pub from: String,
    pub to: String,
    /// Per dataset, `to - from` in accuracy units, when both cells succeeded.
    pub values: Vec<Option<f64>>,
}

impl ComparisonTable {
    pub fn has_failures(&self) -> bool {
        self.rows
            .iter()
            .flat_map(|r| &r.cells)
            .any(|c| matches!(c, Cell::Failed(_)))
    }

    /// Differences between consecutive rows.
    pub fn deltas(&self) -> Vec<Delta> {
        self.rows
            .windows(2)
            .map(|w| Delta {
                from: w[0].model.clone(),
                to: w[1].model.clone(),
                values: w[0]
                    .cells
                    .iter()
                    .zip(&w[1].cells)
                    .map(|(a, b)| Some(b.mean()? - a.mean()?))
                    .collect(),
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let width = self
            .datasets
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max(10);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}-fold cross-validation, seed {}, {} folds; accuracy in %, published value in brackets",
            self.options.k,
            self.options.seed,
            if self.options.stratify { "stratified" } else { "unstratified" }
        );
        let _ = write!(out, "{:<12}", "model");
        for d in &self.datasets {
            let _ = write!(out, "  {:>w$}", d, w = width + 10);
        }
        let _ = writeln!(out);
        for row in &self.rows {
            let _ = write!(out, "{:<12}", row.model);
            for (cell, d) in row.cells.iter().zip(&self.datasets) {
                let published = reference_accuracy(&row.model, d)
                    .map_or(String::new(), |v| format!(" [{v:.2}]"));
                let value = match cell {
                    Cell::Done(r) => format!("{:.2}{published}", 100.0 * r.mean_accuracy),
                    Cell::Failed(_) => format!("FAILED{published}"),
                };
                let _ = write!(out, "  {:>w$}", value, w = width + 10);
            }
            let _ = writeln!(out);
        }
        let deltas = self.deltas();
        if !deltas.is_empty() {
            let _ = writeln!(out);
            for delta in &deltas {
                let _ = write!(out, "{:<12}", format!("{} - {}", delta.to, delta.from));
                for v in &delta.values {
                    let s = v.map_or("n/a".to_string(), |v| format!("{:+.2}", 100.0 * v));
                    let _ = write!(out, "  {:>w$}", s, w = width + 10);
                }
                let _ = writeln!(out);
            }
        }
        let _ = writeln!(out);
        for row in &self.rows {
            let _ = writeln!(out, "{}: {}", row.model, row.config);
            for (cell, d) in row.cells.iter().zip(&self.datasets) {
                if let Cell::Failed(msg) = cell {
                    let _ = writeln!(out, "  {d}: {msg}");
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "model,dataset,status,mean_accuracy,published_percent,k,seed,stratified,config\n",
        );
        for row in &self.rows {
            for (cell, d) in row.cells.iter().zip(&self.datasets) {
                let (status, mean) = match cell {
                    Cell::Done(r) => ("ok", format!("{:.17}", r.mean_accuracy)),
                    Cell::Failed(_) => ("failed", String::new()),
                };
                let published =
                    reference_accuracy(&row.model, d).map_or(String::new(), |v| format!("{v:.2}"));
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},\"{}\"",
                    row.model,
                    d,
                    status,
                    mean,
                    published,
                    self.options.k,
                    self.options.seed,
                    self.options.stratify,
                    row.config
                );
            }
        }
        for delta in self.deltas() {
            for (v, d) in delta.values.iter().zip(&self.datasets) {
                let v = v.map_or(String::new(), |v| format!("{v:.17}"));
                let _ = writeln!(
                    out,
                    "{} - {},{},delta,{},,{},{},{},",
                    delta.to,
                    delta.from,
                    d,
                    v,
                    self.options.k,
                    self.options.seed,
                    self.options.stratify
                );
            }
        }
        out
    }
}

/// Cross-validates every model on every dataset. A failing cell is recorded
/// and the rest of the table still runs.
pub fn compare_models(
    datasets: &[(String, Dataset)],
    specs: &[ModelSpec],
    options: &CvOptions,
) -> Result<ComparisonTable> {
    if datasets.is_empty() || specs.is_empty() {
        return Err(Error::Config(
            "a comparison needs at least one dataset and one model".into(),
        ));
    }
    let rows = specs
        .iter()
        .map(|spec| ComparisonRow {
            model: spec.name(),
            config: spec.describe(),
            cells: datasets
                .iter()
                .map(|(name, data)| match cross_validate(data, spec, options) {
                    Ok(mut r) => {
                        r.dataset.clone_from(name);
                        Cell::Done(r)
                    }
                    Err(e) => {
                        log::error!("{} on {name}: {e}", spec.name());
                        Cell::Failed(e.to_string())
                    }
                })
                .collect(),
        })
        .collect();
    Ok(ComparisonTable {
        datasets: datasets.iter().map(|(n, _)| n.clone()).collect(),
        rows,
        options: *options,
    })
}
