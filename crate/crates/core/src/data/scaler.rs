use std::fmt::Write as _;

use super::{Dataset, N_FEATURES};
use crate::error::{Error, Result};

/// Per-column population mean and standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ScalerStats {
    pub fn arity(&self) -> usize {
        self.mean.len()
    }

    pub fn is_constant(&self, column: usize) -> bool {
        self.std[column] == 0.0
    }

    pub fn transform_value(&self, column: usize, value: f64) -> f64 {
        if self.is_constant(column) {
            0.0
        } else {
            (value - self.mean[column]) / self.std[column]
        }
    }

    pub fn transform(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: values.len(),
            });
        }
        Ok(values
            .iter()
            .enumerate()
            .map(|(c, &v)| self.transform_value(c, v))
            .collect())
    }

    /// One `name mean std` line per column.
    pub fn to_text(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (c, name) in names.iter().enumerate().take(self.arity()) {
            let _ = writeln!(out, "{name} {:.16e} {:.16e}", self.mean[c], self.std[c]);
        }
        out
    }

    /// Inverse of [`ScalerStats::to_text`]; returns the column names alongside the stats.
    pub fn from_text(text: &str) -> Result<(Vec<String>, ScalerStats)> {
        let mut names = Vec::new();
        let mut mean = Vec::new();
        let mut std = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: &str| Error::ModelFormat {
                line: i + 1,
                reason: reason.to_string(),
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [name, m, s] = tokens[..] else {
                return Err(bad("expected `name mean std`"));
            };
            let m: f64 = m
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| bad("bad mean"))?;
            let s: f64 = s
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| bad("bad standard deviation"))?;
            names.push(name.to_string());
            mean.push(m);
            std.push(s);
        }
        if mean.len() != N_FEATURES {
            return Err(Error::ArityMismatch {
                expected: N_FEATURES,
                found: mean.len(),
            });
        }
        Ok((names, ScalerStats { mean, std }))
    }
}

pub fn fit_scaler(data: &Dataset) -> Result<ScalerStats> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let rows = data
        .records
        .iter()
        .map(|r| r.values())
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    let mut mean = vec![0.0; N_FEATURES];
    let mut std = vec![0.0; N_FEATURES];
    for c in 0..N_FEATURES {
        let first = rows[0][c];
        if rows.iter().all(|r| r[c] == first) {
            // exact: avoids a rounding-noise std on constant columns
            mean[c] = first;
            continue;
        }
        let m = rows.iter().map(|r| r[c]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[c] - m).powi(2)).sum::<f64>() / n;
        mean[c] = m;
        std[c] = var.sqrt();
    }
    Ok(ScalerStats { mean, std })
}

pub fn apply_scaler(data: &Dataset, stats: &ScalerStats) -> Result<Dataset> {
    if stats.arity() != N_FEATURES {
        return Err(Error::ArityMismatch {
            expected: N_FEATURES,
            found: stats.arity(),
        });
    }
    let mut out = data.clone();
    for record in &mut out.records {
        let values = record.values()?;
        for (c, slot) in record.features.iter_mut().enumerate() {
            *slot = Some(stats.transform_value(c, values[c]));
        }
    }
    Ok(out)
}
