//! Seeded synthetic 13-feature data with a known separating direction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Label, SampleRecord, N_FEATURES};

/// Class-conditional shift along the all-ones direction.
pub const CLASS_SHIFT: f64 = 1.0;
/// Minimum distance of a kept sample's feature mean from the decision boundary.
pub const MARGIN: f64 = 0.5;

/// `n` samples with alternating labels. Features are `±CLASS_SHIFT` plus unit
/// Gaussian noise, and a sample is kept only when `sign * mean(features) >= MARGIN`,
/// so the all-ones direction separates the classes with margin. Every column
/// is marked numeric.
pub fn separable(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n);
    while records.len() < n {
        let label = Label::from_index(records.len() % 2).expect("0 or 1");
        let sign = if label == Label::Present { 1.0 } else { -1.0 };
        let values: [f64; N_FEATURES] =
            std::array::from_fn(|_| sign * CLASS_SHIFT + standard_normal(&mut rng));
        let mean = values.iter().sum::<f64>() / N_FEATURES as f64;
        if sign * mean >= MARGIN {
            records.push(SampleRecord::complete(values, label));
        }
    }
    Dataset::new(records).with_categorical_mask([false; N_FEATURES])
}

/// Box-Muller transform.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Renders records in the Cleveland dialect (comma-separated, class 0/1).
pub fn to_cleveland_text(data: &Dataset) -> String {
    let mut out = String::new();
    for r in &data.records {
        for v in &r.features {
            match v {
                Some(v) => out.push_str(&format!("{v},")),
                None => out.push_str("?,"),
            }
        }
        out.push_str(&format!("{}\n", r.label.index()));
    }
    out
}
