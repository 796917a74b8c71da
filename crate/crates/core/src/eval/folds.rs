use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Label;
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index of every record.
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldPlan {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Seeded k-fold assignment. With `stratify`, each class's records are shuffled
/// separately, the classes are laid end to end, and position `p` goes to fold
/// `p mod k`. Stratification is dropped, with a warning, when a class has
/// fewer than `k / 2` members.
pub fn kfold_split(labels: &[Label], k: usize, seed: u64, stratify: bool) -> Result<FoldPlan> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::InvalidHyperparams(format!(
            "k must be at least 2, got {k}"
        )));
    }
    if n < k {
        return Err(Error::TooFewSamples { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_class =
        |class: Label| -> Vec<usize> { (0..n).filter(|&i| labels[i] == class).collect() };
    let mut stratified = stratify;
    if stratify {
        let smallest = per_class(Label::Absent)
            .len()
            .min(per_class(Label::Present).len());
        if 2 * smallest < k {
            log::warn!(
                "a class has {smallest} records, fewer than k/2 = {}; using unstratified folds",
                k as f64 / 2.0
            );
            stratified = false;
        }
    }
    let order: Vec<usize> = if stratified {
        let mut order = Vec::with_capacity(n);
        for class in [Label::Absent, Label::Present] {
            let mut idx = per_class(class);
            idx.shuffle(&mut rng);
            order.extend(idx);
        }
        order
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        idx
    };
    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
        stratified,
    })
}

/// Generator seed for one fold, independent of the order folds are run in.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    let mut z = seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
