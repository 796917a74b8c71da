use std::fmt::Write as _;

use crate::data::{Dataset, Label};
use crate::error::Result;
use crate::model::{Classifier, Learner};

use super::folds::{fold_seed, kfold_split, FoldPlan, DEFAULT_K};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    pub stratify: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            seed: 42,
            stratify: true,
        }
    }
}

/// Confusion counts with class 1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Present, Label::Present) => self.tp += 1,
            (Label::Absent, Label::Absent) => self.tn += 1,
            (Label::Absent, Label::Present) => self.fp += 1,
            (Label::Present, Label::Absent) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn correct(&self) -> usize {
        self.tp + self.tn
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub seed: u64,
    pub size: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub model: String,
    pub config: String,
    pub dataset: String,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
}

pub fn mean_of(folds: &[FoldResult]) -> f64 {
    folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64
}

impl CvReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model    {}", self.model);
        if !self.dataset.is_empty() {
            let _ = writeln!(out, "dataset  {}", self.dataset);
        }
        let _ = writeln!(out, "config   {}", self.config);
        let _ = writeln!(
            out,
            "folds    k={} seed={} {}",
            self.k,
            self.seed,
            if self.stratified {
                "stratified"
            } else {
                "unstratified"
            }
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>4}  {:>4}  {:>8}  {:>4}  {:>4}  {:>4}  {:>4}",
            "fold", "size", "accuracy", "tp", "tn", "fp", "fn"
        );
        for f in &self.folds {
            let c = f.confusion;
            let _ = writeln!(
                out,
                "{:>4}  {:>4}  {:>8.4}  {:>4}  {:>4}  {:>4}  {:>4}",
                f.fold, f.size, f.accuracy, c.tp, c.tn, c.fp, c.fn_
            );
        }
        let _ = writeln!(out, "{:>4}  {:>4}  {:>8.4}", "mean", "", self.mean_accuracy);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,dataset,seed,fold,size,accuracy,tp,tn,fp,fn\n");
        for f in &self.folds {
            let c = f.confusion;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.17},{},{},{},{}",
                self.model,
                self.dataset,
                self.seed,
                f.fold,
                f.size,
                f.accuracy,
                c.tp,
                c.tn,
                c.fp,
                c.fn_
            );
        }
        let _ = writeln!(
            out,
            "{},{},{},mean,,{:.17},,,,",
            self.model, self.dataset, self.seed, self.mean_accuracy
        );
        out
    }
}

/// Fits `learner` on every fold but `fold` of `plan`.
pub fn fit_fold<L: Learner>(
    data: &Dataset,
    plan: &FoldPlan,
    fold: usize,
    learner: &L,
) -> Result<L::Model> {
    learner.fit(
        &data.subset(&plan.train_indices(fold)),
        fold_seed(plan.seed, fold),
    )
}

pub fn evaluate<C: Classifier + ?Sized>(model: &C, test: &Dataset) -> Result<Confusion> {
    let mut confusion = Confusion::default();
    for r in &test.records {
        confusion.record(r.label, model.predict(&r.features)?.class);
    }
    Ok(confusion)
}

/// k-fold cross-validation. Each fold's model, including its imputation and
/// scaling statistics, sees only the other folds.
pub fn cross_validate<L: Learner>(
    data: &Dataset,
    learner: &L,
    options: &CvOptions,
) -> Result<CvReport> {
    let plan = kfold_split(&data.labels(), options.k, options.seed, options.stratify)?;
    let mut folds = Vec::with_capacity(plan.k);
    for fold in 0..plan.k {
        let model = fit_fold(data, &plan, fold, learner)?;
        let test = data.subset(&plan.test_indices(fold));
        let confusion = evaluate(&model, &test)?;
        log::debug!(
            "fold {fold}: {}/{} correct",
            confusion.correct(),
            confusion.total()
        );
        folds.push(FoldResult {
            fold,
            seed: fold_seed(plan.seed, fold),
            size: test.len(),
            accuracy: confusion.correct() as f64 / test.len() as f64,
            confusion,
        });
    }
    Ok(CvReport {
        model: learner.name(),
        config: learner.describe(),
        dataset: String::new(),
        k: plan.k,
        seed: options.seed,
        stratified: plan.stratified,
        mean_accuracy: mean_of(&folds),
        folds,
    })
}
