//! Cross-validation and model comparison.

mod compare;
mod cv;
mod folds;

pub use compare::{
    compare_models, reference_accuracy, Cell, ComparisonRow, ComparisonTable, Delta,
    REFERENCE_ACCURACY,
};
pub use cv::{
    cross_validate, evaluate, fit_fold, mean_of, Confusion, CvOptions, CvReport, FoldResult,
};
pub use folds::{fold_seed, kfold_split, FoldPlan, DEFAULT_K};
