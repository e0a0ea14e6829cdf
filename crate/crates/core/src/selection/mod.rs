//! Stepwise factor selection with forced-in terms, scored by K-fold cross-validation.

mod best_subset;
mod cv;
mod kfold;
mod stepwise;

pub use best_subset::{best_subset, MAX_EXHAUSTIVE_CANDIDATES};
pub use cv::{cv_score, term_key};
pub use kfold::kfold_split;
pub use stepwise::{
    stepwise_select, Direction, ScoreKind, SelectionResult, SelectionSpec, StepAction, TraceStep,
    VisitedModel, IMPROVEMENT_TOLERANCE,
};
