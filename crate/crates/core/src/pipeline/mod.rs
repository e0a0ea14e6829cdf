//! End-to-end model building, synthetic data, and planted-model recovery.

mod recovery;
mod screening;
mod synth;
mod workflow;

pub use recovery::{
    recovery_experiment, trial_seed, ExperimentSpec, RecoveryReport, TrialOutcome, Workflow,
};
pub use screening::{screen_factors, FactorScreen, GroupComparison, ScreeningReport, DEFAULT_ALPHA};
pub use synth::{
    generate_synthetic, published_factor_means, CellShare, ControlDistributions, NormalParams,
    SynthSpec, PUBLISHED_FACTOR_MEANS, PUBLISHED_SAMPLE_SIZE,
};
pub use workflow::{build_baseline, build_specific, BuildConfig, BuildOutcome, SliceKind};
