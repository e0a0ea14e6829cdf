//! Statistical kernel: least squares with inference, Student-t, Welch's test, weighted kappa.

mod kappa;
mod linalg;
mod ols;
mod special;
mod tdist;
mod ttest;

pub use kappa::{cohen_kappa, passes_repeatability_gate, AgreementMatrix, Weighting, REPEATABILITY_GATE};
pub use ols::{
    adjusted_r2, fit_design, least_squares, ols_fit, predict, ColumnData, Design, DesignInfo,
    EncodingMeta, FitStats, FittedModel, PredictionInterval, PredictionResult, TermEstimate,
    TermRole,
};
pub use special::{beta_reg, ln_beta, ln_gamma};
pub use tdist::{t_cdf, t_pdf, t_quantile, t_two_sided_p};
pub use ttest::{welch_from_summaries, welch_t_test, SampleSummary, TTestResult};
