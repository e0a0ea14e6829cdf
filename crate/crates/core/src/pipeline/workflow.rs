//! Baseline and slice-specific model building.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::screening::{screen_factors, ScreeningReport, DEFAULT_ALPHA};
use crate::domain::{
    encode_row, factor_prevalence_filter, Category, Dataset, DesignRow, Platform, PrevalenceSplit,
    QuestionId, CATEGORY_DUMMY, CONTROL_TERMS, DEFAULT_PREVALENCE_THRESHOLD, PLATFORM_DUMMY,
};
use crate::error::{Error, Result};
use crate::selection::{stepwise_select, Direction, ScoreKind, SelectionResult, SelectionSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildConfig {
    pub alpha: f64,
    pub prevalence_threshold: f64,
    pub k_folds: usize,
    pub seed: u64,
    pub direction: Direction,
    pub score: ScoreKind,
    pub max_steps: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            alpha: DEFAULT_ALPHA,
            prevalence_threshold: DEFAULT_PREVALENCE_THRESHOLD,
            k_folds: 5,
            seed: 0,
            direction: Direction::Bidirectional,
            score: ScoreKind::CvR2,
            max_steps: 100,
        }
    }
}

impl BuildConfig {
    fn selection_spec(&self, forced: Vec<String>, candidates: Vec<String>) -> SelectionSpec {
        SelectionSpec {
            k_folds: self.k_folds,
            seed: self.seed,
            direction: self.direction,
            score: self.score,
            max_steps: self.max_steps,
            ..SelectionSpec::new(forced, candidates)
        }
    }
}

/// A platform or product-category subset of campaigns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceKind {
    Platform(Platform),
    Category(Category),
}

impl SliceKind {
    pub fn contains(self, record: &crate::domain::CampaignRecord) -> bool {
        match self {
            SliceKind::Platform(p) => record.platform == p,
            SliceKind::Category(c) => record.category == c,
        }
    }

    /// The dummy that is constant on this slice.
    pub fn sliced_dummy(self) -> &'static str {
        match self {
            SliceKind::Platform(_) => PLATFORM_DUMMY,
            SliceKind::Category(_) => CATEGORY_DUMMY,
        }
    }
}

impl fmt::Display for SliceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SliceKind::Platform(p) => write!(f, "platform={p}"),
            SliceKind::Category(c) => write!(f, "category={c}"),
        }
    }
}

impl FromStr for SliceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('=') {
            Some(("platform", v)) => Ok(SliceKind::Platform(v.parse()?)),
            Some(("category", v)) => Ok(SliceKind::Category(v.parse()?)),
            _ => Err(Error::InvalidArgument(format!(
                "`{s}` is not platform=<KS|IGG> or category=<3DP|SW>"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildOutcome {
    pub prevalence: PrevalenceSplit,
    /// Absent for slice-specific models, which skip the group comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screening: Option<ScreeningReport>,
    pub forced_terms: Vec<String>,
    pub candidate_terms: Vec<String>,
    pub selection: SelectionResult,
}

fn design_rows(dataset: &Dataset, controls: &[String], factors: &[QuestionId]) -> Result<Vec<DesignRow>> {
    dataset
        .records()
        .iter()
        .map(|r| encode_row(r, controls, factors))
        .collect()
}

fn reject_constant(rows: &[DesignRow], terms: &[String]) -> Result<()> {
    for t in terms {
        let first = rows[0].regressors[t.as_str()];
        if rows.iter().all(|r| r.regressors[t.as_str()] == first) {
            return Err(Error::ConstantColumn(t.clone()));
        }
    }
    Ok(())
}

/// Prevalence filter, platform/category screening, then stepwise selection
/// with every control and dummy forced in.
pub fn build_baseline(dataset: &Dataset, config: &BuildConfig) -> Result<BuildOutcome> {
    let prevalence = factor_prevalence_filter(dataset, config.prevalence_threshold)?;
    let screening = screen_factors(dataset, config.alpha, &prevalence.kept)?;
    let pool = screening.candidate_pool.clone();

    let forced: Vec<String> = CONTROL_TERMS.iter().map(|s| s.to_string()).collect();
    let rows = design_rows(dataset, &forced, &pool)?;
    reject_constant(&rows, &forced)?;
    let candidates: Vec<String> = pool.iter().map(|q| q.term_name()).collect();
    let mut selection = stepwise_select(&rows, &config.selection_spec(forced.clone(), candidates.clone()))?;
    selection.final_model.name = "baseline".into();
    Ok(BuildOutcome {
        prevalence,
        screening: Some(screening),
        forced_terms: forced,
        candidate_terms: candidates,
        selection,
    })
}

/// Stepwise selection on one platform or category, with the baseline's
/// critical factors forced in alongside the controls.
pub fn build_specific(
    slice: &Dataset,
    kind: SliceKind,
    baseline_criticals: &[QuestionId],
    config: &BuildConfig,
) -> Result<BuildOutcome> {
    if slice.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(r) = slice.records().iter().find(|r| !kind.contains(r)) {
        return Err(Error::NotASlice(format!("{kind}; campaign `{}` is outside it", r.id)));
    }
    let prevalence = factor_prevalence_filter(slice, config.prevalence_threshold)?;

    let controls: Vec<String> = CONTROL_TERMS
        .iter()
        .filter(|t| **t != kind.sliced_dummy())
        .map(|s| s.to_string())
        .collect();
    let remaining: Vec<QuestionId> = prevalence
        .kept
        .iter()
        .copied()
        .filter(|q| !baseline_criticals.contains(q))
        .collect();
    let mut factors = baseline_criticals.to_vec();
    factors.extend(&remaining);
    let rows = design_rows(slice, &controls, &factors)?;
    reject_constant(&rows, &controls)?;

    let mut forced = controls;
    forced.extend(baseline_criticals.iter().map(|q| q.term_name()));
    let candidates: Vec<String> = remaining.iter().map(|q| q.term_name()).collect();
    let mut selection = stepwise_select(&rows, &config.selection_spec(forced.clone(), candidates.clone()))?;
    selection.final_model.name = format!("specific {kind}");
    Ok(BuildOutcome {
        prevalence,
        screening: None,
        forced_terms: forced,
        candidate_terms: candidates,
        selection,
    })
}
