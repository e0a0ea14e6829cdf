use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::cv::{resolve, term_key, Evaluator};
use super::kfold::kfold_split;
use crate::domain::DesignRow;
use crate::error::{Error, Result};
use crate::stats::{fit_design, ColumnData, FittedModel};

/// A move must beat the current score by more than this to be taken.
pub const IMPROVEMENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    #[default]
    Bidirectional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    #[default]
    CvR2,
    InSampleAdjR2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSpec {
    /// Terms present in every model, in this order.
    pub forced_terms: Vec<String>,
    pub candidate_terms: Vec<String>,
    pub k_folds: usize,
    pub seed: u64,
    pub direction: Direction,
    pub score: ScoreKind,
    pub max_steps: usize,
}

impl SelectionSpec {
    pub fn new(forced_terms: Vec<String>, candidate_terms: Vec<String>) -> Self {
        SelectionSpec {
            forced_terms,
            candidate_terms,
            k_folds: 5,
            seed: 0,
            direction: Direction::Bidirectional,
            score: ScoreKind::CvR2,
            max_steps: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.candidate_terms.iter().find(|c| self.forced_terms.contains(c)) {
            return Err(Error::OverlappingTerms(t.clone()));
        }
        if self.k_folds < 2 {
            return Err(Error::BadK { n: 0, k: self.k_folds });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepAction {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub action: StepAction,
    pub term: String,
    pub score_before: f64,
    pub score_after: f64,
}

/// One model the search scored, with its full term list.
#[derive(Debug, Clone, PartialEq)]
pub struct VisitedModel {
    pub terms: Vec<String>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<String>,
    pub score: f64,
    pub trace: Vec<TraceStep>,
    /// Out-of-fold R² per fold for the final subset (empty for in-sample scoring).
    pub fold_scores: Vec<f64>,
    pub final_model: FittedModel,
    #[serde(skip)]
    pub visited: Vec<VisitedModel>,
}

/// Ordering of candidate states: higher score, then fewer terms, then lower
/// question indices. `Less` means `a` is preferred.
pub(crate) fn prefer(a: (f64, &[usize]), b: (f64, &[usize]), data: &ColumnData) -> Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.len().cmp(&b.1.len()))
        .then_with(|| {
            let keys = |s: &[usize]| {
                let mut k: Vec<(u8, &str)> = s.iter().map(|&i| term_key(&data.names[i])).collect();
                k.sort();
                k
            };
            keys(a.1).cmp(&keys(b.1))
        })
}

pub(crate) fn score_subset(
    eval: &Evaluator<'_>,
    kind: ScoreKind,
    subset: &[usize],
) -> Result<(f64, Vec<f64>)> {
    let outcome = match kind {
        ScoreKind::CvR2 => eval.cv(subset).map(|o| (o.mean, o.per_fold)),
        ScoreKind::InSampleAdjR2 => eval.adj_r2(subset).map(|s| (s, Vec::new())),
    };
    match outcome {
        // too many columns for a training fold: the move is not available
        Err(Error::Underdetermined { .. }) if !subset.is_empty() => {
            Ok((f64::NEG_INFINITY, Vec::new()))
        }
        other => other,
    }
}

/// Greedy stepwise search with the forced terms always in the model.
pub fn stepwise_select(rows: &[DesignRow], spec: &SelectionSpec) -> Result<SelectionResult> {
    spec.validate()?;
    let data = ColumnData::from_rows(rows)?;
    let folds = kfold_split(rows.len(), spec.k_folds, spec.seed)?;
    let eval = Evaluator::new(&data, &spec.forced_terms, &folds)?;
    let mut candidates = resolve(&data, &spec.candidate_terms)?;
    candidates.sort_by(|a, b| term_key(&data.names[*a]).cmp(&term_key(&data.names[*b])));
    candidates.dedup();

    let mut visited = Vec::new();
    let mut record = |subset: &[usize], score: f64| {
        visited.push(VisitedModel {
            terms: eval.columns_for(subset).iter().map(|&c| data.names[c].clone()).collect(),
            score,
        });
    };

    let mut current: Vec<usize> = match spec.direction {
        Direction::Backward => candidates.clone(),
        _ => Vec::new(),
    };
    let (mut score, mut fold_scores) = score_subset(&eval, spec.score, &current)?;
    record(&current, score);
    let mut trace = Vec::new();

    while trace.len() < spec.max_steps {
        let mut moves: Vec<(StepAction, usize)> = Vec::new();
        if spec.direction != Direction::Backward {
            moves.extend(
                candidates
                    .iter()
                    .filter(|c| !current.contains(c))
                    .map(|&c| (StepAction::Add, c)),
            );
        }
        if spec.direction != Direction::Forward {
            moves.extend(current.iter().map(|&c| (StepAction::Remove, c)));
        }

        let mut best: Option<(StepAction, usize, Vec<usize>, f64, Vec<f64>)> = None;
        for (action, term) in moves {
            let next: Vec<usize> = match action {
                StepAction::Add => current.iter().copied().chain([term]).collect(),
                StepAction::Remove => current.iter().copied().filter(|&c| c != term).collect(),
            };
            let (s, per_fold) = score_subset(&eval, spec.score, &next)?;
            record(&next, s);
            let better = match &best {
                None => true,
                Some((_, _, b_set, b_score, _)) => {
                    prefer((s, &next), (*b_score, b_set), &data) == Ordering::Less
                }
            };
            if better {
                best = Some((action, term, next, s, per_fold));
            }
        }

        match best {
            Some((action, term, next, s, per_fold)) if s > score + IMPROVEMENT_TOLERANCE => {
                trace.push(TraceStep {
                    step: trace.len() + 1,
                    action,
                    term: data.names[term].clone(),
                    score_before: score,
                    score_after: s,
                });
                current = next;
                score = s;
                fold_scores = per_fold;
            }
            _ => break,
        }
    }

    let cols = eval.columns_for(&current);
    let final_model = fit_design("stepwise", &data.design(&cols), true)?;
    let selected = eval.columns_for(&current)[spec.forced_terms.len()..]
        .iter()
        .map(|&c| data.names[c].clone())
        .collect();
    Ok(SelectionResult {
        selected,
        score,
        trace,
        fold_scores,
        final_model,
        visited,
    })
}
