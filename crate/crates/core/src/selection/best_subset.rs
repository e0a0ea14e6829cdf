use std::cmp::Ordering;

use super::cv::{resolve, term_key, Evaluator};
use super::stepwise::{prefer, score_subset, ScoreKind};
use crate::domain::DesignRow;
use crate::error::{Error, Result};
use crate::stats::ColumnData;

pub const MAX_EXHAUSTIVE_CANDIDATES: usize = 15;

/// Exhaustive search over all `2^m` factor subsets, scored by mean out-of-fold R².
///
/// Ties break exactly as in [`super::stepwise_select`]: fewer terms, then lower
/// question indices.
pub fn best_subset(
    rows: &[DesignRow],
    forced_terms: &[String],
    candidates: &[String],
    folds: &[Vec<usize>],
) -> Result<(Vec<String>, f64)> {
    if candidates.len() > MAX_EXHAUSTIVE_CANDIDATES {
        return Err(Error::TooManyCandidates(candidates.len()));
    }
    if let Some(t) = candidates.iter().find(|c| forced_terms.contains(c)) {
        return Err(Error::OverlappingTerms(t.clone()));
    }
    let data = ColumnData::from_rows(rows)?;
    let eval = Evaluator::new(&data, forced_terms, folds)?;
    let mut cand = resolve(&data, candidates)?;
    cand.sort_by(|a, b| term_key(&data.names[*a]).cmp(&term_key(&data.names[*b])));
    cand.dedup();

    let mut best: Option<(Vec<usize>, f64)> = None;
    for mask in 0u32..(1u32 << cand.len()) {
        let subset: Vec<usize> = cand
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &c)| c)
            .collect();
        let (score, _) = score_subset(&eval, ScoreKind::CvR2, &subset)?;
        let better = match &best {
            None => true,
            Some((b, s)) => prefer((score, &subset), (*s, b), &data) == Ordering::Less,
        };
        if better {
            best = Some((subset, score));
        }
    }
    let (subset, score) = best.expect("at least the empty subset is scored");
    let names = eval.columns_for(&subset)[forced_terms.len()..]
        .iter()
        .map(|&c| data.names[c].clone())
        .collect();
    Ok((names, score))
}
