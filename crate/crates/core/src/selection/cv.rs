//! Out-of-fold R² for a forced block plus a factor subset.

use crate::domain::DesignRow;
use crate::error::{Error, Result};
use crate::stats::{fit_design, least_squares, ColumnData, Design};

/// Cross-validated (or in-sample) scorer over a fixed dataset and fold layout.
///
/// Column order for any subset is canonical (forced terms, then factors sorted
/// by [`term_key`]) so a subset scores bit-identically however it was reached.
pub(crate) struct Evaluator<'a> {
    data: &'a ColumnData,
    forced: Vec<usize>,
    folds: Vec<FoldIndex>,
}

struct FoldIndex {
    train: Vec<usize>,
    test: Vec<usize>,
}

/// Sort key for candidate terms: question number first, then name.
pub fn term_key(name: &str) -> (u8, &str) {
    let number = name
        .parse::<crate::domain::QuestionId>()
        .map(|q| q.number())
        .unwrap_or(u8::MAX);
    (number, name)
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CvOutcome {
    pub mean: f64,
    pub per_fold: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(data: &'a ColumnData, forced: &[String], folds: &[Vec<usize>]) -> Result<Self> {
        let forced = resolve(data, forced)?;
        let n = data.response.len();
        let mut in_test = vec![usize::MAX; n];
        for (f, fold) in folds.iter().enumerate() {
            for &i in fold {
                if i >= n || in_test[i] != usize::MAX {
                    return Err(Error::InvalidArgument(
                        "folds must partition the row indices".into(),
                    ));
                }
                in_test[i] = f;
            }
        }
        if in_test.contains(&usize::MAX) {
            return Err(Error::InvalidArgument("folds must cover every row".into()));
        }
        let folds = folds
            .iter()
            .enumerate()
            .map(|(f, test)| FoldIndex {
                train: (0..n).filter(|&i| in_test[i] != f).collect(),
                test: test.clone(),
            })
            .collect();
        Ok(Evaluator { data, forced, folds })
    }

    /// Column indices for forced terms plus `subset` in canonical order.
    pub fn columns_for(&self, subset: &[usize]) -> Vec<usize> {
        let mut factors = subset.to_vec();
        factors.sort_by(|a, b| term_key(&self.data.names[*a]).cmp(&term_key(&self.data.names[*b])));
        let mut cols = self.forced.clone();
        cols.extend(factors);
        cols
    }

    /// Mean hold-out R² across folds; `-inf` when any training fold is rank deficient.
    pub fn cv(&self, subset: &[usize]) -> Result<CvOutcome> {
        let cols = self.columns_for(subset);
        let mut per_fold = Vec::with_capacity(self.folds.len());
        for fold in &self.folds {
            match self.fold_r2(&cols, fold) {
                Ok(r2) => per_fold.push(r2),
                Err(Error::RankDeficient { .. }) => {
                    return Ok(CvOutcome {
                        mean: f64::NEG_INFINITY,
                        per_fold: vec![f64::NEG_INFINITY; self.folds.len()],
                    })
                }
                Err(e) => return Err(e),
            }
        }
        let mean = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
        Ok(CvOutcome { mean, per_fold })
    }

    /// In-sample adjusted R² of the full-data fit; `-inf` on rank deficiency.
    pub fn adj_r2(&self, subset: &[usize]) -> Result<f64> {
        let cols = self.columns_for(subset);
        match fit_design("score", &self.data.design(&cols), true) {
            Ok(m) => Ok(m.stats.adj_r2),
            Err(Error::RankDeficient { .. }) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e),
        }
    }

    fn fold_r2(&self, cols: &[usize], fold: &FoldIndex) -> Result<f64> {
        let gather = |idx: &[usize], src: &[f64]| idx.iter().map(|&i| src[i]).collect::<Vec<f64>>();
        let train_cols: Vec<Vec<f64>> = cols
            .iter()
            .map(|&c| gather(&fold.train, &self.data.columns[c]))
            .collect();
        let train_y = gather(&fold.train, &self.data.response);
        let design = Design {
            names: cols.iter().map(|&c| self.data.names[c].as_str()).collect(),
            columns: train_cols.iter().map(Vec::as_slice).collect(),
            response: &train_y,
        };
        let beta = least_squares(&design, true)?;

        let mut sse = 0.0;
        for &i in &fold.test {
            let pred = beta[0]
                + cols
                    .iter()
                    .zip(&beta[1..])
                    .map(|(&c, b)| self.data.columns[c][i] * b)
                    .sum::<f64>();
            sse += (self.data.response[i] - pred).powi(2);
        }
        let test_y = gather(&fold.test, &self.data.response);
        let test_mean = test_y.iter().sum::<f64>() / test_y.len() as f64;
        let mut sst: f64 = test_y.iter().map(|y| (y - test_mean).powi(2)).sum();
        if sst == 0.0 {
            // constant hold-out (e.g. a single row): measure against the training mean
            let train_mean = train_y.iter().sum::<f64>() / train_y.len() as f64;
            sst = test_y.iter().map(|y| (y - train_mean).powi(2)).sum();
            if sst == 0.0 {
                return Ok(if sse == 0.0 { 1.0 } else { f64::NEG_INFINITY });
            }
        }
        Ok(1.0 - sse / sst)
    }
}

pub(crate) fn resolve(data: &ColumnData, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| {
            data.index_of(n).ok_or_else(|| Error::TermMismatch {
                expected: data.names.join(", "),
                found: n.clone(),
            })
        })
        .collect()
}

/// Mean out-of-fold R² of `forced_terms + factor_subset` over `folds`.
///
/// Returns `-inf` when some training fold is rank deficient, which disqualifies
/// the subset from selection.
pub fn cv_score(
    rows: &[DesignRow],
    forced_terms: &[String],
    factor_subset: &[String],
    folds: &[Vec<usize>],
) -> Result<f64> {
    let data = ColumnData::from_rows(rows)?;
    let eval = Evaluator::new(&data, forced_terms, folds)?;
    let subset = resolve(&data, factor_subset)?;
    Ok(eval.cv(&subset)?.mean)
}
