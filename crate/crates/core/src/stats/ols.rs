//! Ordinary least squares with classical inference, and prediction.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::linalg::Qr;
use super::tdist::{t_quantile, t_two_sided_p};
use crate::domain::{DesignRow, QuestionId, CATEGORY_DUMMY, PLATFORM_DUMMY};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermRole {
    Control,
    Factor,
    Dummy,
}

impl TermRole {
    pub fn of(name: &str) -> TermRole {
        if name == CATEGORY_DUMMY || name == PLATFORM_DUMMY {
            TermRole::Dummy
        } else if name.parse::<QuestionId>().is_ok() {
            TermRole::Factor
        } else {
            TermRole::Control
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub name: String,
    pub role: TermRole,
    pub coefficient: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
}

/// How campaign fields map onto the model's regressors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct EncodingMeta {
    pub control_order: Vec<String>,
    pub factor_ids: Vec<QuestionId>,
}

impl EncodingMeta {
    /// Split term names into controls (everything that is not a question id) and factors.
    pub fn from_terms<'a>(names: impl IntoIterator<Item = &'a str>) -> EncodingMeta {
        let mut meta = EncodingMeta::default();
        for name in names {
            match name.parse::<QuestionId>() {
                Ok(q) => meta.factor_ids.push(q),
                Err(_) => meta.control_order.push(name.to_string()),
            }
        }
        meta
    }
}

/// Training-design summary needed for prediction intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignInfo {
    /// `(X^T X)^{-1}`, rows and columns ordered intercept first (when fitted), then terms.
    pub unscaled_covariance: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitStats {
    pub r2: f64,
    pub adj_r2: f64,
    pub n: usize,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub name: String,
    pub has_intercept: bool,
    pub intercept: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept_std_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept_p_value: Option<f64>,
    pub terms: Vec<TermEstimate>,
    pub stats: FitStats,
    pub encoding_meta: EncodingMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignInfo>,
}

impl FittedModel {
    pub fn term_names(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|t| t.name.as_str())
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.coefficient)
    }

    /// Residual degrees of freedom, `n - p - 1` with an intercept.
    pub fn residual_df(&self) -> usize {
        self.stats.n - self.stats.p - usize::from(self.has_intercept)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionInterval {
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionResult {
    pub ln_amount: f64,
    pub amount: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<PredictionInterval>,
}

pub fn adjusted_r2(r2: f64, n: usize, p: usize) -> Result<f64> {
    if n <= p + 1 {
        return Err(Error::DegenerateDoF { n, p });
    }
    Ok(1.0 - (1.0 - r2) * (n - 1) as f64 / (n - p - 1) as f64)
}

/// Column-major view of a design, used by the fitting routines.
#[derive(Debug, Clone)]
pub struct Design<'a> {
    pub names: Vec<&'a str>,
    pub columns: Vec<&'a [f64]>,
    pub response: &'a [f64],
}

impl Design<'_> {
    fn rows(&self) -> usize {
        self.response.len()
    }

    fn factor(&self, with_intercept: bool, ones: &[f64]) -> Result<Qr> {
        let n = self.rows();
        let params = self.columns.len() + usize::from(with_intercept);
        if n <= self.columns.len() + 1 {
            return Err(Error::Underdetermined { rows: n, params });
        }
        let mut cols: Vec<&[f64]> = Vec::with_capacity(params);
        if with_intercept {
            cols.push(ones);
        }
        cols.extend(self.columns.iter().copied());
        let offset = usize::from(with_intercept);
        let label = |j: usize| {
            if with_intercept && j == 0 {
                "(intercept)".to_string()
            } else {
                self.names[j - offset].to_string()
            }
        };
        Qr::factor(&cols, n, &label)
    }
}

/// Coefficients only, `[intercept?, terms...]`. The fast path used by cross-validation.
pub fn least_squares(design: &Design<'_>, with_intercept: bool) -> Result<Vec<f64>> {
    let ones = vec![1.0; design.rows()];
    let qr = design.factor(with_intercept, &ones)?;
    Ok(qr.solve(design.response))
}

/// Full fit with standard errors, p-values and fit statistics.
pub fn fit_design(name: &str, design: &Design<'_>, with_intercept: bool) -> Result<FittedModel> {
    let n = design.rows();
    let ones = vec![1.0; n];
    let qr = design.factor(with_intercept, &ones)?;
    let beta = qr.solve(design.response);
    let offset = usize::from(with_intercept);
    let p = design.columns.len();

    let fitted: Vec<f64> = (0..n)
        .map(|i| {
            let base = if with_intercept { beta[0] } else { 0.0 };
            base + design
                .columns
                .iter()
                .zip(&beta[offset..])
                .map(|(c, b)| c[i] * b)
                .sum::<f64>()
        })
        .collect();
    let sse: f64 = design
        .response
        .iter()
        .zip(&fitted)
        .map(|(y, f)| (y - f).powi(2))
        .sum();
    let sst = if with_intercept {
        let mean = design.response.iter().sum::<f64>() / n as f64;
        design.response.iter().map(|y| (y - mean).powi(2)).sum::<f64>()
    } else {
        design.response.iter().map(|y| y * y).sum::<f64>()
    };
    let r2 = if sst > 0.0 { (1.0 - sse / sst).clamp(0.0, 1.0) } else { 1.0 };
    let adj_r2 = adjusted_r2(r2, n, p)?;
    let resid_df = (n - p - offset) as f64;
    let sigma = (sse / resid_df).sqrt();
    let cov = qr.unscaled_covariance();

    let inference = |k: usize| {
        let se = sigma * cov[k][k].sqrt();
        let p_value = if se > 0.0 {
            t_two_sided_p(beta[k] / se, resid_df)
        } else {
            0.0
        };
        (se, p_value)
    };

    let terms = design
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let (se, pv) = inference(j + offset);
            TermEstimate {
                name: name.to_string(),
                role: TermRole::of(name),
                coefficient: beta[j + offset],
                std_error: Some(se),
                p_value: Some(pv),
            }
        })
        .collect();
    let (intercept, intercept_std_error, intercept_p_value) = if with_intercept {
        let (se, pv) = inference(0);
        (beta[0], Some(se), Some(pv))
    } else {
        (0.0, None, None)
    };

    Ok(FittedModel {
        name: name.to_string(),
        has_intercept: with_intercept,
        intercept,
        intercept_std_error,
        intercept_p_value,
        terms,
        stats: FitStats {
            r2,
            adj_r2,
            n,
            p,
            residual_sigma: Some(sigma),
        },
        encoding_meta: EncodingMeta::from_terms(design.names.iter().copied()),
        design: Some(DesignInfo {
            unscaled_covariance: cov,
        }),
    })
}

/// Owned column-major storage built from design rows.
#[derive(Debug, Clone)]
pub struct ColumnData {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub response: Vec<f64>,
}

impl ColumnData {
    /// Transpose rows into columns. Every row must carry the same terms in the same order.
    pub fn from_rows(rows: &[DesignRow]) -> Result<ColumnData> {
        let names: Vec<String> = rows
            .first()
            .map(|r| r.regressors.keys().cloned().collect())
            .unwrap_or_default();
        let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
        let mut response = Vec::with_capacity(rows.len());
        for row in rows {
            if row.regressors.len() != names.len()
                || row.regressors.keys().zip(&names).any(|(a, b)| a != b)
            {
                return Err(Error::TermMismatch {
                    expected: names.join(", "),
                    found: row.regressors.keys().cloned().collect::<Vec<_>>().join(", "),
                });
            }
            for (col, v) in columns.iter_mut().zip(row.regressors.values()) {
                col.push(*v);
            }
            response.push(row.response);
        }
        Ok(ColumnData {
            names,
            columns,
            response,
        })
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Borrowed design over the named subset of columns, in the given order.
    pub fn design(&self, selected: &[usize]) -> Design<'_> {
        Design {
            names: selected.iter().map(|&i| self.names[i].as_str()).collect(),
            columns: selected.iter().map(|&i| self.columns[i].as_slice()).collect(),
            response: &self.response,
        }
    }

    pub fn all(&self) -> Design<'_> {
        let idx: Vec<usize> = (0..self.names.len()).collect();
        self.design(&idx)
    }
}

pub fn ols_fit(rows: &[DesignRow], with_intercept: bool) -> Result<FittedModel> {
    let data = ColumnData::from_rows(rows)?;
    fit_design("ols", &data.all(), with_intercept)
}

/// Point prediction on the log scale, with an optional prediction interval.
///
/// The interval needs the residual scale and training design; models without
/// them (such as a model transcribed from published coefficients) return none.
pub fn predict(
    model: &FittedModel,
    regressors: &IndexMap<String, f64>,
    interval_level: Option<f64>,
) -> Result<PredictionResult> {
    if regressors.len() != model.terms.len()
        || regressors.keys().zip(model.term_names()).any(|(a, b)| a != b)
    {
        return Err(Error::TermMismatch {
            expected: model.term_names().collect::<Vec<_>>().join(", "),
            found: regressors.keys().cloned().collect::<Vec<_>>().join(", "),
        });
    }
    let ln_amount = model.intercept
        + model
            .terms
            .iter()
            .zip(regressors.values())
            .map(|(t, v)| t.coefficient * v)
            .sum::<f64>();

    let interval = match interval_level {
        None => None,
        Some(level) if !(level > 0.0 && level < 1.0) => {
            return Err(Error::InvalidArgument(format!(
                "interval level {level} must lie strictly between 0 and 1"
            )))
        }
        Some(level) => match (&model.design, model.stats.residual_sigma) {
            (Some(design), Some(sigma)) => {
                let mut x0 = Vec::with_capacity(model.terms.len() + 1);
                if model.has_intercept {
                    x0.push(1.0);
                }
                x0.extend(regressors.values().copied());
                let cov = &design.unscaled_covariance;
                let leverage: f64 = (0..x0.len())
                    .map(|i| x0[i] * (0..x0.len()).map(|j| cov[i][j] * x0[j]).sum::<f64>())
                    .sum();
                let df = model.residual_df() as f64;
                let t = t_quantile(0.5 + 0.5 * level, df);
                let half = t * sigma * (1.0 + leverage.max(0.0)).sqrt();
                Some(PredictionInterval {
                    level,
                    lower: ln_amount - half,
                    upper: ln_amount + half,
                })
            }
            _ => None,
        },
    };

    Ok(PredictionResult {
        ln_amount,
        amount: ln_amount.exp(),
        interval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(points: &[(f64, f64)]) -> Vec<DesignRow> {
        points
            .iter()
            .map(|&(x, y)| DesignRow {
                response: y,
                regressors: [("x".to_string(), x)].into_iter().collect(),
            })
            .collect()
    }

    #[test]
    fn exact_line() {
        let m = ols_fit(&rows(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]), true).unwrap();
        assert!(m.intercept.abs() < 1e-9);
        assert!((m.terms[0].coefficient - 1.0).abs() < 1e-9);
        assert!((m.stats.r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn three_point_hand_oracle() {
        // Normal equations: [3 3; 3 5] b = [7; 10] => b = (5/6, 3/2);
        // SSE = 1/6, SST = 14/3, R^2 = 1 - 1/28 = 27/28.
        let m = ols_fit(&rows(&[(0.0, 1.0), (1.0, 2.0), (2.0, 4.0)]), true).unwrap();
        assert!((m.intercept - 5.0 / 6.0).abs() < 1e-12);
        assert!((m.terms[0].coefficient - 1.5).abs() < 1e-12);
        assert!((m.stats.r2 - 27.0 / 28.0).abs() < 1e-12);
        assert!((m.stats.r2 - 0.96429).abs() < 1e-4);
        // sigma^2 = SSE / 1, se(slope) = sigma / sqrt(Sxx) with Sxx = 2
        let sigma = (1.0f64 / 6.0).sqrt();
        assert!((m.stats.residual_sigma.unwrap() - sigma).abs() < 1e-12);
        assert!((m.terms[0].std_error.unwrap() - sigma / 2f64.sqrt()).abs() < 1e-12);
        let p = m.terms[0].p_value.unwrap();
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn duplicate_column_is_rank_deficient() {
        let rows: Vec<DesignRow> = (0..6)
            .map(|i| DesignRow {
                response: i as f64,
                regressors: [("a".to_string(), i as f64), ("b".to_string(), i as f64)]
                    .into_iter()
                    .collect(),
            })
            .collect();
        assert!(matches!(ols_fit(&rows, true), Err(Error::RankDeficient { column }) if column == "b"));
    }

    #[test]
    fn too_few_rows() {
        let r = rows(&[(0.0, 1.0), (1.0, 2.0)]);
        assert!(matches!(ols_fit(&r, true), Err(Error::Underdetermined { .. })));
    }

    #[test]
    fn adjusted_r2_examples() {
        assert!((adjusted_r2(0.635, 127, 15).unwrap() - 0.5857).abs() < 1e-3);
        assert_eq!(adjusted_r2(1.0, 20, 4).unwrap(), 1.0);
        assert!((adjusted_r2(0.0, 10, 2).unwrap() - (1.0 - 9.0 / 7.0)).abs() < 1e-12);
        assert!(matches!(adjusted_r2(0.5, 3, 2), Err(Error::DegenerateDoF { n: 3, p: 2 })));
    }

    #[test]
    fn prediction_interval_brackets_point() {
        let pts: Vec<(f64, f64)> =
            (0..12).map(|i| (i as f64, 2.0 + 0.5 * i as f64 + if i % 2 == 0 { 0.3 } else { -0.3 })).collect();
        let m = ols_fit(&rows(&pts), true).unwrap();
        let x: IndexMap<String, f64> = [("x".to_string(), 4.0)].into_iter().collect();
        let r90 = predict(&m, &x, Some(0.90)).unwrap();
        let r99 = predict(&m, &x, Some(0.99)).unwrap();
        let (i90, i99) = (r90.interval.unwrap(), r99.interval.unwrap());
        assert!(i90.lower < r90.ln_amount && r90.ln_amount < i90.upper);
        assert!(i99.lower < i90.lower && i90.upper < i99.upper);
        // far from the data the band widens
        let far: IndexMap<String, f64> = [("x".to_string(), 40.0)].into_iter().collect();
        let rf = predict(&m, &far, Some(0.90)).unwrap().interval.unwrap();
        assert!(rf.upper - rf.lower > i90.upper - i90.lower);
        assert!(predict(&m, &x, Some(1.5)).is_err());
    }

    #[test]
    fn prediction_checks_terms() {
        let m = ols_fit(&rows(&[(0.0, 1.0), (1.0, 2.0), (2.0, 4.0)]), true).unwrap();
        let wrong: IndexMap<String, f64> = [("z".to_string(), 1.0)].into_iter().collect();
        assert!(matches!(predict(&m, &wrong, None), Err(Error::TermMismatch { .. })));
        let zero: IndexMap<String, f64> = [("x".to_string(), 0.0)].into_iter().collect();
        assert_eq!(predict(&m, &zero, None).unwrap().ln_amount, m.intercept);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn random_rows(seed: u64, n: usize, p: usize) -> Vec<DesignRow> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    let regressors: IndexMap<String, f64> =
                        (0..p).map(|j| (format!("x{j}"), rng.random_range(-2.0..2.0))).collect();
                    let y = regressors.values().sum::<f64>() + rng.random_range(-1.0..1.0);
                    DesignRow { response: y, regressors }
                })
                .collect()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn r2_never_drops_when_adding_a_column(seed in any::<u64>(), p in 1usize..5) {
                let n = 12;
                let full = random_rows(seed, n, p + 1);
                let reduced: Vec<DesignRow> = full.iter().map(|r| {
                    let mut r = r.clone();
                    r.regressors.pop();
                    r
                }).collect();
                let a = ols_fit(&reduced, true).unwrap();
                let b = ols_fit(&full, true).unwrap();
                prop_assert!(b.stats.r2 >= a.stats.r2 - 1e-12);
            }

            #[test]
            fn residuals_are_orthogonal(seed in any::<u64>(), p in 1usize..5) {
                let rows = random_rows(seed, 15, p);
                let m = ols_fit(&rows, true).unwrap();
                let data = ColumnData::from_rows(&rows).unwrap();
                let resid: Vec<f64> = rows.iter().map(|r| {
                    r.response - m.intercept - m.terms.iter().zip(r.regressors.values()).map(|(t, v)| t.coefficient * v).sum::<f64>()
                }).collect();
                let rnorm = resid.iter().map(|v| v * v).sum::<f64>().sqrt();
                let ones = vec![1.0; rows.len()];
                for col in data.columns.iter().map(Vec::as_slice).chain([ones.as_slice()]) {
                    let cnorm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let dot: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
                    prop_assert!(dot.abs() < 1e-8 * cnorm * rnorm.max(1e-300) + 1e-12);
                }
            }

            #[test]
            fn row_order_does_not_matter(seed in any::<u64>(), p in 1usize..5, rot in 1usize..14) {
                let rows = random_rows(seed, 15, p);
                let mut shuffled = rows.clone();
                shuffled.rotate_left(rot);
                shuffled.reverse();
                let a = ols_fit(&rows, true).unwrap();
                let b = ols_fit(&shuffled, true).unwrap();
                prop_assert!((a.intercept - b.intercept).abs() < 1e-10);
                for (x, y) in a.terms.iter().zip(&b.terms) {
                    prop_assert!((x.coefficient - y.coefficient).abs() < 1e-10);
                }
            }

            #[test]
            fn prediction_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
                let rows = random_rows(seed, 10, 3);
                let m = ols_fit(&rows, true).unwrap();
                let x = &rows[0].regressors;
                let y = &rows[1].regressors;
                let combo: IndexMap<String, f64> = x.iter().zip(y.values())
                    .map(|((k, xv), yv)| (k.clone(), a * xv + b * yv)).collect();
                let lhs = predict(&m, &combo, None).unwrap().ln_amount;
                let rhs = a * predict(&m, x, None).unwrap().ln_amount
                    + b * predict(&m, y, None).unwrap().ln_amount
                    - (a + b - 1.0) * m.intercept;
                prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
            }
        }
    }
}
