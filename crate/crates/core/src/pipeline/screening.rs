use serde::{Deserialize, Serialize};

use crate::domain::{Category, Dataset, Platform, QuestionId};
use crate::error::{Error, Result};
use crate::stats::{welch_t_test, TTestResult};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Welch comparison of one factor between two groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub mean_a: f64,
    pub mean_b: f64,
    pub test: TTestResult,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorScreen {
    pub question: QuestionId,
    /// Indiegogo (a) against Kickstarter (b).
    pub by_platform: GroupComparison,
    /// 3D printers (a) against smart watches (b).
    pub by_category: GroupComparison,
    pub in_pool: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReport {
    pub alpha: f64,
    pub factors: Vec<FactorScreen>,
    /// Factors with no significant difference on either comparison.
    pub candidate_pool: Vec<QuestionId>,
}

fn compare(a: &[f64], b: &[f64], alpha: f64) -> Result<GroupComparison> {
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (mean_a, mean_b) = (mean(a), mean(b));
    let test = match welch_t_test(a, b) {
        Ok(t) => t,
        // both groups constant: equal values are no difference, unequal ones are certain
        Err(Error::DegenerateSample) => TTestResult {
            t_stat: if mean_a == mean_b {
                0.0
            } else {
                (mean_a - mean_b).signum() * f64::INFINITY
            },
            degrees_of_freedom: (a.len() + b.len() - 2) as f64,
            p_value: if mean_a == mean_b { 1.0 } else { 0.0 },
        },
        Err(e) => return Err(e),
    };
    Ok(GroupComparison {
        mean_a,
        mean_b,
        significant: test.significant_at(alpha),
        test,
    })
}

/// Compare each factor's ratings across platforms and across categories.
pub fn screen_factors(
    dataset: &Dataset,
    alpha: f64,
    factors: &[QuestionId],
) -> Result<ScreeningReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} must lie in (0, 1]")));
    }
    let records = dataset.records();
    let igg: Vec<usize> = (0..records.len()).filter(|&i| records[i].platform == Platform::Indiegogo).collect();
    let ks: Vec<usize> = (0..records.len()).filter(|&i| records[i].platform == Platform::Kickstarter).collect();
    let printers: Vec<usize> = (0..records.len()).filter(|&i| records[i].category == Category::ThreeDPrinter).collect();
    let watches: Vec<usize> = (0..records.len()).filter(|&i| records[i].category == Category::SmartWatch).collect();
    if igg.len() < 2 || ks.len() < 2 {
        return Err(Error::SingleGroup("platform"));
    }
    if printers.len() < 2 || watches.len() < 2 {
        return Err(Error::SingleGroup("category"));
    }

    let mut out = Vec::with_capacity(factors.len());
    for &q in factors {
        let scores = |idx: &[usize]| idx.iter().map(|&i| records[i].rating(q).score()).collect::<Vec<f64>>();
        let by_platform = compare(&scores(&igg), &scores(&ks), alpha)?;
        let by_category = compare(&scores(&printers), &scores(&watches), alpha)?;
        out.push(FactorScreen {
            question: q,
            in_pool: !by_platform.significant && !by_category.significant,
            by_platform,
            by_category,
        });
    }
    let candidate_pool = out.iter().filter(|f| f.in_pool).map(|f| f.question).collect();
    Ok(ScreeningReport {
        alpha,
        factors: out,
        candidate_pool,
    })
}
