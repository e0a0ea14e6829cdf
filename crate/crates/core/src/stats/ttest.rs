use serde::{Deserialize, Serialize};

use super::tdist::t_two_sided_p;
use crate::error::{Error, Result};

/// Outcome of a two-sample Welch t-test (two-sided).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_stat: f64,
    /// Welch–Satterthwaite degrees of freedom; usually not an integer.
    pub degrees_of_freedom: f64,
    pub p_value: f64,
}

impl TTestResult {
    /// `p <= alpha`, so that `alpha = 1` flags every comparison.
    pub fn significant_at(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

/// Mean, standard error of the mean, and size of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl SampleSummary {
    pub fn of(sample: &[f64]) -> Result<SampleSummary> {
        if sample.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "t-test samples need at least 2 values, got {}",
                sample.len()
            )));
        }
        let n = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok(SampleSummary {
            mean,
            std_error: (var / n).sqrt(),
            n: sample.len(),
        })
    }
}

pub fn welch_t_test(sample_a: &[f64], sample_b: &[f64]) -> Result<TTestResult> {
    welch_from_summaries(SampleSummary::of(sample_a)?, SampleSummary::of(sample_b)?)
}

/// Welch test from published means and standard errors.
pub fn welch_from_summaries(a: SampleSummary, b: SampleSummary) -> Result<TTestResult> {
    if a.n < 2 || b.n < 2 {
        return Err(Error::InvalidArgument("summaries need n >= 2".into()));
    }
    let va = a.std_error * a.std_error;
    let vb = b.std_error * b.std_error;
    let pooled = va + vb;
    if pooled <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let t_stat = (a.mean - b.mean) / pooled.sqrt();
    let df = pooled * pooled / (va * va / (a.n as f64 - 1.0) + vb * vb / (b.n as f64 - 1.0));
    Ok(TTestResult {
        t_stat,
        degrees_of_freedom: df,
        p_value: t_two_sided_p(t_stat, df),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fixture() {
        // t = -1 / sqrt(2/3), df = (2/3)^2 / (2 * (1/3)^2 / 2) = 4
        let r = welch_t_test(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!((r.t_stat - (-1.224_744_871)).abs() < 1e-6);
        assert!((r.degrees_of_freedom - 4.0).abs() < 1e-12);
        assert!((r.p_value - 0.2878).abs() < 1e-3);
        assert!(!r.significant_at(0.05));
    }

    #[test]
    fn identical_samples() {
        let r = welch_t_test(&[0.0, 0.5, 1.0, 1.0], &[0.0, 0.5, 1.0, 1.0]).unwrap();
        assert_eq!(r.t_stat, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_short_samples() {
        assert!(matches!(
            welch_t_test(&[1.0, 1.0], &[2.0, 2.0]),
            Err(Error::DegenerateSample)
        ));
        assert!(welch_t_test(&[1.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn summary_form_on_published_means() {
        // 3D printers (n = 78) vs smart watches (n = 49) on feedback management
        let printers = SampleSummary { mean: 0.01, std_error: 0.01, n: 78 };
        let watches = SampleSummary { mean: 0.16, std_error: 0.03, n: 49 };
        let r = welch_from_summaries(printers, watches).unwrap();
        assert!((r.t_stat.abs() - 4.743).abs() < 1e-3);
        assert!(r.significant_at(0.05));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn swapping_samples_negates_t(
                a in proptest::collection::vec(-10.0f64..10.0, 2..20),
                b in proptest::collection::vec(-10.0f64..10.0, 2..20),
            ) {
                let (Ok(x), Ok(y)) = (welch_t_test(&a, &b), welch_t_test(&b, &a)) else {
                    return Ok(());
                };
                prop_assert!((x.t_stat + y.t_stat).abs() <= 1e-12 * x.t_stat.abs().max(1.0));
                prop_assert!((x.p_value - y.p_value).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(&x.p_value));
            }

            #[test]
            fn t_is_scale_invariant(
                a in proptest::collection::vec(0.0f64..1.0, 3..15),
                b in proptest::collection::vec(0.0f64..1.0, 3..15),
                c in 0.01f64..100.0,
            ) {
                let Ok(x) = welch_t_test(&a, &b) else { return Ok(()); };
                let sa: Vec<f64> = a.iter().map(|v| v * c).collect();
                let sb: Vec<f64> = b.iter().map(|v| v * c).collect();
                let y = welch_t_test(&sa, &sb).unwrap();
                prop_assert!((x.t_stat - y.t_stat).abs() <= 1e-9 * x.t_stat.abs().max(1.0));
            }
        }
    }
}
