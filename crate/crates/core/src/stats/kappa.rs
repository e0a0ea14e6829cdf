//! Chance-corrected agreement between two raters on the None/Partial/Full scale.

use serde::{Deserialize, Serialize};

use crate::domain::Rating;
use crate::error::{Error, Result};

/// Minimum weighted kappa for the rating process to count as repeatable.
pub const REPEATABILITY_GATE: f64 = 0.80;

const K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Exact-match agreement only.
    Unweighted,
    /// `w_ij = 1 - |i - j| / (k - 1)`.
    Linear,
}

impl Weighting {
    fn weight(self, i: usize, j: usize) -> f64 {
        match self {
            Weighting::Unweighted => {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            }
            Weighting::Linear => 1.0 - (i.abs_diff(j) as f64) / (K - 1) as f64,
        }
    }
}

/// Cross-tabulation of two raters: `counts[rater_a][rater_b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub counts: [[u64; K]; K],
}

impl AgreementMatrix {
    pub fn from_ratings(rater_a: &[Rating], rater_b: &[Rating]) -> Result<AgreementMatrix> {
        if rater_a.len() != rater_b.len() {
            return Err(Error::InvalidArgument(format!(
                "raters scored different numbers of items ({} vs {})",
                rater_a.len(),
                rater_b.len()
            )));
        }
        let mut m = AgreementMatrix::default();
        for (a, b) in rater_a.iter().zip(rater_b) {
            m.counts[a.index()][b.index()] += 1;
        }
        Ok(m)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

pub fn cohen_kappa(m: &AgreementMatrix, weighting: Weighting) -> Result<f64> {
    let total = m.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let n = total as f64;
    let mut row = [0.0; K];
    let mut col = [0.0; K];
    for i in 0..K {
        for j in 0..K {
            let p = m.counts[i][j] as f64 / n;
            row[i] += p;
            col[j] += p;
        }
    }
    let mut observed = 0.0;
    let mut expected = 0.0;
    for i in 0..K {
        for j in 0..K {
            let w = weighting.weight(i, j);
            observed += w * m.counts[i][j] as f64 / n;
            expected += w * row[i] * col[j];
        }
    }
    if (1.0 - expected).abs() < 1e-15 {
        // Both raters put everything in one category; agreement is total.
        return Ok(if (1.0 - observed).abs() < 1e-15 { 1.0 } else { 0.0 });
    }
    Ok((observed - expected) / (1.0 - expected))
}

/// True when the agreement clears [`REPEATABILITY_GATE`].
pub fn passes_repeatability_gate(kappa: f64) -> bool {
    kappa >= REPEATABILITY_GATE
}

#[cfg(test)]
mod tests {
    use super::*;
    use Rating::*;

    #[test]
    fn linear_fixture() {
        // Po = 0.875, Pe = 0.5625 by hand
        let m = AgreementMatrix::from_ratings(&[None, Partial, Full, Full], &[None, Partial, Full, Partial])
            .unwrap();
        let k = cohen_kappa(&m, Weighting::Linear).unwrap();
        assert!((k - 0.714_285_714).abs() < 1e-9);
        assert!(!passes_repeatability_gate(k));
        // unweighted: Po = 0.75, Pe = 0.25*0.25 + 0.25*0.5 + 0.5*0.25 = 0.3125
        let u = cohen_kappa(&m, Weighting::Unweighted).unwrap();
        assert!((u - (0.75 - 0.3125) / 0.6875).abs() < 1e-12);
    }

    #[test]
    fn perfect_agreement() {
        let a = [None, Partial, Full, Full, None];
        let m = AgreementMatrix::from_ratings(&a, &a).unwrap();
        for w in [Weighting::Linear, Weighting::Unweighted] {
            assert!((cohen_kappa(&m, w).unwrap() - 1.0).abs() < 1e-12);
        }
        let single = AgreementMatrix::from_ratings(&[Full, Full], &[Full, Full]).unwrap();
        assert_eq!(cohen_kappa(&single, Weighting::Linear).unwrap(), 1.0);
        assert!(passes_repeatability_gate(1.0));
    }

    #[test]
    fn independent_marginals_give_zero() {
        // counts = row_i * col_j with rows (1, 2, 3) and cols (2, 1, 1)
        let rows = [1u64, 2, 3];
        let cols = [2u64, 1, 1];
        let mut m = AgreementMatrix::default();
        for i in 0..3 {
            for j in 0..3 {
                m.counts[i][j] = rows[i] * cols[j];
            }
        }
        for w in [Weighting::Linear, Weighting::Unweighted] {
            assert!(cohen_kappa(&m, w).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn empty_and_mismatched() {
        assert!(matches!(
            cohen_kappa(&AgreementMatrix::default(), Weighting::Linear),
            Err(Error::EmptyMatrix)
        ));
        assert!(AgreementMatrix::from_ratings(&[None], &[]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn kappa_never_exceeds_one(counts in proptest::array::uniform9(0u64..20)) {
                let mut m = AgreementMatrix::default();
                for (k, c) in counts.iter().enumerate() {
                    m.counts[k / 3][k % 3] = *c;
                }
                prop_assume!(m.total() > 0);
                for w in [Weighting::Linear, Weighting::Unweighted] {
                    let k = cohen_kappa(&m, w).unwrap();
                    prop_assert!(k <= 1.0 + 1e-12);
                    let disagreement: u64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j)))
                        .filter(|&(i, j)| i != j)
                        .map(|(i, j)| m.counts[i][j])
                        .sum();
                    if disagreement == 0 {
                        prop_assert!((k - 1.0).abs() < 1e-12);
                    } else {
                        prop_assert!(k < 1.0);
                    }
                }
            }
        }
    }
}
