//! Householder QR for tall, column-major least-squares problems.

use crate::error::{Error, Result};

/// Relative size below which a column's residual after projection onto the
/// preceding columns counts as linearly dependent.
const RANK_TOLERANCE: f64 = 1e-10;

/// Packed Householder factorization of an `n x m` matrix (`n > m`).
pub(crate) struct Qr {
    n: usize,
    m: usize,
    /// Column-major; the upper triangle holds R, below it the reflectors.
    a: Vec<f64>,
    /// Diagonal of R.
    r_diag: Vec<f64>,
}

impl Qr {
    /// Factor the columns. `names` is only used to label a dependent column.
    pub fn factor(columns: &[&[f64]], n: usize, names: &dyn Fn(usize) -> String) -> Result<Qr> {
        let m = columns.len();
        let mut a = Vec::with_capacity(n * m);
        for c in columns {
            debug_assert_eq!(c.len(), n);
            a.extend_from_slice(c);
        }
        let mut r_diag = vec![0.0; m];
        for j in 0..m {
            let original = norm(&columns[j][..]);
            let col = &mut a[j * n..(j + 1) * n];
            let tail_norm = norm(&col[j..]);
            if original == 0.0 || tail_norm <= RANK_TOLERANCE * original {
                return Err(Error::RankDeficient { column: names(j) });
            }
            let alpha = if col[j] > 0.0 { -tail_norm } else { tail_norm };
            // v = x - alpha e1, stored in place and normalised so v[0] = 1
            let v0 = col[j] - alpha;
            for x in col[j + 1..].iter_mut() {
                *x /= v0;
            }
            col[j] = 1.0;
            let tau = -v0 / alpha;
            r_diag[j] = alpha;
            let (head, rest) = a.split_at_mut((j + 1) * n);
            let v = &head[j * n + j..(j + 1) * n];
            for k in 0..(m - j - 1) {
                let target = &mut rest[k * n + j..(k + 1) * n];
                let dot: f64 = v.iter().zip(target.iter()).map(|(p, q)| p * q).sum();
                let s = tau * dot;
                for (t, vi) in target.iter_mut().zip(v) {
                    *t -= s * vi;
                }
            }
            // keep tau in the diagonal slot of the reflector column
            a[j * n + j] = tau;
        }
        Ok(Qr { n, m, a, r_diag })
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.r_diag[i]
        } else {
            self.a[j * self.n + i]
        }
    }

    /// Apply `Q^T` to `y` in place.
    fn apply_qt(&self, y: &mut [f64]) {
        let n = self.n;
        for j in 0..self.m {
            let col = &self.a[j * n..(j + 1) * n];
            let tau = col[j];
            let mut dot = y[j];
            for i in j + 1..n {
                dot += col[i] * y[i];
            }
            let s = tau * dot;
            y[j] -= s;
            for i in j + 1..n {
                y[i] -= s * col[i];
            }
        }
    }

    /// Least-squares coefficients for response `y`.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let mut beta = vec![0.0; self.m];
        for i in (0..self.m).rev() {
            let mut s = qty[i];
            for k in i + 1..self.m {
                s -= self.r(i, k) * beta[k];
            }
            beta[i] = s / self.r(i, i);
        }
        beta
    }

    /// `(X^T X)^{-1} = R^{-1} R^{-T}`, row-major `m x m`.
    pub fn unscaled_covariance(&self) -> Vec<Vec<f64>> {
        let m = self.m;
        // upper-triangular inverse of R, column by column
        let mut rinv = vec![vec![0.0; m]; m];
        for j in 0..m {
            rinv[j][j] = 1.0 / self.r(j, j);
            for i in (0..j).rev() {
                let mut s = 0.0;
                for k in i + 1..=j {
                    s += self.r(i, k) * rinv[k][j];
                }
                rinv[i][j] = -s / self.r(i, i);
            }
        }
        let mut cov = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let s: f64 = (j..m).map(|k| rinv[i][k] * rinv[j][k]).sum();
                cov[i][j] = s;
                cov[j][i] = s;
            }
        }
        cov
    }
}

fn norm(x: &[f64]) -> f64 {
    // scaled to avoid overflow on large counts
    let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}
