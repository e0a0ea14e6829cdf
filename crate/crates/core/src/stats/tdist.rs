//! Student-t distribution via the regularized incomplete beta function.

use std::f64::consts::PI;

use super::special::{beta_reg_split, ln_gamma};

/// Upper tail `P(T > t)` for `t >= 0`; accurate far into the tail.
fn upper_tail(t: f64, df: f64) -> f64 {
    let t2 = t * t;
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    0.5 * beta_reg_split(0.5 * df, 0.5, x, y)
}

/// Cumulative distribution function of Student's t with `df` degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 1.0;
    }
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    if t >= 0.0 {
        1.0 - upper_tail(t, df)
    } else {
        upper_tail(-t, df)
    }
}

/// Two-sided p-value `P(|T| >= |t|)`.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    (2.0 * upper_tail(t.abs(), df)).min(1.0)
}

pub fn t_pdf(t: f64, df: f64) -> f64 {
    let ln_norm = ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * PI).ln();
    (ln_norm - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp()
}

/// Inverse CDF of Student's t.
///
/// Solves `upper_tail(t) = min(p, 1 - p)` on `t >= 0` by safeguarded Newton
/// iteration inside a shrinking bracket, then applies the sign by symmetry.
pub fn t_quantile(prob: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if prob.is_nan() || !(0.0..=1.0).contains(&prob) {
        return f64::NAN;
    }
    if prob == 0.0 {
        return f64::NEG_INFINITY;
    }
    if prob == 1.0 {
        return f64::INFINITY;
    }
    if prob == 0.5 {
        return 0.0;
    }
    let tail = prob.min(1.0 - prob);
    let magnitude = solve_upper_tail(tail, df);
    if prob > 0.5 {
        magnitude
    } else {
        -magnitude
    }
}

fn solve_upper_tail(tail: f64, df: f64) -> f64 {
    // upper_tail is strictly decreasing on [0, inf): find a bracket first.
    let mut lo = 0.0;
    let mut hi = 1.0;
    while upper_tail(hi, df) > tail {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = upper_tail(t, df) - tail;
        if f == 0.0 {
            return t;
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        // d/dt upper_tail = -pdf
        let step = f / t_pdf(t, df);
        if step.abs() <= 1e-14 * t {
            return t + step;
        }
        let newton = t + step;
        t = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    t
}
