//! Small dense solvers.

use num_complex::Complex64;

use super::scalar::Field;
use crate::error::{P1Error, Result};

/// Condition estimates above this make the Vandermonde paths refuse to answer.
pub const COND_LIMIT: f64 = 1e12;

/// Partial-pivot LU solve of `a·x = b` (row-major `a`). Pivots on the primal value.
pub fn lu_solve<S: Field>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Result<Vec<S>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].value().norm().total_cmp(&a[j][k].value().norm()))
            .unwrap();
        if a[piv][k].value().norm() == 0.0 {
            return Err(P1Error::IllConditioned { cond: f64::INFINITY, limit: COND_LIMIT });
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let t = f * a[k][j];
                a[i][j] -= t;
            }
            let t = f * b[k];
            b[i] -= t;
        }
    }
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}

/// Solves `l·x = b` for lower-triangular `l` by forward substitution.
pub fn forward_substitution<S: Field>(l: &[Vec<S>], b: &[S]) -> Vec<S> {
    let n = b.len();
    let mut x = vec![S::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for j in 0..i {
            s -= l[i][j] * x[j];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// `‖a‖₁·‖a⁻¹‖₁` on the primal values, the inverse built column by column.
pub fn condition_estimate<S: Field>(a: &[Vec<S>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    let av: Vec<Vec<Complex64>> = a.iter().map(|r| r.iter().map(|x| x.value()).collect()).collect();
    let norm1 = |m: &[Vec<Complex64>]| {
        (0..n).map(|j| (0..n).map(|i| m[i][j].norm()).sum::<f64>()).fold(0.0, f64::max)
    };
    let mut inv = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        match lu_solve(av.clone(), e) {
            Ok(col) => {
                for i in 0..n {
                    inv[i][j] = col[i];
                }
            }
            Err(_) => return f64::INFINITY,
        }
    }
    let c = norm1(&av) * norm1(&inv);
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

/// Errors with `IllConditioned` above `COND_LIMIT`.
pub fn guard_condition<S: Field>(a: &[Vec<S>]) -> Result<()> {
    let cond = condition_estimate(a);
    if cond > COND_LIMIT {
        Err(P1Error::IllConditioned { cond, limit: COND_LIMIT })
    } else {
        Ok(())
    }
}
