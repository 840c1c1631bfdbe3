//! Lawson-Hanson active-set nonnegative least squares.

use nalgebra::{DMatrix, DVector};

const TOL: f64 = 1e-10;

/// `argmin ||A x - b||^2` subject to `x >= 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;
    for _ in 0..max_outer {
        let grad = a.transpose() * (b - a * &x);
        let Some(j) = (0..n)
            .filter(|&j| !passive[j] && grad[j] > TOL)
            .max_by(|&p, &q| grad[p].total_cmp(&grad[q]))
        else {
            break;
        };
        passive[j] = true;
        loop {
            let z = solve_passive(a, b, &passive);
            if (0..n).all(|i| !passive[i] || z[i] > TOL) {
                x = z;
                break;
            }
            let alpha = (0..n)
                .filter(|&i| passive[i] && z[i] <= TOL)
                .map(|i| x[i] / (x[i] - z[i]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= TOL {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    x
}

/// Unconstrained least squares on the passive columns, zero elsewhere.
fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let sub = a.select_columns(&cols);
    let sol = sub
        .svd(true, true)
        .solve(b, 1e-12)
        .expect("both singular vector sets were computed");
    let mut z = DVector::zeros(passive.len());
    for (k, &c) in cols.iter().enumerate() {
        z[c] = sol[k];
    }
    z
}
