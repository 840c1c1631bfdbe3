//! Dense two-phase simplex with Bland's rule, for the small continuous
//! subproblems of the exact solver. Variables are nonnegative.

use super::lp::Sense;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// A constraint `coefs . x (sense) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost . x` over the current basis; columns with
    /// `allowed[c] == false` never enter. Returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> bool {
        loop {
            let reduced = |c: usize| -> f64 {
                cost[c]
                    - self
                        .basis
                        .iter()
                        .zip(&self.a)
                        .map(|(&b, row)| cost[b] * row[c])
                        .sum::<f64>()
            };
            let Some(enter) = (0..self.cols).find(|&c| allowed[c] && reduced(c) < -EPS) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if row[enter] > EPS {
                    let ratio = row[self.cols] / row[enter];
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - EPS
                                || (ratio <= best + EPS && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter);
        }
    }
}

/// Minimizes `c . x` subject to `constraints` and `x >= 0`.
pub fn minimize(c: &[f64], constraints: &[Constraint]) -> LpOutcome {
    let n = c.len();
    let m = constraints.len();
    let slack_count = constraints.iter().filter(|k| k.sense != Sense::Eq).count();
    let art_start = n + slack_count;
    let cols = art_start + m;
    let mut a = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let mut slack = n;
    for (i, k) in constraints.iter().enumerate() {
        let flip = if k.rhs < 0.0 { -1.0 } else { 1.0 };
        for (j, &v) in k.coefs.iter().enumerate() {
            a[i][j] = flip * v;
        }
        a[i][cols] = flip * k.rhs;
        let sense = match (k.sense, flip < 0.0) {
            (Sense::Le, true) => Sense::Ge,
            (Sense::Ge, true) => Sense::Le,
            (s, _) => s,
        };
        match sense {
            Sense::Le => {
                a[i][slack] = 1.0;
                basis[i] = slack;
                slack += 1;
            }
            Sense::Ge => {
                a[i][slack] = -1.0;
                slack += 1;
                a[i][art_start + i] = 1.0;
                basis[i] = art_start + i;
            }
            Sense::Eq => {
                a[i][art_start + i] = 1.0;
                basis[i] = art_start + i;
            }
        }
    }
    let mut t = Tableau { a, basis, cols };
    let mut phase1 = vec![0.0; cols];
    for v in &mut phase1[art_start..] {
        *v = 1.0;
    }
    let all = vec![true; cols];
    t.optimize(&phase1, &all);
    let infeasibility: f64 = t
        .basis
        .iter()
        .zip(&t.a)
        .filter(|(&b, _)| b >= art_start)
        .map(|(_, row)| row[cols])
        .sum();
    if infeasibility > 1e-7 {
        return LpOutcome::Infeasible;
    }
    for r in 0..m {
        if t.basis[r] >= art_start {
            if let Some(c) = (0..art_start).find(|&c| t.a[r][c].abs() > EPS) {
                t.pivot(r, c);
            }
        }
    }
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(c);
    let mut allowed = vec![true; cols];
    for v in &mut allowed[art_start..] {
        *v = false;
    }
    if !t.optimize(&cost, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.a[r][cols];
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, value }
}
