//! Dense two-phase simplex with Bland's rule.

use crate::error::{Error, Result};

const EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

/// Optimal point and value of `min cᵀx` subject to `Ax = b`, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    /// `rows × (cols + 1)`, right-hand side last.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in &mut self.t[r] {
            *v /= p;
        }
        let row = self.t[r].clone();
        for (i, other) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = other[c];
            if f != 0.0 {
                for (v, &w) in other.iter_mut().zip(&row) {
                    *v -= f * w;
                }
                other[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of `cost` for the current basis.
    fn reduced(&self, cost: &[f64]) -> Vec<f64> {
        let mut red = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (j, v) in red.iter_mut().enumerate() {
                    *v -= cb * self.t[r][j];
                }
            }
        }
        red
    }

    /// Minimizes `cost` over columns `< allowed`; `Ok(false)` means unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        let mut red = self.reduced(cost);
        for _ in 0..MAX_PIVOTS {
            let Some(enter) = (0..allowed).find(|&j| red[j] < -EPS) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.t.len() {
                let a = self.t[r][enter];
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - EPS
                                || (ratio <= lratio + EPS && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, enter);
            let f = red[enter];
            for (j, v) in red.iter_mut().enumerate() {
                *v -= f * self.t[r][j];
            }
            red[enter] = 0.0;
        }
        Err(Error::Numeric(format!("simplex did not converge in {MAX_PIVOTS} pivots")))
    }
}

/// Solves `min cᵀx` subject to `Ax = b`, `x ≥ 0` with a phase of
/// artificial variables followed by the original objective.
pub fn minimize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("constraint matrix shape does not match"));
    }
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut r: Vec<f64> = row.iter().map(|v| sign * v).collect();
        r.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
        r.push(sign * b[i]);
        t.push(r);
    }
    let mut tab = Tableau {
        t,
        basis: (n..cols).collect(),
        cols,
    };

    let mut phase1 = vec![0.0; cols];
    phase1[n..].fill(1.0);
    tab.optimize(&phase1, cols)?;
    let infeas: f64 = (0..m)
        .filter(|&r| tab.basis[r] >= n)
        .map(|r| tab.rhs(r))
        .sum();
    let scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    if infeas > 1e-9 * scale {
        return Err(Error::Numeric(format!("linear program is infeasible (residual {infeas:.3e})")));
    }

    let mut r = 0;
    while r < tab.t.len() {
        if tab.basis[r] >= n {
            match (0..n).find(|&j| tab.t[r][j].abs() > EPS) {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.t.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut cost = c.to_vec();
    cost.resize(cols, 0.0);
    if !tab.optimize(&cost, n)? {
        return Err(Error::Numeric("linear program is unbounded".into()));
    }
    let mut x = vec![0.0; n];
    for (r, &bvar) in tab.basis.iter().enumerate() {
        if bvar < n {
            x[bvar] = tab.rhs(r);
        }
    }
    let objective = x.iter().zip(c).map(|(v, w)| v * w).sum();
    Ok(LpSolution { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_program() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]];
        let s = minimize(&a, &[4.0, 6.0], &[-1.0, -1.0, 0.0, 0.0]).unwrap();
        assert!((s.x[0] - 1.6).abs() < 1e-12);
        assert!((s.x[1] - 1.2).abs() < 1e-12);
        assert!((s.objective + 2.8).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // x + y = 1 twice, -x = -0.25
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![-1.0, 0.0]];
        let s = minimize(&a, &[1.0, 1.0, -0.25], &[0.0, 1.0]).unwrap();
        assert!((s.x[0] - 0.25).abs() < 1e-12);
        assert!((s.x[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![1.0, 1.0]];
        assert!(minimize(&a, &[-1.0], &[0.0, 0.0]).is_err());
        let a = vec![vec![1.0, -1.0]];
        assert!(minimize(&a, &[1.0], &[-1.0, 0.0]).is_err());
    }

    #[test]
    fn degenerate_program_terminates() {
        // Classic cycling example under the largest-coefficient rule.
        let a = vec![
            vec![0.5, -5.5, -2.5, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -1.5, -0.5, 1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let c = [-10.0, 57.0, 9.0, 24.0, 0.0, 0.0, 0.0];
        let s = minimize(&a, &[0.0, 0.0, 1.0], &c).unwrap();
        assert!((s.objective + 1.0).abs() < 1e-12);
    }
}
