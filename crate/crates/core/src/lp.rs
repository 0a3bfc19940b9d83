//! Weighted L_p star discrepancy for even `p`, by expanding the `p`-th power
//! into sums over index tuples.

use crate::error::{Error, Result};
use crate::l2::ProductWeights;
use crate::par;
use crate::pointset::PointSet;
use crate::sum::CompensatedSum;

/// Limits for the tuple expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpLimits {
    pub max_p: u32,
    /// Cap on `d · Σ_ℓ n^ℓ` tuple-factor operations.
    pub budget: f64,
}

impl Default for LpLimits {
    fn default() -> Self {
        Self {
            max_p: 6,
            budget: 1e8,
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Sum over all `ℓ`-tuples of `∏_j (1 + γ_j (1 - max_k pw[i_k][j]) / q)`.
fn tuple_sum(pw: &[Vec<f64>], gamma: &[f64], q: f64, ell: usize) -> f64 {
    let n = pw.len();
    let d = gamma.len();
    let leaf = |m: &[f64]| -> f64 {
        m.iter()
            .zip(gamma)
            .map(|(&mj, &g)| 1.0 + g * (1.0 - mj) / q)
            .product()
    };
    if ell == 0 {
        return leaf(&vec![0.0; d]);
    }
    let rows = par::map_range(n, |first| {
        let mut s = CompensatedSum::new();
        // Running maxima, one vector per tuple position.
        let mut stack = vec![vec![0.0; d]; ell];
        stack[0].copy_from_slice(&pw[first]);
        let mut idx = vec![0usize; ell];
        let mut level = 1;
        loop {
            if level == ell {
                s.add(leaf(&stack[ell - 1]));
                // Advance the odometer.
                loop {
                    level -= 1;
                    if level == 0 {
                        return s;
                    }
                    idx[level] += 1;
                    if idx[level] < n {
                        break;
                    }
                    idx[level] = 0;
                }
            }
            let (lo, hi) = stack.split_at_mut(level);
            for ((m, &prev), &v) in hi[0].iter_mut().zip(&lo[level - 1]).zip(&pw[idx[level]]) {
                *m = prev.max(v);
            }
            level += 1;
        }
    });
    let mut s = CompensatedSum::new();
    for r in &rows {
        s.merge(r);
    }
    s.value()
}

/// `(d*_{p,γ}(X))^p` for even `p`, with the maximum over the empty tuple
/// taken as 0.
pub fn weighted_star_lp_pow(x: &PointSet, gamma: &ProductWeights, p: u32) -> Result<f64> {
    weighted_star_lp_pow_with(x, gamma, p, LpLimits::default())
}

pub fn weighted_star_lp_pow_with(
    x: &PointSet,
    gamma: &ProductWeights,
    p: u32,
    limits: LpLimits,
) -> Result<f64> {
    Error::check_dim(x.dim(), gamma.len())?;
    if p == 0 || p % 2 == 1 {
        return Err(Error::invalid(format!("p must be a positive even integer, got {p}")));
    }
    if p > limits.max_p {
        return Err(Error::invalid(format!("p={p} exceeds the cap {}", limits.max_p)));
    }
    let n = x.len();
    let work = x.dim() as f64 * (0..=p).map(|l| (n as f64).powi(l as i32)).sum::<f64>();
    Error::check_budget(work, limits.budget, "use fewer points or a smaller p")?;

    let mut total = CompensatedSum::new();
    for ell in 0..=p {
        let q = (p - ell + 1) as i32;
        let pw: Vec<Vec<f64>> = x
            .points()
            .map(|pt| pt.iter().map(|c| c.powi(q)).collect())
            .collect();
        let s = tuple_sum(&pw, gamma.as_slice(), q as f64, ell as usize);
        let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
        total.add(sign * binomial(p, ell) * s / (n as f64).powi(ell as i32));
    }
    Ok(total.value())
}
