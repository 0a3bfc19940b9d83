//! Exact L2-type discrepancies.
//!
//! All functions return the *square* of the discrepancy, the integral of
//! the squared local discrepancy. [`root`] converts.

mod heinrich;

pub use heinrich::{heinrich_d, star_l2_sq_fast, HeinrichArray};

use crate::error::{Error, Result};
use crate::par;
use crate::pointset::PointSet;
use crate::sum::CompensatedSum;

/// Nonincreasing nonnegative product weights `γ_1 ≥ … ≥ γ_d ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductWeights(Vec<f64>);

impl ProductWeights {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::Empty("product weights"));
        }
        if let Some(g) = gamma.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::invalid(format!("weight {g} must be finite and >= 0")));
        }
        if gamma.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid(format!(
                "weights must be nonincreasing: {gamma:?}"
            )));
        }
        Ok(Self(gamma))
    }

    pub fn ones(d: usize) -> Self {
        Self(vec![1.0; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `γ_u = ∏_{j ∈ u} γ_j`.
    pub fn subset_weight(&self, u: &[usize]) -> f64 {
        u.iter().map(|&j| self.0[j]).product()
    }

    /// Weights `γ_j^2`, still nonincreasing.
    pub fn squared(&self) -> Self {
        Self(self.0.iter().map(|g| g * g).collect())
    }
}

/// Square root of a squared discrepancy, clamping tiny negative rounding.
pub fn root(sq: f64) -> f64 {
    sq.max(0.0).sqrt()
}

/// `Σ_i diag(x_i) + 2 Σ_{i<j} off(x_i, x_j)`, compensated and in a fixed
/// order. Rows run in parallel.
pub(crate) fn symmetric_pair_sum<D, O>(x: &PointSet, diag: D, off: O) -> f64
where
    D: Fn(&[f64]) -> f64 + Sync + Send,
    O: Fn(&[f64], &[f64]) -> f64 + Sync + Send,
{
    let n = x.len();
    let rows = par::map_range(n, |i| {
        let pi = x.point(i);
        let mut s = CompensatedSum::new();
        for j in i + 1..n {
            s.add(off(pi, x.point(j)));
        }
        (diag(pi), s)
    });
    let mut off_sum = CompensatedSum::new();
    let mut diag_sum = CompensatedSum::new();
    for (dv, s) in &rows {
        diag_sum.add(*dv);
        off_sum.merge(s);
    }
    let mut total = diag_sum;
    total.add(2.0 * off_sum.value());
    total.value()
}

fn min_complement_product(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&u, &v)| 1.0 - u.max(v))
        .product()
}

/// Squared L2 star discrepancy by Warnock's formula, `O(d n^2)`.
pub fn warnock_star_l2_sq(x: &PointSet) -> f64 {
    let n = x.len() as f64;
    let d = x.dim() as i32;
    let linear: f64 = x
        .points()
        .map(|p| p.iter().map(|c| 1.0 - c * c).product::<f64>())
        .collect::<CompensatedSum>()
        .value();
    let pairs = symmetric_pair_sum(x, |p| min_complement_product(p, p), min_complement_product);
    let mut s = CompensatedSum::new();
    s.add(3f64.powi(-d));
    s.add(-(2f64.powi(1 - d)) / n * linear);
    s.add(pairs / (n * n));
    s.value()
}

/// Warnock's formula with every summand centred at its expectation under
/// uniform random points, then compensated summation.
pub fn warnock_star_l2_sq_stable(x: &PointSet) -> f64 {
    let n = x.len() as f64;
    let d = x.dim() as i32;
    let third = 3f64.powi(-d);
    let half = 2f64.powi(-d);
    let two_thirds = (2.0f64 / 3.0).powi(d);
    let linear = x
        .points()
        .map(|p| p.iter().map(|c| 1.0 - c * c).product::<f64>() - two_thirds)
        .collect::<CompensatedSum>()
        .value();
    let pairs = symmetric_pair_sum(
        x,
        |p| p.iter().map(|c| 1.0 - c).product::<f64>() - half,
        |a, b| min_complement_product(a, b) - third,
    );
    let mut s = CompensatedSum::new();
    s.add((half - third) / n);
    s.add(-(2f64.powi(1 - d)) / n * linear);
    s.add(pairs / (n * n));
    s.value()
}

/// Squared extreme L2 discrepancy, over boxes `[y,z)` with `y ≤ z`.
pub fn extreme_l2_sq(x: &PointSet) -> f64 {
    let n = x.len() as f64;
    let d = x.dim() as i32;
    let linear = x
        .points()
        .map(|p| {
            p.iter()
                .map(|&c| 1.0 - c.powi(3) - (1.0 - c).powi(3))
                .product::<f64>()
        })
        .collect::<CompensatedSum>()
        .value();
    let kernel = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(&u, &v)| u.min(v) * (1.0 - u.max(v)))
            .product()
    };
    let pairs = symmetric_pair_sum(x, |p| kernel(p, p), kernel);
    let mut s = CompensatedSum::new();
    s.add(12f64.powi(-d));
    s.add(-2.0 * 6f64.powi(-d) / n * linear);
    s.add(pairs / (n * n));
    s.value()
}

/// Squared weighted L2 star discrepancy for product weights.
pub fn weighted_star_l2_sq(x: &PointSet, gamma: &ProductWeights) -> Result<f64> {
    Error::check_dim(x.dim(), gamma.len())?;
    let g2: Vec<f64> = gamma.as_slice().iter().map(|g| g * g).collect();
    let n = x.len() as f64;
    let constant: f64 = g2.iter().map(|g| 1.0 + g / 3.0).product();
    let linear = x
        .points()
        .map(|p| {
            p.iter()
                .zip(&g2)
                .map(|(&c, &g)| 1.0 + g * (1.0 - c * c) / 2.0)
                .product::<f64>()
        })
        .collect::<CompensatedSum>()
        .value();
    let kernel = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(&g2)
            .map(|((&u, &v), &g)| 1.0 + g * (1.0 - u.max(v)))
            .product()
    };
    let pairs = symmetric_pair_sum(x, |p| kernel(p, p), kernel);
    let mut s = CompensatedSum::new();
    s.add(constant);
    s.add(-2.0 / n * linear);
    s.add(pairs / (n * n));
    Ok(s.value())
}

/// Squared modified (Hickernell) L2 discrepancy: unit product weights.
pub fn modified_l2_sq(x: &PointSet) -> f64 {
    weighted_star_l2_sq(x, &ProductWeights::ones(x.dim())).expect("dimensions agree")
}
