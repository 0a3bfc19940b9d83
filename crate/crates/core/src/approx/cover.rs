//! Uniform-grid δ-covers.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exact::{scan, Lattice, Nu};
use crate::pointset::PointSet;

use super::{value_at, BoundResult};

/// Default cap on `|Γ| · d`.
pub const DEFAULT_COVER_CAP: f64 = 1e9;

/// The grid `{0, δ/d, 2δ/d, …, 1}^d` without the origin. For every
/// `y ∈ [0,1]^d` the cell containing `y` gives a bracket `x ≤ y ≤ z` with
/// `V_z - V_x ≤ Σ_j (z_j - x_j) ≤ δ`; the lower end may be the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaCover {
    pub delta: f64,
    pub dim: usize,
    /// Grid values per axis, increasing from 0 to 1.
    pub axis: Vec<f64>,
}

impl DeltaCover {
    pub fn new(dim: usize, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::invalid(format!("δ must lie in (0,1], got {delta}")));
        }
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let step = delta / dim as f64;
        let mut axis: Vec<f64> = Vec::new();
        let mut k = 0u64;
        loop {
            let v = k as f64 * step;
            if v >= 1.0 {
                break;
            }
            axis.push(v);
            k += 1;
        }
        axis.push(1.0);
        Ok(Self { delta, dim, axis })
    }

    /// Number of corners, the origin excluded.
    pub fn size(&self) -> f64 {
        (self.axis.len() as f64).powi(self.dim as i32) - 1.0
    }

    /// Known upper bound on the smallest δ-cover,
    /// `2^d (2πd)^{-1/2} e^d (1/δ + 1)^d`, for comparison with [`Self::size`].
    pub fn size_bound(&self) -> f64 {
        let d = self.dim as f64;
        2f64.powf(d) * (2.0 * PI * d).powf(-0.5) * d.exp() * (1.0 / self.delta + 1.0).powf(d)
    }

    /// Bracket `(x, z)` around `y` taken from the grid.
    pub fn bracket(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut lo = Vec::with_capacity(y.len());
        let mut hi = Vec::with_capacity(y.len());
        for &t in y {
            let above = self.axis.partition_point(|&g| g < t);
            let at_or_below = self.axis.partition_point(|&g| g <= t);
            lo.push(self.axis[at_or_below.saturating_sub(1)]);
            hi.push(self.axis[above.min(self.axis.len() - 1)]);
        }
        (lo, hi)
    }

    /// All corners except the origin, in lexicographic order. Intended for
    /// small covers.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let m = self.axis.len();
        let total = m.pow(self.dim as u32);
        (1..total)
            .map(|mut code| {
                let mut y = vec![0.0; self.dim];
                for j in (0..self.dim).rev() {
                    y[j] = self.axis[code % m];
                    code /= m;
                }
                y
            })
            .collect()
    }
}

/// `lower = max_{y ∈ Γ} max(δ(y), δ̄(y)) ≤ d*_∞(X) ≤ lower + δ`.
pub fn cover_bounds(x: &PointSet, delta: f64) -> Result<BoundResult> {
    cover_bounds_with_cap(x, delta, DEFAULT_COVER_CAP)
}

pub fn cover_bounds_with_cap(x: &PointSet, delta: f64, cap: f64) -> Result<BoundResult> {
    let cover = DeltaCover::new(x.dim(), delta)?;
    let work = cover.size() * x.dim() as f64;
    Error::check_budget(work, cap, "choose a larger δ")?;
    log::debug!(
        "δ-cover with {} corners, known bound {:.3e}",
        cover.size(),
        cover.size_bound()
    );
    let lat = Lattice {
        lists: vec![cover.axis.clone(); x.dim()],
        closed_len: vec![cover.axis.len(); x.dim()],
    };
    let best = scan(
        Nu {
            x,
            weights: None,
            g: None,
        },
        &lat,
    );
    let lower = value_at(&best.corner, x, best.kind);
    Ok(BoundResult {
        lower,
        upper: lower + delta,
        witness: best.corner,
        kind: best.kind,
        method: "cover".into(),
        seed: None,
        params: vec![
            ("delta".into(), delta.to_string()),
            ("cover_size".into(), cover.size().to_string()),
        ],
    })
}
