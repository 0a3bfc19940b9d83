//! Guaranteed bounds from δ-covers and heuristic lower bounds.

mod cover;
mod genetic;
mod threshold;

pub use cover::{cover_bounds, cover_bounds_with_cap, DeltaCover, DEFAULT_COVER_CAP};
pub use genetic::{ga_lower_bound, GaConfig};
pub use threshold::{polynomial_sample, ta_basic, ta_improved, TaConfig};

use serde::{Deserialize, Serialize};

use crate::pointset::{box_counts, delta_bar_value, delta_value, BoxKind, PointSet};

/// Two-sided bound on the star discrepancy with the corner attaining the
/// lower end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lower: f64,
    pub upper: f64,
    pub witness: Vec<f64>,
    pub kind: BoxKind,
    pub method: String,
    pub seed: Option<u64>,
    /// Parameters that produced the bound, for echoing in reports.
    pub params: Vec<(String, String)>,
}

/// `max(δ(y), δ̄(y))` and which box attains it; the open box wins ties.
pub(crate) fn star_at(y: &[f64], x: &PointSet) -> (f64, BoxKind) {
    let (open, closed) = box_counts(y, x);
    let d = delta_value(y, open, x.len());
    let db = delta_bar_value(y, closed, x.len());
    if db > d {
        (db, BoxKind::Closed)
    } else {
        (d, BoxKind::Open)
    }
}

/// Value of the given box kind at `y`, computed the canonical way.
pub(crate) fn value_at(y: &[f64], x: &PointSet, kind: BoxKind) -> f64 {
    let (open, closed) = box_counts(y, x);
    match kind {
        BoxKind::Open => delta_value(y, open, x.len()),
        BoxKind::Closed => delta_bar_value(y, closed, x.len()),
    }
}
