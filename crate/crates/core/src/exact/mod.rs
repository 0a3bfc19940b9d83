//! Exact star discrepancy.

mod dem;
mod grid;
mod low_dim;

pub use dem::star_dem;
pub use grid::{star_grid_enum, star_grid_enum_with, MarginalCdf};
pub use low_dim::{star_1d, star_2d, star_3d};

pub(crate) use grid::{scan, Best, Lattice, Nu};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::{box_counts, delta_bar_value, delta_value, BoxKind, PointSet};

/// Default work budget for [`star_exact`], in elementary box evaluations.
pub const DEFAULT_BUDGET: f64 = 1e10;

/// Which exact algorithm produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(rename = "1d")]
    OneD,
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "3d")]
    ThreeD,
    Grid,
    Dem,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::OneD => "1d",
            Method::TwoD => "2d",
            Method::ThreeD => "3d",
            Method::Grid => "grid",
            Method::Dem => "dem",
        }
    }
}

/// Star discrepancy with the corner that attains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarResult {
    pub value: f64,
    pub witness: Vec<f64>,
    pub kind: BoxKind,
    pub method: Method,
}

/// Scores the witness the canonical way, so that recomputing the local
/// discrepancy at the witness reproduces the value bit for bit.
pub(crate) fn finish(x: &PointSet, witness: Vec<f64>, kind: BoxKind, method: Method) -> StarResult {
    let (open, closed) = box_counts(&witness, x);
    let value = match kind {
        BoxKind::Open => delta_value(&witness, open, x.len()),
        BoxKind::Closed => delta_bar_value(&witness, closed, x.len()),
    };
    StarResult {
        value,
        witness,
        kind,
        method,
    }
}

/// Predicted elementary operations for the algorithm `star_exact` picks.
pub fn exact_cost(n: usize, d: usize) -> f64 {
    let n = n as f64;
    match d {
        1 => n * n.log2().max(1.0),
        2 => n * n,
        3 => n * n * n,
        _ => d as f64 * n.powf(d as f64 / 2.0 + 1.0),
    }
}

/// Exact star discrepancy with the cheapest applicable algorithm.
pub fn star_exact(x: &PointSet, budget: f64) -> Result<StarResult> {
    let cost = exact_cost(x.len(), x.dim());
    Error::check_budget(
        cost,
        budget,
        "exact computation is infeasible here; use cover-upper or ta-lower bounds",
    )?;
    match x.dim() {
        1 => star_1d(x),
        2 => star_2d(x),
        3 => star_3d(x),
        _ => Ok(star_dem(x)),
    }
}
