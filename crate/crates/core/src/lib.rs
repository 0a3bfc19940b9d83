//! Computing, bounding and optimizing the discrepancy of finite point sets.
//!
//! The crate covers exact L2-type and even-`p` L_p discrepancies, exact
//! star discrepancy (closed forms in low dimension, grid enumeration and a
//! decomposition algorithm), guaranteed bounds from δ-covers, heuristic lower
//! bounds, and two applications: optimizing Halton digit permutations and
//! reducing discrete probability measures.
//!
//! With the default `parallel` feature the heavy loops run on rayon. Every
//! parallel reduction collects in input order, so results are bitwise
//! identical to a build without the feature.

pub mod applications;
pub mod approx;
pub mod error;
pub mod exact;
pub mod generators;
pub mod l2;
pub mod lp;
pub mod par;
pub mod pointset;
pub mod sum;

pub use error::{Error, Result};
pub use pointset::{
    classify_critical, enumerate_critical, grid_view, local_discrepancy, snap_down, snap_up,
    volume, BoxKind, Criticality, GridView, LocalDiscrepancy, PointSet, WeightedPointSet,
};

use rand::SeedableRng;

/// Random source used by every randomized routine.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
