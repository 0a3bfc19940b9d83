//! Quality reports, Halton permutation search and scenario reduction.

mod permopt;
mod report;
mod scenario;
pub mod simplex;

pub use permopt::{halton_fitness, optimize_halton_permutations};
pub use report::{evaluate, quality_report, Cell, CellValue, EvalOptions, Evaluation, ExactMethod, Fallback, L2Method, Measure, TaVariant};
pub use scenario::{
    backward_selection, forward_selection, nearest_atom_weights, optimal_inner_weights, two_measure_star_disc,
    DiscreteMeasure, ReductionResult, DEFAULT_SCENARIO_BUDGET, MAX_LP_BOXES,
};
