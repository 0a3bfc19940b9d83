//! Evaluation of discrepancy measures on named point sets.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::approx::{cover_bounds_with_cap, ga_lower_bound, ta_basic, ta_improved, BoundResult, GaConfig, TaConfig, DEFAULT_COVER_CAP};
use crate::error::{Error, Result};
use crate::exact::{star_1d, star_2d, star_3d, star_dem, star_exact, star_grid_enum, StarResult, DEFAULT_BUDGET};
use crate::l2::{
    extreme_l2_sq, modified_l2_sq, star_l2_sq_fast, warnock_star_l2_sq, warnock_star_l2_sq_stable, weighted_star_l2_sq,
    ProductWeights,
};
use crate::lp::{weighted_star_lp_pow_with, LpLimits};
use crate::par;
use crate::pointset::{BoxKind, PointSet, WeightedPointSet};

/// Algorithm choice for the exact L∞ star discrepancy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactMethod {
    #[default]
    Auto,
    #[serde(rename = "1d")]
    OneD,
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "3d")]
    ThreeD,
    Grid,
    Dem,
}

/// Algorithm choice for the squared L2 star discrepancy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum L2Method {
    #[default]
    Warnock,
    Stable,
    Fast,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaVariant {
    Basic,
    #[default]
    Improved,
}

/// A discrepancy measure with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "kebab-case")]
pub enum Measure {
    StarLinf {
        #[serde(default)]
        method: ExactMethod,
    },
    StarL2 {
        #[serde(default)]
        method: L2Method,
    },
    ExtremeL2,
    ModifiedL2,
    WeightedL2 {
        gamma: Vec<f64>,
    },
    LpEven {
        p: u32,
        #[serde(default)]
        gamma: Option<Vec<f64>>,
    },
    CoverUpper {
        delta: f64,
    },
    TaLower {
        #[serde(default)]
        variant: TaVariant,
        iterations: u64,
        #[serde(default = "one")]
        restarts: usize,
        seed: u64,
    },
    GaLower {
        mu: usize,
        crossovers: usize,
        mutations: usize,
        stagnation: usize,
        seed: u64,
    },
}

fn one() -> usize {
    1
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::StarLinf { .. } => "star-linf",
            Measure::StarL2 { .. } => "star-l2",
            Measure::ExtremeL2 => "extreme-l2",
            Measure::ModifiedL2 => "modified-l2",
            Measure::WeightedL2 { .. } => "weighted-l2",
            Measure::LpEven { .. } => "lp-even",
            Measure::CoverUpper { .. } => "cover-upper",
            Measure::TaLower { .. } => "ta-lower",
            Measure::GaLower { .. } => "ga-lower",
        }
    }
}

/// Exact value or an enclosing interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CellValue {
    /// `squared` marks L2-type values reported without the square root.
    Value { value: f64, squared: bool },
    Interval { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    #[serde(flatten)]
    pub value: CellValue,
    pub method: String,
    pub witness: Option<Vec<f64>>,
    pub kind: Option<BoxKind>,
    pub seed: Option<u64>,
}

/// Settings for randomized fallbacks when an exact value is out of budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fallback {
    pub delta: f64,
    pub ta: TaConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Work budget for exact L∞ computations.
    pub budget: f64,
    pub cover_cap: f64,
    pub lp: LpLimits,
    /// Bracket out-of-budget L∞ values instead of failing.
    pub fallback: Option<Fallback>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            cover_cap: DEFAULT_COVER_CAP,
            lp: LpLimits::default(),
            fallback: None,
        }
    }
}

fn squared(value: f64, method: &str) -> Evaluation {
    Evaluation {
        value: CellValue::Value { value, squared: true },
        method: method.into(),
        witness: None,
        kind: None,
        seed: None,
    }
}

fn from_star(r: StarResult) -> Evaluation {
    Evaluation {
        value: CellValue::Value {
            value: r.value,
            squared: false,
        },
        method: r.method.as_str().into(),
        witness: Some(r.witness),
        kind: Some(r.kind),
        seed: None,
    }
}

fn from_bound(r: BoundResult) -> Evaluation {
    Evaluation {
        value: CellValue::Interval {
            lower: r.lower,
            upper: r.upper,
        },
        method: r.method,
        witness: Some(r.witness),
        kind: Some(r.kind),
        seed: r.seed,
    }
}

fn weights(gamma: &[f64], d: usize) -> Result<ProductWeights> {
    Error::check_dim(d, gamma.len())?;
    ProductWeights::new(gamma.to_vec())
}

fn exact_linf(x: &PointSet, method: ExactMethod, budget: f64) -> Result<StarResult> {
    match method {
        ExactMethod::Auto => star_exact(x, budget),
        ExactMethod::OneD => star_1d(x),
        ExactMethod::TwoD => star_2d(x),
        ExactMethod::ThreeD => star_3d(x),
        ExactMethod::Grid => star_grid_enum(x, budget),
        ExactMethod::Dem => Ok(star_dem(x)),
    }
}

/// `[max(TA, cover lower), cover upper]`, with upper 1 when no cover fits.
fn bracket(x: &PointSet, fb: &Fallback, cap: f64) -> Result<Evaluation> {
    let ta = ta_improved(x, &fb.ta)?;
    let (mut best, upper, method) = match cover_bounds_with_cap(x, fb.delta, cap) {
        Ok(c) => {
            let upper = c.upper.min(1.0);
            if c.lower > ta.lower {
                (c, upper, "cover")
            } else {
                (ta, upper, "ta-improved+cover")
            }
        }
        Err(Error::BudgetExceeded { .. }) => (ta, 1.0, "ta-improved"),
        Err(e) => return Err(e),
    };
    best.upper = upper;
    best.method = method.into();
    Ok(from_bound(best))
}

/// Evaluates one measure on one point set.
pub fn evaluate(x: &PointSet, measure: &Measure, opts: &EvalOptions) -> Result<Evaluation> {
    let d = x.dim();
    Ok(match measure {
        Measure::StarLinf { method } => match exact_linf(x, *method, opts.budget) {
            Ok(r) => from_star(r),
            Err(Error::BudgetExceeded { .. }) if opts.fallback.is_some() => {
                bracket(x, opts.fallback.as_ref().expect("checked"), opts.cover_cap)?
            }
            Err(e) => return Err(e),
        },
        Measure::StarL2 { method } => match method {
            L2Method::Warnock => squared(warnock_star_l2_sq(x), "warnock"),
            L2Method::Stable => squared(warnock_star_l2_sq_stable(x), "warnock-stable"),
            L2Method::Fast => squared(star_l2_sq_fast(&WeightedPointSet::uniform(x)), "heinrich"),
        },
        Measure::ExtremeL2 => squared(extreme_l2_sq(x), "closed-form"),
        Measure::ModifiedL2 => squared(modified_l2_sq(x), "closed-form"),
        Measure::WeightedL2 { gamma } => squared(weighted_star_l2_sq(x, &weights(gamma, d)?)?, "closed-form"),
        Measure::LpEven { p, gamma } => {
            let g = match gamma {
                Some(g) => weights(g, d)?,
                None => ProductWeights::ones(d),
            };
            Evaluation {
                value: CellValue::Value {
                    value: weighted_star_lp_pow_with(x, &g, *p, opts.lp)?,
                    squared: false,
                },
                method: format!("tuple-expansion-p{p}"),
                witness: None,
                kind: None,
                seed: None,
            }
        }
        Measure::CoverUpper { delta } => from_bound(cover_bounds_with_cap(x, *delta, opts.cover_cap)?),
        Measure::TaLower {
            variant,
            iterations,
            restarts,
            seed,
        } => {
            let mut cfg = TaConfig::new(*iterations, *seed);
            cfg.restarts = *restarts;
            from_bound(match variant {
                TaVariant::Basic => ta_basic(x, &cfg)?,
                TaVariant::Improved => ta_improved(x, &cfg)?,
            })
        }
        Measure::GaLower {
            mu,
            crossovers,
            mutations,
            stagnation,
            seed,
        } => {
            let mut cfg = GaConfig::new(*seed);
            cfg.mu = *mu;
            cfg.crossovers = *crossovers;
            cfg.mutations = *mutations;
            cfg.stagnation = *stagnation;
            from_bound(ga_lower_bound(x, &cfg)?)
        }
    })
}

/// One entry of a quality report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub set: String,
    pub measure: String,
    #[serde(flatten)]
    pub outcome: Option<Evaluation>,
    pub error: Option<String>,
    pub runtime_secs: f64,
}

/// Evaluates every measure on every set. Cells are listed set by set in
/// the given order; failures are recorded in their cell.
pub fn quality_report(sets: &[(String, PointSet)], measures: &[Measure], opts: &EvalOptions) -> Vec<Cell> {
    let tasks: Vec<(usize, usize)> = (0..sets.len())
        .flat_map(|s| (0..measures.len()).map(move |m| (s, m)))
        .collect();
    par::map_slice(&tasks, |&(s, m)| {
        let start = Instant::now();
        let r = evaluate(&sets[s].1, &measures[m], opts);
        let runtime_secs = start.elapsed().as_secs_f64();
        let (outcome, error) = match r {
            Ok(e) => (Some(e), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Cell {
            set: sets[s].0.clone(),
            measure: measures[m].name().into(),
            outcome,
            error,
            runtime_secs,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{halton, midpoint_set};

    fn strip(cells: &[Cell]) -> Vec<Cell> {
        cells
            .iter()
            .map(|c| Cell {
                runtime_secs: 0.0,
                ..c.clone()
            })
            .collect()
    }

    #[test]
    fn midpoints_report() {
        let sets = vec![("mid8".to_string(), midpoint_set(8).unwrap())];
        let cells = quality_report(
            &sets,
            &[Measure::StarLinf {
                method: ExactMethod::Auto,
            }],
            &EvalOptions::default(),
        );
        let e = cells[0].outcome.as_ref().unwrap();
        assert_eq!(e.value, CellValue::Value { value: 1.0 / 16.0, squared: false });
        assert_eq!(e.method, "1d");
    }

    #[test]
    fn infeasible_cells_hold_intervals() {
        let x = halton(200, 6, None).unwrap();
        let opts = EvalOptions {
            budget: 1e3,
            fallback: Some(Fallback {
                delta: 0.5,
                ta: TaConfig::new(500, 7),
            }),
            ..EvalOptions::default()
        };
        let sets = vec![("h".to_string(), x)];
        let measures = [Measure::StarLinf {
            method: ExactMethod::Auto,
        }];
        let cells = quality_report(&sets, &measures, &opts);
        match cells[0].outcome.as_ref().unwrap().value {
            CellValue::Interval { lower, upper } => assert!(0.0 <= lower && lower <= upper && upper <= 1.0),
            ref v => panic!("expected interval, got {v:?}"),
        }
        assert_eq!(strip(&cells), strip(&quality_report(&sets, &measures, &opts)));
    }

    #[test]
    fn errors_stay_in_their_cell() {
        let sets = vec![("a".to_string(), midpoint_set(4).unwrap())];
        let measures = [
            Measure::WeightedL2 { gamma: vec![1.0, 1.0] },
            Measure::ModifiedL2,
        ];
        let cells = quality_report(&sets, &measures, &EvalOptions::default());
        assert!(cells[0].error.is_some());
        assert!(cells[1].outcome.is_some());
    }

    #[test]
    fn measure_round_trips_through_json() {
        let m = Measure::TaLower {
            variant: TaVariant::Basic,
            iterations: 100,
            restarts: 2,
            seed: 3,
        };
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<Measure>(&s).unwrap(), m);
        let m: Measure = serde_json::from_str(r#"{"measure":"star-linf"}"#).unwrap();
        assert_eq!(m, Measure::StarLinf { method: ExactMethod::Auto });
    }
}
