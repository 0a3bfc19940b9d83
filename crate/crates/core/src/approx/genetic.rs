//! A (μ+λ) evolutionary search over the closed grid.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::pointset::{grid_view, BoxKind, PointSet};
use crate::rng_from_seed;

use super::{star_at, value_at, BoundResult};

/// Population parameters; `λ = crossovers + mutations`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaConfig {
    pub mu: usize,
    pub crossovers: usize,
    pub mutations: usize,
    /// Generations without improvement before stopping.
    pub stagnation: usize,
    /// Hard cap on generations.
    pub max_generations: usize,
    pub seed: u64,
}

impl GaConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            mu: 20,
            crossovers: 20,
            mutations: 20,
            stagnation: 50,
            max_generations: 10_000,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mu == 0 || self.crossovers == 0 || self.mutations == 0 {
            return Err(Error::invalid("mu, crossovers and mutations must be at least 1"));
        }
        if self.stagnation == 0 || self.max_generations == 0 {
            return Err(Error::invalid("stagnation and max_generations must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Individual {
    idx: Vec<usize>,
    value: f64,
    kind: BoxKind,
}

/// Lower bound for `d*_∞(X)` from an elitist evolutionary algorithm with
/// uniform parent choice, uniform crossover and single-step grid mutation.
pub fn ga_lower_bound(x: &PointSet, cfg: &GaConfig) -> Result<BoundResult> {
    cfg.validate()?;
    let lists: Vec<Vec<f64>> = grid_view(x).axes.iter().map(|a| a.closed_values()).collect();
    let d = x.dim();
    let mut rng = rng_from_seed(cfg.seed);
    let corner = |idx: &[usize]| -> Vec<f64> { idx.iter().enumerate().map(|(j, &i)| lists[j][i]).collect() };
    let make = |idx: Vec<usize>| {
        let (value, kind) = star_at(&corner(&idx), x);
        Individual { idx, value, kind }
    };

    let mut pop: Vec<Individual> = (0..cfg.mu)
        .map(|_| make(lists.iter().map(|l| rng.random_range(0..l.len())).collect()))
        .collect();
    let by_value = |a: &Individual, b: &Individual| b.value.total_cmp(&a.value);
    pop.sort_by(by_value);
    let mut best = pop[0].value;
    let mut idle = 0;
    let mut generations = 0;

    while idle < cfg.stagnation && generations < cfg.max_generations {
        generations += 1;
        let mut next = pop.clone();
        for _ in 0..cfg.crossovers {
            let a = &pop[rng.random_range(0..pop.len())];
            let b = &pop[rng.random_range(0..pop.len())];
            let idx = (0..d)
                .map(|j| if rng.random_bool(0.5) { a.idx[j] } else { b.idx[j] })
                .collect();
            next.push(make(idx));
        }
        let pool = next.len();
        for _ in 0..cfg.mutations {
            let mut idx = next[rng.random_range(0..pool)].idx.clone();
            let j = rng.random_range(0..d);
            let step = rng.random_range(-1i64..=1);
            idx[j] = (idx[j] as i64 + step).clamp(0, lists[j].len() as i64 - 1) as usize;
            next.push(make(idx));
        }
        next.sort_by(by_value);
        next.truncate(cfg.mu);
        pop = next;
        if pop[0].value > best {
            best = pop[0].value;
            idle = 0;
        } else {
            idle += 1;
        }
    }

    let top = &pop[0];
    let witness = corner(&top.idx);
    Ok(BoundResult {
        lower: value_at(&witness, x, top.kind),
        upper: 1.0,
        witness,
        kind: top.kind,
        method: "ga".into(),
        seed: Some(cfg.seed),
        params: vec![
            ("mu".into(), cfg.mu.to_string()),
            ("crossovers".into(), cfg.crossovers.to_string()),
            ("mutations".into(), cfg.mutations.to_string()),
            ("stagnation".into(), cfg.stagnation.to_string()),
            ("generations".into(), generations.to_string()),
        ],
    })
}
