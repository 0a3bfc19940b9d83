//! Cross-checks between independent algorithms.

use std::time::Instant;

use rand::Rng as _;
use stardisc::applications::{optimal_inner_weights, DiscreteMeasure};
use stardisc::approx::{cover_bounds, ga_lower_bound, ta_improved, GaConfig, TaConfig};
use stardisc::exact::{star_1d, star_2d, star_3d, star_dem, star_exact, star_grid_enum, DEFAULT_BUDGET};
use stardisc::generators::{dominating_set_instance, largest_empty_box_volume, midpoint_set, Graph};
use stardisc::l2::{star_l2_sq_fast, warnock_star_l2_sq, warnock_star_l2_sq_stable, weighted_star_l2_sq, ProductWeights};
use stardisc::lp::weighted_star_lp_pow;
use stardisc::{rng_from_seed, PointSet, Rng, WeightedPointSet};

use crate::args::SelftestArgs;
use crate::commands::Output;
use crate::error::CliError;
use crate::report::{Record, RunReport};

fn random_set(rng: &mut Rng, n_max: usize, d_max: usize) -> PointSet {
    let d = rng.random_range(1..=d_max);
    let n = rng.random_range(1..=n_max);
    // Coarse coordinates produce ties.
    let coarse = rng.random_bool(0.3);
    let coords = (0..n * d)
        .map(|_| {
            if coarse {
                rng.random_range(0..8) as f64 / 8.0
            } else {
                rng.random()
            }
        })
        .collect();
    PointSet::new(d, coords).expect("valid coordinates")
}

struct Check {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    cases: usize,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            worst: 0.0,
            cases: 0,
        }
    }

    /// Records a violation amount; nonpositive means satisfied.
    fn see(&mut self, excess: f64) {
        self.cases += 1;
        if excess.is_nan() {
            self.worst = f64::INFINITY;
        } else {
            self.worst = self.worst.max(excess);
        }
    }

    fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

pub fn run(a: &SelftestArgs, report: &mut RunReport) -> Result<Output, CliError> {
    let mut rng = rng_from_seed(a.seed);
    let m = a.instances.max(1);
    let mut checks = Vec::new();
    let timed = |check: Check, start: Instant| (check, start.elapsed().as_secs_f64());

    let start = Instant::now();
    let mut c = Check::new("midpoint-1d", 1e-15);
    for n in 1..=200 {
        let x = midpoint_set(n)?;
        c.see((star_1d(&x)?.value - 0.5 / n as f64).abs());
    }
    checks.push(timed(c, start));

    let start = Instant::now();
    let mut c = Check::new("exact-agreement", 1e-12);
    for _ in 0..m {
        let x = random_set(&mut rng, 16, 5);
        let reference = star_grid_enum(&x, 1e12)?.value;
        let mut others = vec![star_dem(&x).value];
        match x.dim() {
            1 => others.push(star_1d(&x)?.value),
            2 => others.push(star_2d(&x)?.value),
            3 => others.push(star_3d(&x)?.value),
            _ => {}
        }
        for v in others {
            c.see((v - reference).abs());
        }
    }
    checks.push(timed(c, start));

    let start = Instant::now();
    let mut c = Check::new("l2-fast-vs-warnock", 1e-10);
    let mut s = Check::new("l2-stable-vs-warnock", 1e-12);
    for _ in 0..m {
        let x = random_set(&mut rng, 300, 6);
        let w = warnock_star_l2_sq(&x);
        c.see((star_l2_sq_fast(&WeightedPointSet::uniform(&x)) - w).abs() / w.abs().max(f64::MIN_POSITIVE));
        s.see((warnock_star_l2_sq_stable(&x) - w).abs());
    }
    checks.push(timed(c, start));
    checks.push((s, 0.0));

    let start = Instant::now();
    let mut c = Check::new("lp2-vs-l2", 1e-10);
    for _ in 0..m {
        let x = random_set(&mut rng, 20, 4);
        let mut g: Vec<f64> = (0..x.dim()).map(|_| rng.random_range(0.1..2.0)).collect();
        g.sort_by(|a, b| b.total_cmp(a));
        let g = ProductWeights::new(g)?;
        let lp = weighted_star_lp_pow(&x, &g.squared(), 2)?;
        c.see((lp - weighted_star_l2_sq(&x, &g)?).abs());
    }
    checks.push(timed(c, start));

    let start = Instant::now();
    let mut sandwich = Check::new("cover-sandwich", 1e-12);
    let mut heuristics = Check::new("heuristics-below-exact", 1e-12);
    for _ in 0..m.min(30) {
        let x = random_set(&mut rng, 24, 3);
        let exact = star_exact(&x, DEFAULT_BUDGET)?.value;
        let b = cover_bounds(&x, 0.1)?;
        sandwich.see((b.lower - exact).max(exact - b.upper));
        let seed = rng.random();
        heuristics.see(ta_improved(&x, &TaConfig::new(300, seed))?.lower - exact);
        heuristics.see(ga_lower_bound(&x, &GaConfig::new(seed))?.lower - exact);
    }
    checks.push(timed(sandwich, start));
    checks.push((heuristics, 0.0));

    let start = Instant::now();
    let mut c = Check::new("domination-empty-box", 0.0);
    for n in 1..=6 {
        for g in [Graph::path(n), Graph::cycle(n), Graph::star(n), Graph::random(n, 0.4, &mut rng)] {
            let x = dominating_set_instance(&g, 0.5, 0.0)?;
            let expected = 0.5f64.powi(g.domination_number() as i32);
            c.see((largest_empty_box_volume(&x) - expected).abs());
        }
    }
    checks.push(timed(c, start));

    let start = Instant::now();
    let mut c = Check::new("inner-weights-full-support", 1e-9);
    for _ in 0..m.min(20) {
        let n = rng.random_range(1..=6);
        let atoms: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let Ok(p) = DiscreteMeasure::new(1, atoms, vec![1.0 / n as f64; n]) else {
            continue;
        };
        let all: Vec<usize> = (0..n).collect();
        c.see(optimal_inner_weights(&p, &all, 1e6)?.1);
    }
    checks.push(timed(c, start));

    let mut failed = Vec::new();
    for (c, secs) in checks {
        let mut rec = Record::new("selftest")
            .param("cases", c.cases)
            .param("tolerance", c.tolerance)
            .param("pass", c.passed());
        rec.measure = Some(c.name.into());
        rec.value = Some(if c.worst.is_finite() { c.worst } else { f64::MAX });
        rec.method = Some("max-deviation".into());
        rec.seed = Some(a.seed);
        rec.wall_time_secs = secs;
        if !c.passed() {
            failed.push(c.name);
        }
        report.records.push(rec);
    }
    if failed.is_empty() {
        Ok(Output::Report)
    } else {
        Err(CliError::Check(failed.join(", ")))
    }
}
