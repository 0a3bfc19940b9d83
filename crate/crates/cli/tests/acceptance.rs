//! Acceptance gate. Every criterion prints one PASS/FAIL line to standard
//! error (bypassing output capture) and fails its test on FAIL.

use std::io::Write as _;
use std::time::Instant;

use rand::Rng as _;
use stardisc::applications::{
    backward_selection, forward_selection, halton_fitness, optimal_inner_weights, optimize_halton_permutations,
    quality_report, two_measure_star_disc, DiscreteMeasure, EvalOptions, Fallback, Measure, TaVariant,
};
use stardisc::approx::{cover_bounds, ga_lower_bound, ta_basic, ta_improved, GaConfig, TaConfig};
use stardisc::exact::{star_1d, star_2d, star_3d, star_dem, star_exact, star_grid_enum, DEFAULT_BUDGET};
use stardisc::generators::{
    dominating_set_instance, halton, largest_empty_box_volume, midpoint_set, Graph, PermutationConfig,
};
use stardisc::l2::{
    star_l2_sq_fast, warnock_star_l2_sq, warnock_star_l2_sq_stable, weighted_star_l2_sq, ProductWeights,
};
use stardisc::lp::weighted_star_lp_pow;
use stardisc::{rng_from_seed, PointSet, Rng, WeightedPointSet};

fn verdict(id: u32, title: &str, ok: bool, detail: String) {
    let line = format!("{} criterion {id}: {title} | {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {id} failed: {detail}");
}

fn random_set(rng: &mut Rng, n: usize, d: usize) -> PointSet {
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
    PointSet::new(d, coords).unwrap()
}

#[test]
fn criterion_01_minimal_one_dimensional_discrepancy() {
    const TOL: f64 = 1e-15;
    const LIMIT_SECS: f64 = 1.0;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=1000 {
        let r = star_1d(&midpoint_set(n).unwrap()).unwrap();
        worst = worst.max((r.value - 1.0 / (2.0 * n as f64)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        "star_1d(midpoints(n)) = 1/(2n), n = 1..1000",
        worst <= TOL && secs < LIMIT_SECS,
        format!("max error {worst:e} (tol {TOL:e}), {secs:.3}s (limit {LIMIT_SECS}s)"),
    );
}

#[test]
fn criterion_02_exact_algorithms_agree() {
    const TOL: f64 = 1e-12;
    const INSTANCES: usize = 500;
    const LIMIT_SECS: f64 = 120.0;
    let start = Instant::now();
    let mut rng = rng_from_seed(2002);
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    let mut check = |x: &PointSet| {
        let reference = star_grid_enum(x, 1e13).unwrap().value;
        let mut others = vec![star_dem(x).value];
        match x.dim() {
            1 => others.push(star_1d(x).unwrap().value),
            2 => others.push(star_2d(x).unwrap().value),
            3 => others.push(star_3d(x).unwrap().value),
            _ => {}
        }
        for v in others {
            worst = worst.max((v - reference).abs());
            compared += 1;
        }
    };
    for _ in 0..INSTANCES {
        let d = rng.random_range(1..=5);
        let n = rng.random_range(1..=24);
        let x = random_set(&mut rng, n, d);
        check(&x);
    }
    for d in [2, 3, 4] {
        check(&halton(32, d, None).unwrap());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        2,
        "grid / 2d / 3d / DEM agree on 500 random sets and Halton(32) for d = 2,3,4",
        worst <= TOL && secs < LIMIT_SECS,
        format!("{compared} comparisons, max difference {worst:e} (tol {TOL:e}), {secs:.1}s (limit {LIMIT_SECS}s)"),
    );
}

#[test]
fn criterion_03_l2_consistency() {
    const REL_TOL: f64 = 1e-10;
    const STABLE_TOL: f64 = 1e-12;
    const INSTANCES: usize = 100;
    const LIMIT_SECS: f64 = 300.0;
    let start = Instant::now();
    let mut rng = rng_from_seed(3003);
    let mut worst_rel = 0.0f64;
    for _ in 0..INSTANCES {
        let n = 2f64.powf(rng.random_range(8.0..=14.0)).round() as usize;
        let d = rng.random_range(1..=6);
        let x = random_set(&mut rng, n, d);
        let plain = warnock_star_l2_sq(&x);
        let fast = star_l2_sq_fast(&WeightedPointSet::uniform(&x));
        worst_rel = worst_rel.max((fast - plain).abs() / plain.abs());
    }
    let mut worst_stable = 0.0f64;
    for _ in 0..INSTANCES {
        let n = rng.random_range(1..=1000);
        let d = rng.random_range(1..=6);
        let x = random_set(&mut rng, n, d);
        worst_stable = worst_stable.max((warnock_star_l2_sq_stable(&x) - warnock_star_l2_sq(&x)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        3,
        "divide-and-conquer L2 vs Warnock (n in 2^8..2^14, d <= 6); stable vs plain Warnock (n <= 1000)",
        worst_rel <= REL_TOL && worst_stable <= STABLE_TOL && secs < LIMIT_SECS,
        format!(
            "max rel. difference {worst_rel:e} (tol {REL_TOL:e}), stable max abs. difference {worst_stable:e} (tol {STABLE_TOL:e}), {secs:.1}s (limit {LIMIT_SECS}s)"
        ),
    );
}

#[test]
fn criterion_04_formula_cross_validation() {
    const CROSS_TOL: f64 = 1e-10;
    const ANALYTIC_TOL: f64 = 1e-12;
    let mut rng = rng_from_seed(4004);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = rng.random_range(1..=4);
        let n = rng.random_range(1..=20);
        let x = random_set(&mut rng, n, d);
        let g = ProductWeights::ones(d);
        let lp = weighted_star_lp_pow(&x, &g, 2).unwrap();
        worst = worst.max((lp - weighted_star_l2_sq(&x, &g).unwrap()).abs());
    }
    let half = PointSet::new(1, vec![0.5]).unwrap();
    let zero = PointSet::new(1, vec![0.0]).unwrap();
    let one = ProductWeights::ones(1);
    let analytic = [
        (weighted_star_l2_sq(&half, &one).unwrap(), 1.0 / 12.0),
        (weighted_star_lp_pow(&half, &one, 2).unwrap(), 1.0 / 12.0),
        (weighted_star_l2_sq(&zero, &one).unwrap(), 1.0 / 3.0),
        (weighted_star_lp_pow(&zero, &one, 2).unwrap(), 1.0 / 3.0),
        (weighted_star_lp_pow(&half, &one, 4).unwrap(), 0.0125),
    ];
    let worst_analytic = analytic.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    verdict(
        4,
        "L_p (p = 2) equals weighted L2 on 50 sets; analytic 1/12, 1/3, 0.0125",
        worst <= CROSS_TOL && worst_analytic <= ANALYTIC_TOL,
        format!("cross max {worst:e} (tol {CROSS_TOL:e}), analytic max {worst_analytic:e} (tol {ANALYTIC_TOL:e})"),
    );
}

#[test]
fn criterion_05_cover_sandwich() {
    const SLACK: f64 = 1e-12;
    const LIMIT_SECS: f64 = 300.0;
    let start = Instant::now();
    let mut rng = rng_from_seed(5005);
    let mut worst = f64::NEG_INFINITY;
    let mut cases = 0;
    for _ in 0..100 {
        let d = rng.random_range(1..=4);
        let n = rng.random_range(1..=64);
        let x = random_set(&mut rng, n, d);
        let exact = star_exact(&x, DEFAULT_BUDGET).unwrap().value;
        for delta in [0.1, 0.05] {
            let b = cover_bounds(&x, delta).unwrap();
            worst = worst.max((b.lower - exact).max(exact - (b.lower + delta)));
            cases += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        5,
        "lower <= exact <= lower + delta for delta in {0.1, 0.05}, 100 sets (n <= 64, d <= 4)",
        worst <= SLACK && secs < LIMIT_SECS,
        format!("{cases} brackets, worst violation {worst:e} (slack {SLACK:e}), {secs:.1}s (limit {LIMIT_SECS}s)"),
    );
}

#[test]
fn criterion_06_heuristics() {
    const SOUND_TOL: f64 = 1e-12;
    const GAP: f64 = 1e-3;
    const TARGET: f64 = 0.8;
    let mut rng = rng_from_seed(6006);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut hits = 0;
    let mut total = 0;
    let mut suite: Vec<PointSet> = Vec::new();
    for d in 2..=5 {
        for n in [16, 32, 64] {
            suite.push(halton(n, d, None).unwrap());
        }
    }
    while suite.len() < 100 {
        let d = rng.random_range(1..=5);
        let n = rng.random_range(2..=64);
        suite.push(random_set(&mut rng, n, d));
    }
    for x in &suite {
        let exact = star_exact(x, DEFAULT_BUDGET).unwrap().value;
        let seed: u64 = rng.random();
        let mut best10 = TaConfig::new(10_000, seed);
        best10.restarts = 10;
        let improved = ta_improved(x, &best10).unwrap().lower;
        let basic = ta_basic(x, &TaConfig::new(2_000, seed)).unwrap().lower;
        let ga = ga_lower_bound(x, &GaConfig::new(seed)).unwrap().lower;
        for v in [improved, basic, ga] {
            worst_excess = worst_excess.max(v - exact);
        }
        total += 1;
        if exact - improved <= GAP {
            hits += 1;
        }
    }
    let rate = hits as f64 / total as f64;
    verdict(
        6,
        "TA/GA lower bounds never exceed exact; improved TA best-of-10 (I = 1e4) within 1e-3 on >= 80%",
        worst_excess <= SOUND_TOL && rate >= TARGET,
        format!("max excess {worst_excess:e} (tol {SOUND_TOL:e}), hit rate {hits}/{total} = {rate:.2} (target {TARGET})"),
    );
}

#[test]
fn criterion_07_domination_instances() {
    let mut rng = rng_from_seed(7007);
    let mut graphs = Vec::new();
    for n in 1..=8 {
        graphs.push(Graph::path(n));
        graphs.push(Graph::cycle(n));
        graphs.push(Graph::star(n));
        for _ in 0..3 {
            let p = rng.random_range(0.2..0.7);
            graphs.push(Graph::random(n, p, &mut rng));
        }
    }
    let mut mismatches = 0;
    for g in &graphs {
        let x = dominating_set_instance(g, 0.5, 0.0).unwrap();
        let expected = 0.5f64.powi(g.domination_number() as i32);
        if largest_empty_box_volume(&x) != expected {
            mismatches += 1;
        }
    }
    verdict(
        7,
        "largest empty box of the (1/2, 0) instance equals (1/2)^gamma(G), graphs on <= 8 vertices",
        mismatches == 0,
        format!("{} graphs, {mismatches} mismatches (exact equality)", graphs.len()),
    );
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

#[test]
fn criterion_08_scenario_reduction() {
    const TOL: f64 = 1e-9;
    let mut rng = rng_from_seed(8008);
    let mut worst_full = 0.0f64;
    let mut worst_recompute = 0.0f64;
    let mut gaps = Vec::new();
    let mut cases = 0;
    for n_atoms in 1..=6 {
        for trial in 0..6 {
            let atoms: Vec<f64> = if trial == 0 {
                (1..=n_atoms).map(|i| i as f64 / (n_atoms + 1) as f64).collect()
            } else {
                let mut v: Vec<f64> = (0..n_atoms).map(|_| rng.random()).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            let Ok(p) = DiscreteMeasure::new(1, atoms, vec![1.0 / n_atoms as f64; n_atoms]) else {
                continue;
            };
            let all: Vec<usize> = (0..n_atoms).collect();
            worst_full = worst_full.max(optimal_inner_weights(&p, &all, 1e6).unwrap().1);
            for n in 1..=n_atoms {
                let best = subsets(n_atoms, n)
                    .iter()
                    .map(|y| optimal_inner_weights(&p, y, 1e6).unwrap().1)
                    .fold(f64::INFINITY, f64::min);
                let fwd = forward_selection(&p, n, true, 1e6).unwrap();
                let bwd = backward_selection(&p, n, true, 1e6).unwrap();
                for r in [&fwd, &bwd] {
                    let again = two_measure_star_disc(&p, &r.measure, 1e6).unwrap();
                    worst_recompute = worst_recompute.max((again - r.distance).abs());
                }
                cases += 1;
                if (fwd.distance - best).abs() > TOL {
                    gaps.push((n_atoms, n, fwd.distance, best));
                }
            }
        }
    }
    let example = gaps
        .first()
        .map(|(na, n, f, b)| format!("; e.g. N={na}, n={n}: forward {f:.6} vs best {b:.6}"))
        .unwrap_or_default();
    verdict(
        8,
        "inner LP gives t = 0 on full support; forward selection (exact LP) equals exhaustive best for d = 1, N <= 6",
        worst_full <= TOL && worst_recompute <= TOL && gaps.is_empty(),
        format!(
            "full-support max t {worst_full:e}, recompute max {worst_recompute:e} (tol {TOL:e}), {} of {cases} cases with a greedy gap{example}",
            gaps.len()
        ),
    );
}

#[test]
fn criterion_09_permutation_optimizer() {
    const REQUIRED: usize = 9;
    let mut violations = 0;
    let mut checked = 0;
    for (d, n) in [(1, 16), (2, 32), (3, 64), (5, 50)] {
        for seed in 0..3 {
            let cfg = optimize_halton_permutations(d, n, 10, 20, 15, seed).unwrap();
            let plain = halton_fitness(n, &PermutationConfig::identity(d)).unwrap();
            checked += 1;
            if halton_fitness(n, &cfg).unwrap() > plain {
                violations += 1;
            }
        }
    }
    let plain = halton_fitness(64, &PermutationConfig::identity(4)).unwrap();
    let mut better = 0;
    for seed in 0..10 {
        let cfg = optimize_halton_permutations(4, 64, 20, 40, 50, seed).unwrap();
        if halton_fitness(64, &cfg).unwrap() < plain {
            better += 1;
        }
    }
    verdict(
        9,
        "optimized permutations never worse than identity; strictly better for d = 4, n = 64 on >= 9 of 10 seeds",
        violations == 0 && better >= REQUIRED,
        format!("{violations} elitism violations in {checked} runs, strictly better on {better}/10 seeds"),
    );
}

/// Every randomized pathway, collected as one comparable string.
fn randomized_outputs() -> String {
    let x = halton(48, 3, None).unwrap();
    let mut rng = rng_from_seed(10);
    let y = random_set(&mut rng, 30, 4);
    let mut ta = TaConfig::new(1_500, 77);
    ta.restarts = 4;
    let mut out = Vec::new();
    out.push(format!("{:?}", ta_basic(&x, &ta).unwrap()));
    out.push(format!("{:?}", ta_improved(&y, &ta).unwrap()));
    out.push(format!("{:?}", ga_lower_bound(&y, &GaConfig::new(5)).unwrap()));
    out.push(format!("{:?}", cover_bounds(&x, 0.1).unwrap()));
    out.push(format!("{:?}", optimize_halton_permutations(3, 40, 8, 16, 8, 4).unwrap()));
    out.push(format!("{:?}", star_dem(&y)));
    out.push(format!("{:?}", star_l2_sq_fast(&WeightedPointSet::uniform(&halton(5000, 3, None).unwrap())).to_bits()));
    let p = DiscreteMeasure::uniform(&random_set(&mut rng, 12, 2)).unwrap();
    out.push(format!("{:?}", forward_selection(&p, 3, false, 1e7).unwrap()));
    out.push(format!("{:?}", backward_selection(&p, 9, true, 1e7).unwrap()));
    let opts = EvalOptions {
        budget: 1e3,
        fallback: Some(Fallback {
            delta: 0.5,
            ta: TaConfig::new(500, 3),
        }),
        ..EvalOptions::default()
    };
    let measures = [
        Measure::StarLinf { method: Default::default() },
        Measure::TaLower {
            variant: TaVariant::Basic,
            iterations: 400,
            restarts: 3,
            seed: 8,
        },
    ];
    for mut cell in quality_report(&[("x".into(), x), ("y".into(), y)], &measures, &opts) {
        cell.runtime_secs = 0.0;
        out.push(format!("{cell:?}"));
    }
    out.join("\n")
}

fn cli_report(threads: &str) -> String {
    let args = [
        "stardisc",
        "--threads",
        threads,
        "--json",
        "disc",
        "--input",
        "tests/golden/points2d.txt",
        "--measure",
        "ta-lower",
        "--restarts",
        "5",
        "--iterations",
        "500",
        "--seed",
        "11",
    ];
    let mut out = Vec::new();
    let code = stardisc_cli::run(args, &mut out, &mut Vec::new());
    assert_eq!(code, 0);
    let mut v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    v["command"] = serde_json::Value::Null;
    for r in v["records"].as_array_mut().unwrap() {
        r["wall_time_secs"] = serde_json::Value::Null;
    }
    v.to_string()
}

#[test]
fn criterion_10_determinism() {
    let pool = |t: usize| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
    let a = pool(1).install(randomized_outputs);
    let b = pool(4).install(randomized_outputs);
    let c = randomized_outputs();
    let library_same = a == b && b == c;
    let cli_same = cli_report("1") == cli_report("4");
    verdict(
        10,
        "identical seeds and flags give bitwise-identical results on 1 and 4 threads (library and CLI)",
        library_same && cli_same,
        format!("library identical: {library_same}, CLI report identical: {cli_same}"),
    );
}
