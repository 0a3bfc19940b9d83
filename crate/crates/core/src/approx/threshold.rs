//! Threshold accepting on the induced grid.

use rand::seq::index::sample;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::par;
use crate::pointset::{box_counts, delta_bar_value, delta_value, grid_view, snap_down, snap_up, BoxKind, PointSet};
use crate::{rng_from_seed, Rng};

use super::{star_at, value_at, BoundResult};

/// Parameters shared by both threshold-accepting variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaConfig {
    /// Iterations per restart; the improved variant splits them over its
    /// two phases.
    pub iterations: u64,
    /// Coordinates changed per move.
    pub mc: usize,
    /// Grid radius of a move in the basic variant.
    pub k: usize,
    /// Number of thresholds; `None` means `⌈√iterations⌉`.
    pub schedule_len: Option<usize>,
    /// Independent runs with seeds `seed, seed + 1, …`.
    pub restarts: usize,
    pub seed: u64,
}

impl TaConfig {
    pub fn new(iterations: u64, seed: u64) -> Self {
        Self {
            iterations,
            mc: 2,
            k: 5,
            schedule_len: None,
            restarts: 1,
            seed,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be positive"));
        }
        if self.mc == 0 {
            return Err(Error::invalid("mc must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        let _ = d;
        Ok(())
    }

    fn thresholds(&self, iterations: u64) -> usize {
        self.schedule_len
            .unwrap_or_else(|| (iterations as f64).sqrt().ceil() as usize)
            .max(1)
    }
}

/// Inverse of the distribution function of `π^d` restricted to `[lo, hi]`:
/// `((hi^d - lo^d) s + lo^d)^{1/d}` for uniform `s`.
pub fn polynomial_sample(lo: f64, hi: f64, d: usize, s: f64) -> f64 {
    let di = d as i32;
    let a = lo.powi(di);
    let b = hi.powi(di);
    ((b - a) * s + a).powf(1.0 / d as f64).clamp(lo, hi)
}

/// Increasing thresholds `≤ 0`: quantiles of `-|Δ|` from the median up,
/// with the last one zero.
fn schedule(mut deltas: Vec<f64>, len: usize) -> Vec<f64> {
    for v in &mut deltas {
        *v = -v.abs();
    }
    deltas.sort_by(f64::total_cmp);
    let m = deltas.len();
    let mut out: Vec<f64> = (0..len)
        .map(|s| {
            let q = if len == 1 {
                1.0
            } else {
                0.5 + 0.5 * s as f64 / (len - 1) as f64
            };
            deltas[((q * (m - 1) as f64).round() as usize).min(m - 1)]
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 0.0;
    }
    out
}

#[derive(Debug, Clone)]
struct Found {
    value: f64,
    corner: Vec<f64>,
    kind: BoxKind,
}

impl Found {
    fn none() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            corner: Vec::new(),
            kind: BoxKind::Open,
        }
    }

    fn offer(&mut self, value: f64, corner: &[f64], kind: BoxKind) {
        if value > self.value {
            self.value = value;
            self.corner = corner.to_vec();
            self.kind = kind;
        }
    }
}

fn distinct_axes(rng: &mut Rng, d: usize, mc: usize) -> Vec<usize> {
    sample(rng, d, mc.min(d)).into_vec()
}

struct Basic<'a> {
    x: &'a PointSet,
    lists: Vec<Vec<f64>>,
    cfg: TaConfig,
}

impl Basic<'_> {
    fn corner(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(j, &i)| self.lists[j][i]).collect()
    }

    fn random_idx(&self, rng: &mut Rng) -> Vec<usize> {
        self.lists.iter().map(|l| rng.random_range(0..l.len())).collect()
    }

    fn neighbour(&self, idx: &[usize], rng: &mut Rng) -> Vec<usize> {
        let mut out = idx.to_vec();
        let k = self.cfg.k as i64;
        for j in distinct_axes(rng, idx.len(), self.cfg.mc) {
            let step = rng.random_range(-k..=k);
            let top = self.lists[j].len() as i64 - 1;
            out[j] = (idx[j] as i64 + step).clamp(0, top) as usize;
        }
        out
    }

    fn run(&self, seed: u64) -> Found {
        let mut rng = rng_from_seed(seed);
        let iters = self.cfg.iterations;
        let len = self.cfg.thresholds(iters);
        let deltas: Vec<f64> = (0..len)
            .map(|_| {
                let a = self.random_idx(&mut rng);
                let b = self.neighbour(&a, &mut rng);
                star_at(&self.corner(&b), self.x).0 - star_at(&self.corner(&a), self.x).0
            })
            .collect();
        let thresholds = schedule(deltas, len);
        let segment = iters.div_ceil(len as u64);

        let mut idx = self.random_idx(&mut rng);
        let mut y = self.corner(&idx);
        let (mut cur, kind) = star_at(&y, self.x);
        let mut best = Found::none();
        best.offer(cur, &y, kind);
        for it in 0..iters {
            let t = thresholds[((it / segment) as usize).min(len - 1)];
            let cand = self.neighbour(&idx, &mut rng);
            let z = self.corner(&cand);
            let (v, kind) = star_at(&z, self.x);
            best.offer(v, &z, kind);
            if v - cur >= t {
                idx = cand;
                y = z;
                cur = v;
            }
        }
        let _ = y;
        best
    }
}

fn best_of(runs: Vec<Found>) -> Found {
    let mut best = Found::none();
    for r in runs {
        if r.value > best.value {
            best = r;
        }
    }
    best
}

fn finish(
    x: &PointSet,
    found: Found,
    method: &str,
    cfg: &TaConfig,
) -> BoundResult {
    BoundResult {
        lower: value_at(&found.corner, x, found.kind),
        upper: 1.0,
        witness: found.corner,
        kind: found.kind,
        method: method.into(),
        seed: Some(cfg.seed),
        params: vec![
            ("iterations".into(), cfg.iterations.to_string()),
            ("restarts".into(), cfg.restarts.to_string()),
            ("mc".into(), cfg.mc.to_string()),
            ("k".into(), cfg.k.to_string()),
        ],
    }
}

/// Threshold accepting over `Γ̄(X)` with moves of at most `k` grid steps on
/// `mc` random axes. Reports `δ*` at the best corner seen; the upper bound is
/// the trivial 1.
pub fn ta_basic(x: &PointSet, cfg: &TaConfig) -> Result<BoundResult> {
    cfg.validate(x.dim())?;
    let lists = grid_view(x).axes.iter().map(|a| a.closed_values()).collect();
    let runner = Basic { x, lists, cfg: *cfg };
    let runs = par::map_range(cfg.restarts, |r| runner.run(cfg.seed.wrapping_add(r as u64)));
    Ok(finish(x, best_of(runs), "ta-basic", cfg))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Maximize `δ̄` at corners rounded down.
    Closed,
    /// Maximize `δ` at corners rounded up.
    Open,
}

struct Improved<'a> {
    x: &'a PointSet,
    /// `{0} ∪ Γ_j ∪ {1}` per axis.
    lists: Vec<Vec<f64>>,
    cfg: TaConfig,
}

impl Improved<'_> {
    fn index_of(&self, j: usize, v: f64) -> usize {
        self.lists[j].partition_point(|&g| g < v)
    }

    /// Rounds a sampled corner both ways, records both, and returns the
    /// phase's snapped corner with its objective.
    fn evaluate(&self, raw: &[f64], phase: Phase, rng: &mut Rng, best: &mut Found) -> (Vec<f64>, f64) {
        let n = self.x.len();
        let down = snap_down(raw, self.x).expect("corner in the unit cube");
        let up = snap_up(raw, self.x, rng).expect("corner in the unit cube");
        let closed = delta_bar_value(&down, box_counts(&down, self.x).1, n);
        let open = delta_value(&up, box_counts(&up, self.x).0, n);
        best.offer(closed, &down, BoxKind::Closed);
        best.offer(open, &up, BoxKind::Open);
        match phase {
            Phase::Closed => (down, closed),
            Phase::Open => (up, open),
        }
    }

    fn random_raw(&self, rng: &mut Rng) -> Vec<f64> {
        let d = self.x.dim();
        (0..d)
            .map(|_| polynomial_sample(0.0, 1.0, d, rng.random()))
            .collect()
    }

    fn neighbour(&self, y: &[f64], radius: &[usize], rng: &mut Rng) -> Vec<f64> {
        let d = y.len();
        let mut z = y.to_vec();
        for j in distinct_axes(rng, d, self.cfg.mc) {
            let l = &self.lists[j];
            let i = self.index_of(j, y[j]);
            let lo = l[i.saturating_sub(radius[j])];
            let hi = l[(i + radius[j]).min(l.len() - 1)];
            z[j] = polynomial_sample(lo, hi, d, rng.random());
        }
        z
    }

    fn radius(&self, progress: f64) -> Vec<usize> {
        self.lists
            .iter()
            .map(|l| {
                let start = (l.len() - 2) as f64 / 2.0;
                (start * (1.0 - progress) + progress).round().max(1.0) as usize
            })
            .collect()
    }

    fn phase(&self, phase: Phase, iters: u64, rng: &mut Rng, best: &mut Found) {
        if iters == 0 {
            return;
        }
        let len = self.cfg.thresholds(iters);
        let r0 = self.radius(0.0);
        let mut scratch = Found::none();
        let deltas: Vec<f64> = (0..len)
            .map(|_| {
                let raw = self.random_raw(rng);
                let (a, fa) = self.evaluate(&raw, phase, rng, &mut scratch);
                let raw = self.neighbour(&a, &r0, rng);
                let (_, fb) = self.evaluate(&raw, phase, rng, &mut scratch);
                fb - fa
            })
            .collect();
        let thresholds = schedule(deltas, len);
        let segment = iters.div_ceil(len as u64);

        let raw = self.random_raw(rng);
        let (mut y, mut cur) = self.evaluate(&raw, phase, rng, best);
        for it in 0..iters {
            let t = thresholds[((it / segment) as usize).min(len - 1)];
            let radius = self.radius(it as f64 / iters as f64);
            let raw = self.neighbour(&y, &radius, rng);
            let (z, v) = self.evaluate(&raw, phase, rng, best);
            if v - cur >= t {
                y = z;
                cur = v;
            }
        }
    }

    fn run(&self, seed: u64) -> Found {
        let mut rng = rng_from_seed(seed);
        let mut best = Found::none();
        let half = self.cfg.iterations / 2;
        self.phase(Phase::Closed, self.cfg.iterations - half, &mut rng, &mut best);
        self.phase(Phase::Open, half, &mut rng, &mut best);
        best
    }
}

/// Threshold accepting with continuous neighbourhoods sampled from the
/// polynomial measure, snapping to critical corners, and separate phases for
/// closed and open boxes.
pub fn ta_improved(x: &PointSet, cfg: &TaConfig) -> Result<BoundResult> {
    cfg.validate(x.dim())?;
    let lists = grid_view(x)
        .axes
        .iter()
        .map(|a| {
            let mut l = vec![0.0];
            l.extend(a.closed_values());
            l.dedup();
            l
        })
        .collect();
    let runner = Improved { x, lists, cfg: *cfg };
    let runs = par::map_range(cfg.restarts, |r| runner.run(cfg.seed.wrapping_add(r as u64)));
    Ok(finish(x, best_of(runs), "ta-improved", cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{star_exact, DEFAULT_BUDGET};
    use crate::generators::halton;
    use crate::pointset::local_discrepancy;

    #[test]
    fn polynomial_measure_mean() {
        let mut rng = rng_from_seed(12);
        for d in [1usize, 2, 5] {
            let m = 100_000;
            let xs: Vec<f64> = (0..m).map(|_| polynomial_sample(0.0, 1.0, d, rng.random())).collect();
            let mean = xs.iter().sum::<f64>() / m as f64;
            let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            let se = (var / m as f64).sqrt();
            let expected = d as f64 / (d as f64 + 1.0);
            assert!((mean - expected).abs() < 3.0 * se, "d={d}: {mean} vs {expected}");
        }
        assert!((polynomial_sample(0.2, 0.7, 3, 0.0) - 0.2).abs() < 1e-15);
        assert!((polynomial_sample(0.2, 0.7, 3, 1.0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn schedule_rises_to_zero() {
        let s = schedule(vec![0.5, -0.1, 0.3, 0.0, 0.2], 4);
        assert_eq!(s.len(), 4);
        assert!(s.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*s.last().unwrap(), 0.0);
        assert!(s[0] < 0.0);
    }

    #[test]
    fn single_point() {
        let x = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        let cfg = TaConfig::new(200, 1);
        assert_eq!(ta_basic(&x, &cfg).unwrap().lower, 0.75);
        assert_eq!(ta_improved(&x, &cfg).unwrap().lower, 0.75);
    }

    #[test]
    fn sound_and_reproducible() {
        let mut rng = rng_from_seed(40);
        for _ in 0..20 {
            let d = rng.random_range(1..=4);
            let n = rng.random_range(1..=30);
            let x = PointSet::new(d, (0..n * d).map(|_| rng.random()).collect()).unwrap();
            let exact = star_exact(&x, DEFAULT_BUDGET).unwrap().value;
            let mut cfg = TaConfig::new(500, rng.random());
            cfg.restarts = 3;
            cfg.mc = d.min(2);
            for r in [ta_basic(&x, &cfg).unwrap(), ta_improved(&x, &cfg).unwrap()] {
                assert!(r.lower <= exact + 1e-12);
                let l = local_discrepancy(&r.witness, &x).unwrap();
                let again = if r.kind == BoxKind::Open { l.delta } else { l.delta_bar };
                assert_eq!(again, r.lower);
            }
            assert_eq!(ta_basic(&x, &cfg).unwrap(), ta_basic(&x, &cfg).unwrap());
            assert_eq!(ta_improved(&x, &cfg).unwrap(), ta_improved(&x, &cfg).unwrap());
        }
    }

    #[test]
    fn improved_finds_optimum_on_halton() {
        let x = halton(16, 2, None).unwrap();
        let exact = star_exact(&x, DEFAULT_BUDGET).unwrap().value;
        let mut cfg = TaConfig::new(10_000, 0);
        cfg.restarts = 10;
        let r = ta_improved(&x, &cfg).unwrap();
        assert!((r.lower - exact).abs() <= 1e-6, "{} vs {exact}", r.lower);
    }

    #[test]
    fn rejects_bad_config() {
        let x = PointSet::new(1, vec![0.5]).unwrap();
        let mut cfg = TaConfig::new(0, 1);
        assert!(ta_basic(&x, &cfg).is_err());
        cfg.iterations = 10;
        cfg.mc = 0;
        assert!(ta_improved(&x, &cfg).is_err());
    }
}
