//! Exhaustive evaluation of the local discrepancy over a corner grid.

use crate::error::{Error, Result};
use crate::par;
use crate::pointset::{grid_view, BoxKind, PointSet};
use crate::sum::CompensatedSum;

use super::{Method, StarResult};

/// Piecewise-linear marginal distribution functions; the reference measure
/// of `[0,y)` is `∏_j F_j(y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalCdf {
    axes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl MarginalCdf {
    /// One `(knots, values)` table per axis. Knots must start at 0, end at 1
    /// and strictly increase; values must run from 0 to 1 without
    /// decreasing.
    pub fn new(axes: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Empty("marginal distribution"));
        }
        for (j, (knots, values)) in axes.iter().enumerate() {
            let bad = |why: &str| Err(Error::invalid(format!("marginal {j}: {why}")));
            if knots.len() != values.len() || knots.len() < 2 {
                return bad("needs matching knot and value lists of length >= 2");
            }
            if knots[0] != 0.0 || knots[knots.len() - 1] != 1.0 {
                return bad("knots must start at 0 and end at 1");
            }
            if values[0] != 0.0 || values[values.len() - 1] != 1.0 {
                return bad("F(0) must be 0 and F(1) must be 1");
            }
            if knots.windows(2).any(|w| !(w[0] < w[1])) {
                return bad("knots must be strictly increasing (no jumps)");
            }
            if values.windows(2).any(|w| !(w[0] <= w[1])) {
                return bad("values must be nondecreasing");
            }
        }
        Ok(Self { axes })
    }

    /// Uniform marginals, `F_j(t) = t`.
    pub fn identity(d: usize) -> Self {
        Self {
            axes: vec![(vec![0.0, 1.0], vec![0.0, 1.0]); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn eval(&self, j: usize, t: f64) -> f64 {
        let (knots, values) = &self.axes[j];
        match knots.binary_search_by(|k| k.total_cmp(&t)) {
            Ok(i) => values[i],
            Err(0) => values[0],
            Err(i) if i == knots.len() => values[i - 1],
            Err(i) => {
                let (x0, x1) = (knots[i - 1], knots[i]);
                let (f0, f1) = (values[i - 1], values[i]);
                f0 + (f1 - f0) * ((t - x0) / (x1 - x0))
            }
        }
    }

    /// `∏_j F_j(y_j)`, multiplied in coordinate order.
    pub fn measure(&self, y: &[f64]) -> f64 {
        y.iter()
            .enumerate()
            .fold(1.0, |acc, (j, &t)| acc * self.eval(j, t))
    }
}

/// Counting measure on the points: uniform `1/n` or explicit weights.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Nu<'a> {
    pub x: &'a PointSet,
    pub weights: Option<&'a [f64]>,
    pub g: Option<&'a MarginalCdf>,
}

impl Nu<'_> {
    fn mu(&self, y: &[f64]) -> f64 {
        match self.g {
            Some(g) => g.measure(y),
            None => y.iter().product(),
        }
    }

    fn mass(&self, y: &[f64], strict: bool) -> f64 {
        let inside = |p: &[f64]| {
            p.iter()
                .zip(y)
                .all(|(a, b)| if strict { a < b } else { a <= b })
        };
        match self.weights {
            None => {
                let c = self.x.points().filter(|p| inside(p)).count();
                c as f64 / self.x.len() as f64
            }
            Some(w) => self
                .x
                .points()
                .zip(w)
                .filter(|(p, _)| inside(p))
                .map(|(_, &v)| v)
                .collect::<CompensatedSum>()
                .value(),
        }
    }

    /// Canonical local discrepancy at `y`.
    pub fn local(&self, y: &[f64], kind: BoxKind) -> f64 {
        match kind {
            BoxKind::Open => self.mu(y) - self.mass(y, true),
            BoxKind::Closed => self.mass(y, false) - self.mu(y),
        }
    }
}

/// Best corner found so far; ties keep the earlier one.
#[derive(Debug, Clone)]
pub(crate) struct Best {
    pub value: f64,
    pub corner: Vec<f64>,
    pub kind: BoxKind,
}

impl Best {
    pub fn empty() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            corner: Vec::new(),
            kind: BoxKind::Open,
        }
    }

    #[inline]
    pub fn offer(&mut self, value: f64, corner: &[f64], kind: BoxKind) {
        if value > self.value {
            self.value = value;
            self.corner.clear();
            self.corner.extend_from_slice(corner);
            self.kind = kind;
        }
    }

    pub fn merge(&mut self, other: Best) {
        if other.value > self.value {
            *self = other;
        }
    }
}

/// Corner lists to scan. Open boxes are scored at every corner, closed boxes
/// only where each coordinate index is below `closed_len[j]`.
pub(crate) struct Lattice {
    pub lists: Vec<Vec<f64>>,
    pub closed_len: Vec<usize>,
}

impl Lattice {
    pub fn size(&self) -> f64 {
        self.lists.iter().map(|l| l.len() as f64).product()
    }
}

struct Scanner<'a> {
    nu: Nu<'a>,
    lat: &'a Lattice,
    last: usize,
}

impl Scanner<'_> {
    fn factor(&self, j: usize, v: f64) -> f64 {
        match self.nu.g {
            Some(g) => g.eval(j, v),
            None => v,
        }
    }

    fn weight(&self, i: usize) -> f64 {
        match self.nu.weights {
            Some(w) => w[i],
            None => 1.0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn visit(
        &self,
        j: usize,
        open: &[usize],
        closed: Option<&[usize]>,
        mu: f64,
        y: &mut [f64],
        scratch: &mut [(Vec<usize>, Vec<usize>)],
        best: &mut Best,
    ) {
        if j == self.last {
            self.leaf(open, closed, mu, y, best);
            return;
        }
        let ((bo, bc), rest) = scratch.split_first_mut().expect("scratch per level");
        for (t, &v) in self.lat.lists[j].iter().enumerate() {
            y[j] = v;
            bo.clear();
            bo.extend(open.iter().copied().filter(|&i| self.nu.x.point(i)[j] < v));
            let child_closed = match closed {
                Some(c) if t < self.lat.closed_len[j] => {
                    bc.clear();
                    bc.extend(c.iter().copied().filter(|&i| self.nu.x.point(i)[j] <= v));
                    true
                }
                _ => false,
            };
            let mu_next = mu * self.factor(j, v);
            let bc_ref: Option<&[usize]> = if child_closed { Some(bc) } else { None };
            self.visit(j + 1, bo, bc_ref, mu_next, y, rest, best);
        }
    }

    /// Last axis: both index lists are sorted by the last coordinate.
    fn leaf(&self, open: &[usize], closed: Option<&[usize]>, mu: f64, y: &mut [f64], best: &mut Best) {
        let j = self.last;
        let x = self.nu.x;
        let n = x.len();
        let (mut po, mut pc) = (0, 0);
        let (mut co, mut cc) = (0usize, 0usize);
        let (mut wo, mut wc) = (CompensatedSum::new(), CompensatedSum::new());
        for (t, &v) in self.lat.lists[j].iter().enumerate() {
            y[j] = v;
            while po < open.len() && x.point(open[po])[j] < v {
                wo.add(self.weight(open[po]));
                co += 1;
                po += 1;
            }
            let m = mu * self.factor(j, v);
            let mass = match self.nu.weights {
                None => co as f64 / n as f64,
                Some(_) => wo.value(),
            };
            best.offer(m - mass, y, BoxKind::Open);
            if let Some(c) = closed {
                if t < self.lat.closed_len[j] {
                    while pc < c.len() && x.point(c[pc])[j] <= v {
                        wc.add(self.weight(c[pc]));
                        cc += 1;
                        pc += 1;
                    }
                    let mass = match self.nu.weights {
                        None => cc as f64 / n as f64,
                        Some(_) => wc.value(),
                    };
                    best.offer(mass - m, y, BoxKind::Closed);
                }
            }
        }
    }
}

/// Maximum local discrepancy over the lattice. The top axis is split across
/// threads; partial results combine in axis order.
pub(crate) fn scan(nu: Nu<'_>, lat: &Lattice) -> Best {
    let x = nu.x;
    let d = x.dim();
    let last = d - 1;
    let mut sorted: Vec<usize> = (0..x.len()).collect();
    sorted.sort_by(|&a, &b| x.point(a)[last].total_cmp(&x.point(b)[last]));
    let scanner = Scanner { nu, lat, last };
    let fresh_scratch = || vec![(Vec::new(), Vec::new()); d];
    if d == 1 {
        let mut best = Best::empty();
        let mut y = vec![0.0];
        scanner.leaf(&sorted, Some(&sorted), 1.0, &mut y, &mut best);
        return best;
    }
    let parts = par::map_range(lat.lists[0].len(), |t| {
        let v = lat.lists[0][t];
        let open: Vec<usize> = sorted.iter().copied().filter(|&i| x.point(i)[0] < v).collect();
        let closed: Option<Vec<usize>> = (t < lat.closed_len[0])
            .then(|| sorted.iter().copied().filter(|&i| x.point(i)[0] <= v).collect());
        let mut y = vec![0.0; d];
        y[0] = v;
        let mut best = Best::empty();
        let mut scratch = fresh_scratch();
        scanner.visit(
            1,
            &open,
            closed.as_deref(),
            scanner.factor(0, v),
            &mut y,
            &mut scratch[1..],
            &mut best,
        );
        best
    });
    let mut best = Best::empty();
    for b in parts {
        best.merge(b);
    }
    best
}

/// Open boxes over `Γ̄(X)` and closed boxes over `Γ(X)`.
fn induced_lattice(x: &PointSet) -> Lattice {
    let g = grid_view(x);
    Lattice {
        closed_len: g.axes.iter().map(|a| a.values.len()).collect(),
        lists: g.axes.iter().map(|a| a.closed_values()).collect(),
    }
}

/// Star discrepancy by scanning the whole induced grid.
pub fn star_grid_enum(x: &PointSet, budget: f64) -> Result<StarResult> {
    star_grid_enum_with(x, None, None, budget)
}

/// Grid enumeration for a weighted point measure and/or a reference measure
/// given by marginal distribution functions.
pub fn star_grid_enum_with(
    x: &PointSet,
    weights: Option<&[f64]>,
    g: Option<&MarginalCdf>,
    budget: f64,
) -> Result<StarResult> {
    if let Some(w) = weights {
        Error::check_dim(x.len(), w.len())?;
    }
    if let Some(g) = g {
        Error::check_dim(x.dim(), g.dim())?;
    }
    let lat = induced_lattice(x);
    Error::check_budget(
        lat.size() * x.dim() as f64,
        budget,
        "use the δ-cover or threshold-accepting bounds instead",
    )?;
    let nu = Nu { x, weights, g };
    let best = scan(nu, &lat);
    Ok(StarResult {
        value: nu.local(&best.corner, best.kind),
        witness: best.corner,
        kind: best.kind,
        method: Method::Grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::{local_discrepancy, WeightedPointSet};
    use crate::rng_from_seed;
    use rand::Rng;

    const BIG: f64 = 1e12;

    fn ps(d: usize, c: &[f64]) -> PointSet {
        PointSet::new(d, c.to_vec()).unwrap()
    }

    /// Every corner built from coordinates, 0 and 1, both box kinds.
    fn brute(x: &PointSet) -> f64 {
        let d = x.dim();
        let lists: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut v: Vec<f64> = x.points().map(|p| p[j]).collect();
                v.extend([0.0, 1.0]);
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            })
            .collect();
        let mut best = 0.0f64;
        let mut idx = vec![0; d];
        loop {
            let y: Vec<f64> = (0..d).map(|j| lists[j][idx[j]]).collect();
            best = best.max(local_discrepancy(&y, x).unwrap().delta_star);
            let mut j = 0;
            while j < d {
                idx[j] += 1;
                if idx[j] < lists[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == d {
                return best;
            }
        }
    }

    #[test]
    fn examples() {
        let r = star_grid_enum(&ps(2, &[0.5, 0.5]), BIG).unwrap();
        assert_eq!(r.value, 0.75);
        assert_eq!(r.witness, vec![0.5, 0.5]);
        assert_eq!(r.kind, BoxKind::Closed);

        let r = star_grid_enum(&ps(2, &[0.25, 0.75, 0.75, 0.25]), BIG).unwrap();
        assert_eq!(r.value, 0.5625);
        assert_eq!(r.witness, vec![0.75, 0.75]);
        assert_eq!(r.kind, BoxKind::Open);

        for n in 1..20 {
            let x = crate::generators::midpoint_set(n).unwrap();
            let r = star_grid_enum_with(&x, None, Some(&MarginalCdf::identity(1)), BIG).unwrap();
            assert!((r.value - 0.5 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_brute_force_with_ties() {
        let mut rng = rng_from_seed(21);
        for _ in 0..200 {
            let d = rng.random_range(1..=3);
            let n = rng.random_range(1..=7);
            let c: Vec<f64> = (0..n * d).map(|_| rng.random_range(0..6) as f64 / 6.0).collect();
            let x = ps(d, &c);
            let r = star_grid_enum(&x, BIG).unwrap();
            assert_eq!(r.value, brute(&x), "{c:?}");
            let l = local_discrepancy(&r.witness, &x).unwrap();
            let again = match r.kind {
                BoxKind::Open => l.delta,
                BoxKind::Closed => l.delta_bar,
            };
            assert_eq!(again, r.value);
        }
    }

    #[test]
    fn identity_marginals_are_lebesgue() {
        let mut rng = rng_from_seed(4);
        for _ in 0..30 {
            let d = rng.random_range(1..=4);
            let n = rng.random_range(1..=12);
            let x = ps(d, &(0..n * d).map(|_| rng.random()).collect::<Vec<_>>());
            let a = star_grid_enum(&x, BIG).unwrap();
            let b = star_grid_enum_with(&x, None, Some(&MarginalCdf::identity(d)), BIG).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.witness, b.witness);
        }
    }

    #[test]
    fn uniform_weights_match_counts() {
        let mut rng = rng_from_seed(5);
        for _ in 0..30 {
            let d = rng.random_range(1..=3);
            let n = rng.random_range(1..=10);
            let x = ps(d, &(0..n * d).map(|_| rng.random()).collect::<Vec<_>>());
            let w = WeightedPointSet::uniform(&x);
            let a = star_grid_enum(&x, BIG).unwrap();
            let b = star_grid_enum_with(&x, Some(w.weights()), None, BIG).unwrap();
            assert!((a.value - b.value).abs() < 1e-14);
        }
    }

    #[test]
    fn nonuniform_marginal() {
        // F(t) = t^2 sampled piecewise; a single point at its median.
        let g = MarginalCdf::new(vec![(vec![0.0, 0.5, 1.0], vec![0.0, 0.25, 1.0])]).unwrap();
        assert_eq!(g.eval(0, 0.75), 0.625);
        let x = ps(1, &[0.5]);
        let r = star_grid_enum_with(&x, None, Some(&g), BIG).unwrap();
        // Closed box [0, 0.5] holds the point, reference mass 0.25.
        assert_eq!(r.value, 0.75);
        assert!(MarginalCdf::new(vec![(vec![0.0, 0.5, 0.5, 1.0], vec![0.0, 0.2, 0.6, 1.0])]).is_err());
        assert!(MarginalCdf::new(vec![(vec![0.0, 1.0], vec![0.0, 0.9])]).is_err());
    }

    #[test]
    fn budget() {
        let x = ps(3, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        assert!(matches!(
            star_grid_enum(&x, 10.0),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
