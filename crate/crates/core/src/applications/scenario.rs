//! Scenario reduction of discrete measures under the anchored-box distance.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::pointset::PointSet;

use super::simplex;

/// Default limit on the number of cells of the union grid.
pub const DEFAULT_SCENARIO_BUDGET: f64 = 2e7;
/// Largest number of candidate boxes handed to the simplex solver.
pub const MAX_LP_BOXES: usize = 500;

const GRID_HINT: &str = "use d <= 3 or smaller supports";
const LP_HINT: &str = "too many supporting boxes for the bundled simplex; use nearest-atom weights";

/// Finitely many atoms in `[0,1]^d` with probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteMeasure {
    /// `atoms` is row-major. Probabilities must be nonnegative and sum to 1
    /// within `tol`; atoms must be distinct.
    pub fn with_tolerance(dim: usize, atoms: Vec<f64>, probs: Vec<f64>, tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if probs.is_empty() {
            return Err(Error::Empty("measure has no atoms"));
        }
        if atoms.len() != dim * probs.len() {
            return Err(Error::invalid(format!(
                "{} coordinates do not form {} atoms of dimension {dim}",
                atoms.len(),
                probs.len()
            )));
        }
        for (k, &v) in atoms.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    point: k / dim,
                    axis: k % dim,
                    value: v,
                    range: "[0,1]",
                });
            }
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid(format!("probability {p} is negative or not finite")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        let m = Self { dim, atoms, probs };
        let mut order: Vec<usize> = (0..m.len()).collect();
        order.sort_by(|&a, &b| lex(m.atom(a), m.atom(b)));
        if let Some(w) = order.windows(2).find(|w| m.atom(w[0]) == m.atom(w[1])) {
            return Err(Error::invalid(format!("atoms {} and {} coincide", w[0], w[1])));
        }
        Ok(m)
    }

    pub fn new(dim: usize, atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(dim, atoms, probs, 1e-12)
    }

    /// Equal weights on the points of `x`.
    pub fn uniform(x: &PointSet) -> Result<Self> {
        let n = x.len();
        Self::new(x.dim(), x.as_flat().to_vec(), vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i * self.dim..(i + 1) * self.dim]
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The atoms at `support` carrying `weights`.
    fn restrict(&self, support: &[usize], weights: Vec<f64>) -> Result<Self> {
        let atoms = support.iter().flat_map(|&i| self.atom(i).iter().copied()).collect();
        Self::with_tolerance(self.dim, atoms, weights, 1e-9)
    }
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Ranks of the atoms on the grid of their distinct coordinates.
struct RankGrid {
    sizes: Vec<usize>,
    ranks: Vec<Vec<usize>>,
}

impl RankGrid {
    fn new(dim: usize, points: &[&[f64]], budget: f64) -> Result<Self> {
        let mut sizes = Vec::with_capacity(dim);
        let mut columns = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut vals: Vec<f64> = points.iter().map(|p| p[j]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            sizes.push(vals.len());
            columns.push(vals);
        }
        let cells: f64 = sizes.iter().map(|&m| m as f64).product();
        Error::check_budget(cells, budget, GRID_HINT)?;
        let ranks = points
            .iter()
            .map(|p| {
                (0..dim)
                    .map(|j| columns[j].partition_point(|&v| v < p[j]))
                    .collect()
            })
            .collect();
        Ok(Self { sizes, ranks })
    }

    fn cells(&self) -> usize {
        self.sizes.iter().product()
    }

    fn index(&self, r: &[usize]) -> usize {
        r.iter().zip(&self.sizes).fold(0, |acc, (&c, &m)| acc * m + c)
    }

    /// `out[c]` = total weight of atoms with rank `≤ c` on every axis.
    fn cumulative(&self, weights: &[f64]) -> Vec<f64> {
        let mut arr = vec![0.0; self.cells()];
        for (r, &w) in self.ranks.iter().zip(weights) {
            arr[self.index(r)] += w;
        }
        let mut stride = 1;
        for &m in self.sizes.iter().rev() {
            for i in 0..arr.len() {
                if (i / stride) % m > 0 {
                    arr[i] += arr[i - stride];
                }
            }
            stride *= m;
        }
        arr
    }
}

/// `sup_B |P(B) - Q(B)|` over anchored boxes, open or closed on each axis.
/// Both measures are constant between consecutive coordinates of the joint
/// support, so the supremum is a maximum over rank thresholds.
pub fn two_measure_star_disc(p: &DiscreteMeasure, q: &DiscreteMeasure, budget: f64) -> Result<f64> {
    Error::check_dim(p.dim(), q.dim())?;
    let points: Vec<&[f64]> = (0..p.len()).map(|i| p.atom(i)).chain((0..q.len()).map(|i| q.atom(i))).collect();
    let weights: Vec<f64> = p.probs().iter().copied().chain(q.probs().iter().map(|v| -v)).collect();
    let grid = RankGrid::new(p.dim(), &points, budget)?;
    Ok(grid.cumulative(&weights).iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// Boxes whose faces each touch an atom inside them; one per realizable
/// subset of the support.
struct SupportingBoxes {
    /// `members[b][i]`: atom `i` lies in box `b`.
    members: Vec<Vec<bool>>,
    mass: Vec<f64>,
}

impl SupportingBoxes {
    fn new(p: &DiscreteMeasure, budget: f64) -> Result<Self> {
        let points: Vec<&[f64]> = (0..p.len()).map(|i| p.atom(i)).collect();
        let grid = RankGrid::new(p.dim(), &points, budget / p.len() as f64)?;
        let d = p.dim();
        let mut members = Vec::new();
        let mut mass = Vec::new();
        let mut c = vec![0usize; d];
        'cells: loop {
            let inside: Vec<bool> = grid.ranks.iter().map(|r| r.iter().zip(&c).all(|(a, b)| a <= b)).collect();
            let touched = (0..d).all(|j| grid.ranks.iter().zip(&inside).any(|(r, &s)| s && r[j] == c[j]));
            if touched {
                if members.len() == MAX_LP_BOXES {
                    return Err(Error::BudgetExceeded {
                        work: (MAX_LP_BOXES + 1) as f64,
                        budget: MAX_LP_BOXES as f64,
                        hint: LP_HINT,
                    });
                }
                mass.push(inside.iter().zip(p.probs()).filter(|(s, _)| **s).map(|(_, w)| w).sum());
                members.push(inside);
            }
            for j in (0..d).rev() {
                c[j] += 1;
                if c[j] < grid.sizes[j] {
                    continue 'cells;
                }
                c[j] = 0;
            }
            break;
        }
        Ok(Self { members, mass })
    }

    /// Linear program in `(q, t, s⁺, s⁻)`: minimize `t` with
    /// `Q(B) - t + s⁺ = P(B)`, `Q(B) + t - s⁻ = P(B)`, `Σ q = 1`.
    fn solve(&self, support: &[usize]) -> Result<(Vec<f64>, f64)> {
        let k = support.len();
        let nb = self.members.len();
        let cols = k + 1 + 2 * nb;
        let mut a = Vec::with_capacity(2 * nb + 1);
        let mut b = Vec::with_capacity(2 * nb + 1);
        for (bx, (mem, &mass)) in self.members.iter().zip(&self.mass).enumerate() {
            for sign in [1.0, -1.0] {
                let mut row = vec![0.0; cols];
                for (col, &i) in support.iter().enumerate() {
                    if mem[i] {
                        row[col] = 1.0;
                    }
                }
                row[k] = -sign;
                row[k + 1 + 2 * bx + usize::from(sign < 0.0)] = sign;
                a.push(row);
                b.push(mass);
            }
        }
        let mut row = vec![0.0; cols];
        row[..k].fill(1.0);
        a.push(row);
        b.push(1.0);
        let mut c = vec![0.0; cols];
        c[k] = 1.0;
        let sol = simplex::minimize(&a, &b, &c)?;
        Ok((normalize(sol.x[..k].to_vec())?, sol.objective))
    }
}

fn normalize(mut q: Vec<f64>) -> Result<Vec<f64>> {
    for v in &mut q {
        *v = v.max(0.0);
    }
    let s: f64 = q.iter().sum();
    if !(s > 0.0) {
        return Err(Error::Numeric("inner weights vanished".into()));
    }
    for v in &mut q {
        *v /= s;
    }
    Ok(q)
}

fn check_support(p: &DiscreteMeasure, y: &[usize]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::Empty("reduced support"));
    }
    let mut s = y.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != y.len() || s.last().is_some_and(|&i| i >= p.len()) {
        return Err(Error::invalid("support must be distinct atom indices of the measure"));
    }
    Ok(())
}

/// Best weights for the atoms `y` of `p` (indices into `p`) and the
/// resulting distance, recomputed from the normalized weights.
pub fn optimal_inner_weights(p: &DiscreteMeasure, y: &[usize], budget: f64) -> Result<(Vec<f64>, f64)> {
    check_support(p, y)?;
    let boxes = SupportingBoxes::new(p, budget)?;
    let (q, _) = boxes.solve(y)?;
    let dist = two_measure_star_disc(p, &p.restrict(y, q.clone())?, budget)?;
    Ok((q, dist))
}

/// Mass of each atom of `p` moved to its nearest atom of `y` (Euclidean,
/// ties to the earlier entry of `y`).
pub fn nearest_atom_weights(p: &DiscreteMeasure, y: &[usize]) -> Result<Vec<f64>> {
    check_support(p, y)?;
    let mut q = vec![0.0; y.len()];
    for i in 0..p.len() {
        let a = p.atom(i);
        let mut best = (f64::INFINITY, 0);
        for (k, &j) in y.iter().enumerate() {
            let dist: f64 = a.iter().zip(p.atom(j)).map(|(u, v)| (u - v) * (u - v)).sum();
            if dist < best.0 {
                best = (dist, k);
            }
        }
        q[best.1] += p.probs()[i];
    }
    normalize(q)
}

/// Reduced measure with the selection history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionResult {
    /// Indices of the kept atoms in the original measure, increasing.
    pub support: Vec<usize>,
    pub measure: DiscreteMeasure,
    pub distance: f64,
    /// `(support size, distance)` after each step.
    pub trace: Vec<(usize, f64)>,
}

struct Reducer<'a> {
    p: &'a DiscreteMeasure,
    boxes: Option<SupportingBoxes>,
    budget: f64,
}

impl<'a> Reducer<'a> {
    fn new(p: &'a DiscreteMeasure, exact_inner: bool, budget: f64) -> Result<Self> {
        let boxes = if exact_inner {
            Some(SupportingBoxes::new(p, budget)?)
        } else {
            None
        };
        Ok(Self { p, boxes, budget })
    }

    fn evaluate(&self, y: &[usize]) -> Result<(DiscreteMeasure, f64)> {
        let q = match &self.boxes {
            Some(b) => b.solve(y)?.0,
            None => nearest_atom_weights(self.p, y)?,
        };
        let m = self.p.restrict(y, q)?;
        let dist = two_measure_star_disc(self.p, &m, self.budget)?;
        Ok((m, dist))
    }

    /// Evaluates every candidate support and keeps the smallest distance,
    /// the earliest candidate winning near-ties.
    fn best(&self, candidates: Vec<Vec<usize>>) -> Result<(Vec<usize>, DiscreteMeasure, f64)> {
        let results = par::map_slice(&candidates, |y| self.evaluate(y));
        let mut best: Option<(usize, DiscreteMeasure, f64)> = None;
        for (k, r) in results.into_iter().enumerate() {
            let (m, dist) = r?;
            if best.as_ref().is_none_or(|b| dist < b.2 - 1e-12) {
                best = Some((k, m, dist));
            }
        }
        let (k, m, dist) = best.expect("at least one candidate");
        Ok((candidates[k].clone(), m, dist))
    }

    fn finish(&self, support: Vec<usize>, trace: Vec<(usize, f64)>) -> Result<ReductionResult> {
        let (measure, distance) = self.evaluate(&support)?;
        Ok(ReductionResult {
            support,
            measure,
            distance,
            trace,
        })
    }
}

fn check_target(p: &DiscreteMeasure, n: usize) -> Result<()> {
    if n == 0 || n > p.len() {
        return Err(Error::invalid(format!("target size {n} must lie in 1..={}", p.len())));
    }
    Ok(())
}

/// Grows the support greedily from the empty set.
pub fn forward_selection(p: &DiscreteMeasure, n: usize, exact_inner: bool, budget: f64) -> Result<ReductionResult> {
    check_target(p, n)?;
    let r = Reducer::new(p, exact_inner, budget)?;
    let mut y: Vec<usize> = Vec::new();
    let mut trace = Vec::with_capacity(n);
    while y.len() < n {
        let candidates = (0..p.len())
            .filter(|i| !y.contains(i))
            .map(|i| {
                let mut c = y.clone();
                c.push(i);
                c.sort_unstable();
                c
            })
            .collect();
        let (next, _, dist) = r.best(candidates)?;
        y = next;
        trace.push((y.len(), dist));
    }
    r.finish(y, trace)
}

/// Shrinks the full support greedily.
pub fn backward_selection(p: &DiscreteMeasure, n: usize, exact_inner: bool, budget: f64) -> Result<ReductionResult> {
    check_target(p, n)?;
    let r = Reducer::new(p, exact_inner, budget)?;
    let mut y: Vec<usize> = (0..p.len()).collect();
    let mut trace = Vec::with_capacity(p.len() - n);
    while y.len() > n {
        let candidates = (0..y.len())
            .map(|k| {
                let mut c = y.clone();
                c.remove(k);
                c
            })
            .collect();
        let (next, _, dist) = r.best(candidates)?;
        y = next;
        trace.push((y.len(), dist));
    }
    r.finish(y, trace)
}
