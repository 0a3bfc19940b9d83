//! Point sets, anchored test boxes, induced grids and critical corners.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` points in `[0,1)^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    d: usize,
    coords: Vec<f64>,
}

fn check_unit(coords: &[f64], d: usize, closed: bool) -> Result<()> {
    for (k, &c) in coords.iter().enumerate() {
        let ok = if closed {
            (0.0..=1.0).contains(&c)
        } else {
            (0.0..1.0).contains(&c)
        };
        if !ok {
            return Err(Error::OutOfRange {
                point: k / d,
                axis: k % d,
                value: c,
                range: if closed { "[0,1]" } else { "[0,1)" },
            });
        }
    }
    Ok(())
}

impl PointSet {
    /// Builds a point set from row-major coordinates.
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if coords.is_empty() {
            return Err(Error::Empty("point set"));
        }
        if coords.len() % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: coords.len() % d,
            });
        }
        check_unit(&coords, d, false)?;
        Ok(Self { d, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("point set"))?;
        let d = first.as_ref().len();
        let mut coords = Vec::with_capacity(d * points.len());
        for p in points {
            Error::check_dim(d, p.as_ref().len())?;
            coords.extend_from_slice(p.as_ref());
        }
        Self::new(d, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    /// Always false; a point set holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Projection onto the listed axes, in the given order.
    pub fn project(&self, axes: &[usize]) -> Result<PointSet> {
        if axes.is_empty() {
            return Err(Error::invalid("projection needs at least one axis"));
        }
        if let Some(&bad) = axes.iter().find(|&&a| a >= self.d) {
            return Err(Error::invalid(format!(
                "axis {bad} out of range for d={}",
                self.d
            )));
        }
        let coords = self
            .points()
            .flat_map(|p| axes.iter().map(move |&a| p[a]))
            .collect();
        Ok(PointSet {
            d: axes.len(),
            coords,
        })
    }
}

/// Points in `[0,1)^d` carrying real (possibly negative) weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet {
    points: PointSet,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(points: PointSet, weights: Vec<f64>) -> Result<Self> {
        Error::check_dim(points.len(), weights.len())?;
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::invalid(format!("weight {w} is not finite")));
        }
        Ok(Self { points, weights })
    }

    /// Equal weights `1/n`, the empirical measure of `X`.
    pub fn uniform(points: &PointSet) -> Self {
        let w = 1.0 / points.len() as f64;
        Self {
            weights: vec![w; points.len()],
            points: points.clone(),
        }
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Checks that `y` is a corner in `[0,1]^d`.
pub fn check_corner(y: &[f64], d: usize) -> Result<()> {
    Error::check_dim(d, y.len())?;
    check_unit(y, d, true)
}

/// Volume of the anchored box `[0,y)`.
#[inline]
pub fn volume(y: &[f64]) -> f64 {
    y.iter().product()
}

/// Counts of points in `[0,y)` and in `[0,y]`.
pub fn box_counts(y: &[f64], x: &PointSet) -> (usize, usize) {
    let mut open = 0;
    let mut closed = 0;
    for p in x.points() {
        if p.iter().zip(y).all(|(a, b)| a <= b) {
            closed += 1;
            if p.iter().zip(y).all(|(a, b)| a < b) {
                open += 1;
            }
        }
    }
    (open, closed)
}

/// `V_y - A(y)/n`.
#[inline]
pub fn delta_value(y: &[f64], open: usize, n: usize) -> f64 {
    volume(y) - open as f64 / n as f64
}

/// `Ā(y)/n - V_y`.
#[inline]
pub fn delta_bar_value(y: &[f64], closed: usize, n: usize) -> f64 {
    closed as f64 / n as f64 - volume(y)
}

/// Local discrepancy of `X` at one corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalDiscrepancy {
    pub delta: f64,
    pub delta_bar: f64,
    pub delta_star: f64,
    pub open_count: usize,
    pub closed_count: usize,
    pub volume: f64,
}

pub fn local_discrepancy(y: &[f64], x: &PointSet) -> Result<LocalDiscrepancy> {
    check_corner(y, x.dim())?;
    let n = x.len();
    let (open, closed) = box_counts(y, x);
    let delta = delta_value(y, open, n);
    let delta_bar = delta_bar_value(y, closed, n);
    Ok(LocalDiscrepancy {
        delta,
        delta_bar,
        delta_star: delta.max(delta_bar),
        open_count: open,
        closed_count: closed,
        volume: volume(y),
    })
}

/// One axis of the induced grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    /// Distinct coordinate values, strictly increasing.
    pub values: Vec<f64>,
    /// Point indices ordered by coordinate, ties by index.
    pub order: Vec<usize>,
}

impl GridAxis {
    /// `Γ̄_j`: the distinct values followed by 1.
    pub fn closed_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.push(1.0);
        v
    }
}

/// Per-axis sorted coordinate values of a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct GridView {
    pub axes: Vec<GridAxis>,
}

impl GridView {
    /// Number of corners in `Γ(X)`, as a float to survive overflow.
    pub fn open_size(&self) -> f64 {
        self.axes.iter().map(|a| a.values.len() as f64).product()
    }

    /// Number of corners in `Γ̄(X)`.
    pub fn closed_size(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| (a.values.len() + 1) as f64)
            .product()
    }
}

pub fn grid_view(x: &PointSet) -> GridView {
    let n = x.len();
    let axes = (0..x.dim())
        .map(|j| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| x.point(a)[j].total_cmp(&x.point(b)[j]));
            let mut values: Vec<f64> = order.iter().map(|&i| x.point(i)[j]).collect();
            values.dedup();
            GridAxis { values, order }
        })
        .collect();
    GridView { axes }
}

/// Which anchored boxes at a corner are critical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criticality {
    /// `[0,y)` gains a point under every feasible enlargement.
    pub delta: bool,
    /// `[0,y]` loses a point under every feasible shrinking.
    pub delta_bar: bool,
}

pub fn classify_critical(y: &[f64], x: &PointSet) -> Result<Criticality> {
    check_corner(y, x.dim())?;
    let d = x.dim();
    let mut open_blocked = vec![false; d];
    let mut closed_blocked = vec![false; d];
    for p in x.points() {
        // Axes where p sits exactly on the face of the box.
        let mut on_face = None;
        let mut faces = 0;
        let mut inside_closed = true;
        for j in 0..d {
            if p[j] > y[j] {
                inside_closed = false;
                break;
            }
            if p[j] == y[j] {
                faces += 1;
                on_face = Some(j);
            }
        }
        if !inside_closed {
            continue;
        }
        if faces == 1 {
            open_blocked[on_face.unwrap()] = true;
        }
        for j in 0..d {
            if p[j] == y[j] {
                closed_blocked[j] = true;
            }
        }
    }
    Ok(Criticality {
        delta: (0..d).all(|j| y[j] == 1.0 || open_blocked[j]),
        delta_bar: (0..d).all(|j| y[j] == 0.0 || closed_blocked[j]),
    })
}

/// Kind of anchored test box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxKind {
    /// `[0,y)`, scored by `δ`.
    Open,
    /// `[0,y]`, scored by `δ̄`.
    Closed,
}

impl BoxKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoxKind::Open => "open",
            BoxKind::Closed => "closed",
        }
    }
}

/// A critical corner together with its box kind and count.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalCorner {
    pub corner: Vec<f64>,
    pub kind: BoxKind,
    pub count: usize,
}

fn for_each_grid_corner(lists: &[Vec<f64>], mut f: impl FnMut(&[f64])) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let d = lists.len();
    let mut idx = vec![0usize; d];
    let mut y: Vec<f64> = lists.iter().map(|l| l[0]).collect();
    loop {
        f(&y);
        let mut j = d;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < lists[j].len() {
                y[j] = lists[j][idx[j]];
                break;
            }
            idx[j] = 0;
            y[j] = lists[j][0];
        }
    }
}

/// Critical corners of `X`: `δ`-critical ones in `Γ̄(X)` and
/// `δ̄`-critical ones in `Γ(X)`, optionally restricted to count `k`.
pub fn enumerate_critical(
    x: &PointSet,
    k: Option<usize>,
    budget: usize,
) -> Result<Vec<CriticalCorner>> {
    let grid = grid_view(x);
    let work = grid.open_size() + grid.closed_size();
    Error::check_budget(work, budget as f64, "enumerate a smaller point set")?;
    let mut out = Vec::new();
    let closed_lists: Vec<Vec<f64>> = grid.axes.iter().map(|a| a.closed_values()).collect();
    for_each_grid_corner(&closed_lists, |y| {
        let c = classify_critical(y, x).expect("grid corner is valid");
        let (open, _) = box_counts(y, x);
        if c.delta && k.is_none_or(|k| k == open) {
            out.push(CriticalCorner {
                corner: y.to_vec(),
                kind: BoxKind::Open,
                count: open,
            });
        }
    });
    let open_lists: Vec<Vec<f64>> = grid.axes.iter().map(|a| a.values.clone()).collect();
    for_each_grid_corner(&open_lists, |y| {
        let c = classify_critical(y, x).expect("grid corner is valid");
        let (_, closed) = box_counts(y, x);
        if c.delta_bar && k.is_none_or(|k| k == closed) {
            out.push(CriticalCorner {
                corner: y.to_vec(),
                kind: BoxKind::Closed,
                count: closed,
            });
        }
    });
    Ok(out)
}

/// Smallest corner below `y` whose closed box holds the same points.
pub fn snap_down(y: &[f64], x: &PointSet) -> Result<Vec<f64>> {
    check_corner(y, x.dim())?;
    let mut out = vec![0.0; x.dim()];
    for p in x.points() {
        if p.iter().zip(y).all(|(a, b)| a <= b) {
            for (o, &c) in out.iter_mut().zip(p) {
                if c > *o {
                    *o = c;
                }
            }
        }
    }
    Ok(out)
}

/// Greedily enlarges `y` axis by axis, in random order, as far as possible
/// without adding points to the open box.
pub fn snap_up<R: Rng + ?Sized>(y: &[f64], x: &PointSet, rng: &mut R) -> Result<Vec<f64>> {
    check_corner(y, x.dim())?;
    let d = x.dim();
    let mut z = y.to_vec();
    // Number of axes on which each point is outside [0,z).
    let mut blocked: Vec<u32> = x
        .points()
        .map(|p| p.iter().zip(&z).filter(|(a, b)| a >= b).count() as u32)
        .collect();
    let mut axes: Vec<usize> = (0..d).collect();
    axes.shuffle(rng);
    for j in axes {
        let mut limit = 1.0f64;
        for (p, &b) in x.points().zip(&blocked) {
            if b == 1 && p[j] >= z[j] && p[j] < limit {
                limit = p[j];
            }
        }
        for (p, b) in x.points().zip(blocked.iter_mut()) {
            if p[j] >= z[j] && p[j] < limit {
                *b -= 1;
            }
        }
        z[j] = limit;
    }
    Ok(z)
}
