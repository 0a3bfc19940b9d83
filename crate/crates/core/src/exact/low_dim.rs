//! Closed-form star discrepancy in dimensions one to three.

use crate::error::{Error, Result};
use crate::pointset::{BoxKind, PointSet};

use super::{finish, Method, StarResult};

fn require_dim(x: &PointSet, d: usize) -> Result<()> {
    if x.dim() == d {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "this method needs d={d}, the point set has d={}",
            x.dim()
        )))
    }
}

struct Tracker {
    value: f64,
    corner: Vec<f64>,
    kind: BoxKind,
}

impl Tracker {
    fn new(d: usize) -> Self {
        Self {
            value: f64::NEG_INFINITY,
            corner: vec![0.0; d],
            kind: BoxKind::Open,
        }
    }

    #[inline]
    fn offer(&mut self, value: f64, corner: &[f64], kind: BoxKind) {
        if value > self.value {
            self.value = value;
            self.corner.copy_from_slice(corner);
            self.kind = kind;
        }
    }
}

/// `max_i max(i/n - x_(i), x_(i) - (i-1)/n)` over the sorted points.
pub fn star_1d(x: &PointSet) -> Result<StarResult> {
    require_dim(x, 1)?;
    let n = x.len();
    let mut xs: Vec<f64> = x.as_flat().to_vec();
    xs.sort_by(f64::total_cmp);
    let mut t = Tracker::new(1);
    for (k, &v) in xs.iter().enumerate() {
        let i = k + 1;
        t.offer(i as f64 / n as f64 - v, &[v], BoxKind::Closed);
        t.offer(v - (i - 1) as f64 / n as f64, &[v], BoxKind::Open);
    }
    Ok(finish(x, t.corner, t.kind, Method::OneD))
}

fn sorted_by_first(x: &PointSet) -> Vec<&[f64]> {
    let mut pts: Vec<&[f64]> = x.points().collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
    pts
}

/// Inserts `v` into a sorted vector, after any equal entries.
fn insert_sorted<T: Copy>(v: &mut Vec<T>, item: T, key: impl Fn(&T) -> f64) {
    let k = key(&item);
    let pos = v.partition_point(|e| key(e) <= k);
    v.insert(pos, item);
}

/// Bundschuh–Zhu formula for `d = 2`, `O(n^2)`.
pub fn star_2d(x: &PointSet) -> Result<StarResult> {
    require_dim(x, 2)?;
    let n = x.len();
    let nf = n as f64;
    let pts = sorted_by_first(x);
    let first = |i: usize| -> f64 {
        match i {
            0 => 0.0,
            i if i > n => 1.0,
            i => pts[i - 1][0],
        }
    };
    let mut t = Tracker::new(2);
    // xi = [0, sorted second coordinates of the first i points, 1].
    let mut xi: Vec<f64> = vec![0.0, 1.0];
    for i in 0..=n {
        if i > 0 {
            let v = pts[i - 1][1];
            let pos = xi[1..xi.len() - 1].partition_point(|&e| e <= v) + 1;
            xi.insert(pos, v);
        }
        let (a, b) = (first(i), first(i + 1));
        for k in 0..=i {
            let kn = k as f64 / nf;
            t.offer(kn - a * xi[k], &[a, xi[k]], BoxKind::Closed);
            t.offer(b * xi[k + 1] - kn, &[b, xi[k + 1]], BoxKind::Open);
        }
    }
    Ok(finish(x, t.corner, t.kind, Method::TwoD))
}

/// Bundschuh–Zhu formula for `d = 3`, `O(n^3)`.
pub fn star_3d(x: &PointSet) -> Result<StarResult> {
    require_dim(x, 3)?;
    let n = x.len();
    let nf = n as f64;
    let pts = sorted_by_first(x);
    let first = |i: usize| -> f64 {
        match i {
            0 => 0.0,
            i if i > n => 1.0,
            i => pts[i - 1][0],
        }
    };
    let mut t = Tracker::new(3);
    // (second, third) coordinates of the first i points, sorted by second.
    let mut plane: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut eta: Vec<f64> = Vec::with_capacity(n + 2);
    for i in 0..=n {
        if i > 0 {
            insert_sorted(&mut plane, (pts[i - 1][1], pts[i - 1][2]), |p| p.0);
        }
        let (a, b) = (first(i), first(i + 1));
        let xi = |k: usize| -> f64 {
            match k {
                0 => 0.0,
                k if k > i => 1.0,
                k => plane[k - 1].0,
            }
        };
        eta.clear();
        eta.extend([0.0, 1.0]);
        for k in 0..=i {
            if k > 0 {
                let v = plane[k - 1].1;
                let pos = eta[1..eta.len() - 1].partition_point(|&e| e <= v) + 1;
                eta.insert(pos, v);
            }
            let (lo, hi) = (xi(k), xi(k + 1));
            for l in 0..=k {
                let ln = l as f64 / nf;
                t.offer(ln - a * lo * eta[l], &[a, lo, eta[l]], BoxKind::Closed);
                t.offer(b * hi * eta[l + 1] - ln, &[b, hi, eta[l + 1]], BoxKind::Open);
            }
        }
    }
    Ok(finish(x, t.corner, t.kind, Method::ThreeD))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::star_grid_enum;
    use crate::generators::{halton, midpoint_set};
    use crate::rng_from_seed;
    use rand::Rng;

    fn random_set(rng: &mut impl Rng, n: usize, d: usize, levels: Option<u32>) -> PointSet {
        let c = (0..n * d)
            .map(|_| match levels {
                Some(l) => rng.random_range(0..l) as f64 / l as f64,
                None => rng.random(),
            })
            .collect();
        PointSet::new(d, c).unwrap()
    }

    #[test]
    fn one_dimensional() {
        for n in 1..=200 {
            let r = star_1d(&midpoint_set(n).unwrap()).unwrap();
            assert!((r.value - 0.5 / n as f64).abs() <= 1e-15);
        }
        assert_eq!(star_1d(&PointSet::new(1, vec![0.5]).unwrap()).unwrap().value, 0.5);
        let r = star_1d(&PointSet::new(1, vec![0.0]).unwrap()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.kind, BoxKind::Closed);
        assert!(star_1d(&PointSet::new(2, vec![0.5, 0.5]).unwrap()).is_err());
    }

    #[test]
    fn two_dimensional_examples() {
        let r = star_2d(&PointSet::new(2, vec![0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(r.value, 0.75);
        let r = star_2d(&PointSet::new(2, vec![0.25, 0.75, 0.75, 0.25]).unwrap()).unwrap();
        assert_eq!(r.value, 0.5625);
    }

    #[test]
    fn three_dimensional_examples() {
        let r = star_3d(&PointSet::new(3, vec![0.5; 3]).unwrap()).unwrap();
        assert_eq!(r.value, 0.875);
        let h = halton(8, 3, None).unwrap();
        let g = star_grid_enum(&h, 1e12).unwrap();
        assert!((star_3d(&h).unwrap().value - g.value).abs() <= 1e-14);
    }

    #[test]
    fn agree_with_grid_enumeration() {
        let mut rng = rng_from_seed(31);
        for case in 0..150 {
            let levels = if case % 2 == 0 { Some(5) } else { None };
            let n = rng.random_range(1..=24);
            let x1 = random_set(&mut rng, n, 1, levels);
            let x2 = random_set(&mut rng, n.min(16), 2, levels);
            let x3 = random_set(&mut rng, n.min(12), 3, levels);
            let g1 = star_grid_enum(&x1, 1e12).unwrap().value;
            let g2 = star_grid_enum(&x2, 1e12).unwrap().value;
            let g3 = star_grid_enum(&x3, 1e12).unwrap().value;
            assert!((star_1d(&x1).unwrap().value - g1).abs() <= 1e-14);
            assert!((star_2d(&x2).unwrap().value - g2).abs() <= 1e-14, "{x2:?}");
            assert!((star_3d(&x3).unwrap().value - g3).abs() <= 1e-14, "{x3:?}");
        }
    }
}
