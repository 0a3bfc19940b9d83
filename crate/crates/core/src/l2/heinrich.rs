//! Divide-and-conquer evaluation of `Σ_i Σ_j v_i w_j ∏_k min(y_k, z_k)`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::par;
use crate::pointset::WeightedPointSet;
use crate::sum::CompensatedSum;

/// Below this many point pairs the recursion evaluates directly.
const DIRECT_PAIRS: usize = 64;
/// Below this many points the four subproblems run sequentially.
const PARALLEL_POINTS: usize = 4096;

/// Weighted points in `[0,1]^dim`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeinrichArray {
    dim: usize,
    weights: Vec<f64>,
    coords: Vec<f64>,
}

impl HeinrichArray {
    pub fn new(dim: usize, weights: Vec<f64>, coords: Vec<f64>) -> Result<Self> {
        Error::check_dim(weights.len() * dim, coords.len())?;
        if let Some(c) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::invalid(format!("coordinate {c} outside [0,1]")));
        }
        Ok(Self {
            dim,
            weights,
            coords,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// The listed entries, keeping the first `keep` coordinates and scaling
    /// weights by coordinate `scale_by` when given.
    fn gather(&self, idx: &[usize], keep: usize, scale_by: Option<usize>) -> Self {
        let mut weights = Vec::with_capacity(idx.len());
        let mut coords = Vec::with_capacity(idx.len() * keep);
        for &i in idx {
            let p = self.point(i);
            weights.push(match scale_by {
                Some(k) => self.weights[i] * p[k],
                None => self.weights[i],
            });
            coords.extend_from_slice(&p[..keep]);
        }
        Self {
            dim: keep,
            weights,
            coords,
        }
    }
}

fn direct(a: &HeinrichArray, b: &HeinrichArray, d: usize) -> f64 {
    let mut s = CompensatedSum::new();
    for i in 0..a.len() {
        let y = &a.point(i)[..d];
        let mut row = CompensatedSum::new();
        for j in 0..b.len() {
            let z = &b.point(j)[..d];
            let prod: f64 = y.iter().zip(z).map(|(p, q)| p.min(*q)).product();
            row.add(b.weights[j] * prod);
        }
        s.add(a.weights[i] * row.value());
    }
    s.value()
}

/// One-dimensional case by sorting both sides and sweeping.
fn sweep(a: &HeinrichArray, b: &HeinrichArray) -> f64 {
    let key = |arr: &HeinrichArray| {
        let mut v: Vec<(f64, f64)> = (0..arr.len())
            .map(|i| (arr.point(i)[0], arr.weights[i]))
            .collect();
        v.sort_by(|p, q| p.0.total_cmp(&q.0));
        v
    };
    let ys = key(a);
    let zs = key(b);
    // Suffix sums of w over z > y and prefix sums of w z over z ≤ y.
    let mut total_w = CompensatedSum::new();
    for &(_, w) in &zs {
        total_w.add(w);
    }
    let mut below_wz = CompensatedSum::new();
    let mut below_w = CompensatedSum::new();
    let mut s = CompensatedSum::new();
    let mut j = 0;
    for &(y, v) in &ys {
        while j < zs.len() && zs[j].0 <= y {
            below_wz.add(zs[j].1 * zs[j].0);
            below_w.add(zs[j].1);
            j += 1;
        }
        let above_w = total_w.value() - below_w.value();
        s.add(v * (below_wz.value() + y * above_w));
    }
    s.value()
}

fn recurse(a: &HeinrichArray, b: &HeinrichArray, d: usize) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if d == 0 {
        let sa: f64 = a.weights.iter().copied().collect::<CompensatedSum>().value();
        let sb: f64 = b.weights.iter().copied().collect::<CompensatedSum>().value();
        return sa * sb;
    }
    if a.len() == 1 || a.len() * b.len() <= DIRECT_PAIRS {
        return direct(a, b, d);
    }
    if d == 1 {
        return sweep(a, b);
    }
    let k = d - 1;
    let n = a.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let by_key = |&i: &usize, &j: &usize| -> Ordering {
        a.point(i)[k]
            .total_cmp(&a.point(j)[k])
            .then(i.cmp(&j))
    };
    let half = n / 2;
    idx.select_nth_unstable_by(half - 1, by_key);
    let mu = a.point(idx[half - 1])[k];
    let (left, right) = idx.split_at(half);
    let mut left = left.to_vec();
    let mut right = right.to_vec();
    left.sort_unstable();
    right.sort_unstable();
    let (b_left, b_right): (Vec<usize>, Vec<usize>) =
        (0..b.len()).partition(|&j| b.point(j)[k] <= mu);

    let a_l = a.gather(&left, d, None);
    let a_r = a.gather(&right, d, None);
    let b_l = b.gather(&b_left, d, None);
    let b_r = b.gather(&b_right, d, None);
    let a_l_tilde = a.gather(&left, k, Some(k));
    let a_r_bar = a.gather(&right, k, None);
    let b_l_tilde = b.gather(&b_left, k, Some(k));
    let b_r_bar = b.gather(&b_right, k, None);

    let (t1, t2, t3, t4) = if n + b.len() >= PARALLEL_POINTS {
        let ((t1, t2), (t3, t4)) = par::join(
            || par::join(|| recurse(&a_l, &b_l, d), || recurse(&a_r, &b_r, d)),
            || {
                par::join(
                    || recurse(&a_l_tilde, &b_r_bar, k),
                    || recurse(&a_r_bar, &b_l_tilde, k),
                )
            },
        );
        (t1, t2, t3, t4)
    } else {
        (
            recurse(&a_l, &b_l, d),
            recurse(&a_r, &b_r, d),
            recurse(&a_l_tilde, &b_r_bar, k),
            recurse(&a_r_bar, &b_l_tilde, k),
        )
    };
    let mut s = CompensatedSum::new();
    for t in [t1, t2, t3, t4] {
        s.add(t);
    }
    s.value()
}

/// `D(A, B, d) = Σ_i Σ_j v_i w_j ∏_{k<d} min(y^{(i)}_k, z^{(j)}_k)`.
pub fn heinrich_d(a: &HeinrichArray, b: &HeinrichArray, d: usize) -> Result<f64> {
    if (!a.is_empty() && a.dim < d) || (!b.is_empty() && b.dim < d) {
        return Err(Error::invalid(format!(
            "arrays of dimension {} and {} cannot be reduced over {d} coordinates",
            a.dim, b.dim
        )));
    }
    Ok(recurse(a, b, d))
}

/// Squared L2 star discrepancy of the signed measure `Σ v_i δ_{x_i}` using
/// the divide-and-conquer double sum.
pub fn star_l2_sq_fast(q: &WeightedPointSet) -> f64 {
    let x = q.points();
    let d = x.dim();
    let linear = x
        .points()
        .zip(q.weights())
        .map(|(p, &v)| v * p.iter().map(|c| 1.0 - c * c).product::<f64>())
        .collect::<CompensatedSum>()
        .value();
    let reflected: Vec<f64> = x.as_flat().iter().map(|c| 1.0 - c).collect();
    let arr = HeinrichArray {
        dim: d,
        weights: q.weights().to_vec(),
        coords: reflected,
    };
    let pairs = recurse(&arr, &arr, d);
    let mut s = CompensatedSum::new();
    s.add(3f64.powi(-(d as i32)));
    s.add(-(2f64.powi(1 - d as i32)) * linear);
    s.add(pairs);
    s.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l2::warnock_star_l2_sq;
    use crate::pointset::PointSet;
    use crate::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn arr(dim: usize, w: &[f64], c: &[f64]) -> HeinrichArray {
        HeinrichArray::new(dim, w.to_vec(), c.to_vec()).unwrap()
    }

    fn naive(a: &HeinrichArray, b: &HeinrichArray, d: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            for j in 0..b.len() {
                let mut prod = a.weights[i] * b.weights[j];
                for k in 0..d {
                    prod *= a.point(i)[k].min(b.point(j)[k]);
                }
                s += prod;
            }
        }
        s
    }

    fn random_array(n: usize, d: usize, rng: &mut impl Rng, signed: bool) -> HeinrichArray {
        let w = (0..n)
            .map(|_| {
                if signed {
                    rng.random_range(-1.0..1.0)
                } else {
                    rng.random()
                }
            })
            .collect();
        // Coarse grid so that ties occur.
        let c = (0..n * d)
            .map(|_| rng.random_range(0..=16) as f64 / 16.0)
            .collect();
        HeinrichArray::new(d, w, c).unwrap()
    }

    #[test]
    fn examples() {
        let a = arr(0, &[2.0, 3.0], &[]);
        let b = arr(0, &[5.0], &[]);
        assert_eq!(heinrich_d(&a, &b, 0).unwrap(), 25.0);
        let a = arr(1, &[1.0], &[0.5]);
        let b = arr(1, &[1.0, 1.0], &[0.25, 0.75]);
        assert_eq!(heinrich_d(&a, &b, 1).unwrap(), 0.75);
        assert_eq!(heinrich_d(&a, &HeinrichArray::default(), 1).unwrap(), 0.0);
        assert!(heinrich_d(&a, &b, 2).is_err());
    }

    #[test]
    fn matches_direct_double_sum() {
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let a = random_array(32, 3, &mut rng, true);
            let b = random_array(32, 3, &mut rng, true);
            let fast = heinrich_d(&a, &b, 3).unwrap();
            assert!((fast - naive(&a, &b, 3)).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_weights_match_warnock() {
        let mut rng = rng_from_seed(8);
        for (n, d) in [(1, 1), (2, 1), (300, 1), (500, 2), (1000, 3), (700, 5)] {
            let x = PointSet::new(d, (0..n * d).map(|_| rng.random::<f64>()).collect()).unwrap();
            let fast = star_l2_sq_fast(&WeightedPointSet::uniform(&x));
            let direct = warnock_star_l2_sq(&x);
            assert!((fast - direct).abs() <= 1e-10 * direct, "n={n} d={d}");
        }
        let x = PointSet::new(1, vec![0.5]).unwrap();
        let q = WeightedPointSet::new(x, vec![1.0]).unwrap();
        assert!((star_l2_sq_fast(&q) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn zero_total_weight() {
        // Symmetric pair with opposite weights.
        let x = PointSet::new(2, vec![0.2, 0.7, 0.7, 0.2]).unwrap();
        let q = WeightedPointSet::new(x.clone(), vec![0.5, -0.5]).unwrap();
        let y: Vec<f64> = x.as_flat().iter().map(|c| 1.0 - c).collect();
        let direct_pairs = naive(&arr(2, &[0.5, -0.5], &y), &arr(2, &[0.5, -0.5], &y), 2);
        let linear = 0.5 * (1.0 - 0.04) * (1.0 - 0.49) - 0.5 * (1.0 - 0.49) * (1.0 - 0.04);
        let expected = 1.0 / 9.0 - 0.5 * linear + direct_pairs;
        assert!((star_l2_sq_fast(&q) - expected).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn recursion_matches_naive(seed in 0u64..10_000, n in 0usize..70, m in 0usize..70, d in 0usize..5) {
            let mut rng = rng_from_seed(seed);
            let a = random_array(n, d, &mut rng, true);
            let b = random_array(m, d, &mut rng, true);
            let fast = heinrich_d(&a, &b, d).unwrap();
            let slow = naive(&a, &b, d);
            prop_assert!((fast - slow).abs() <= 1e-11 * (1.0 + slow.abs()));
        }
    }
}
