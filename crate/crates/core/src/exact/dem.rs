//! Dobkin–Eppstein–Mitchell style decomposition.
//!
//! Work in threshold space: for axis `j` let `g_j` be the sorted distinct
//! coordinates and `m_j = |g_j|`. A threshold vector `t ∈ ∏ [0, m_j]` selects
//! the points whose rank on every axis is below `t_j`. The same count
//! describes the open box with corner `g_j[t_j]` (or 1 when `t_j = m_j`) and
//! the closed box with corner `g_j[t_j - 1]` (or 0 when `t_j = 0`).
//!
//! Axis by axis, the threshold range is cut into intervals. A point whose rank
//! lies inside an interval (`lo ≤ r < hi`) is *internal* on that axis; points
//! with `r ≥ hi` are dropped. Cuts are placed at the ranks of points that are
//! already internal on an earlier axis, so no point is ever internal twice,
//! and extra cuts keep each interval's new internal points below
//! `⌈√n⌉`. At a leaf the count is `c0 + Σ_j f_j(t_j)` with each `f_j` a step
//! function, and a small dynamic program over the total count finds the best
//! corner.

use crate::par;
use crate::pointset::{BoxKind, PointSet};

use super::{finish, Best, Method, StarResult};

const FREE: u8 = u8::MAX;

#[derive(Debug, Clone, Copy)]
struct Item {
    point: u32,
    internal: u8,
}

struct Dem {
    n: usize,
    d: usize,
    ranks: Vec<Vec<u32>>,
    values: Vec<Vec<f64>>,
    cap: usize,
}

/// Step options on one axis of a leaf: for `v` internal points counted, the
/// largest and smallest thresholds realizing it.
struct AxisOptions {
    hi: Vec<Option<u32>>,
    lo: Vec<Option<u32>>,
}

impl Dem {
    fn new(x: &PointSet) -> Self {
        let n = x.len();
        let d = x.dim();
        let mut ranks = Vec::with_capacity(d);
        let mut values = Vec::with_capacity(d);
        for j in 0..d {
            let mut v: Vec<f64> = x.points().map(|p| p[j]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            ranks.push(
                x.points()
                    .map(|p| v.partition_point(|&g| g < p[j]) as u32)
                    .collect(),
            );
            values.push(v);
        }
        let cap = (n as f64).sqrt().ceil() as usize;
        Self {
            n,
            d,
            ranks,
            values,
            cap: cap.max(1),
        }
    }

    fn m(&self, j: usize) -> u32 {
        self.values[j].len() as u32
    }

    /// Corner coordinate of an open box at threshold `t`.
    fn upper(&self, j: usize, t: u32) -> f64 {
        self.values[j].get(t as usize).copied().unwrap_or(1.0)
    }

    /// Corner coordinate of a closed box at threshold `t`.
    fn lower(&self, j: usize, t: u32) -> f64 {
        if t == 0 {
            0.0
        } else {
            self.values[j][t as usize - 1]
        }
    }

    /// Threshold intervals for axis `j`, inclusive at both ends.
    fn cuts(&self, j: usize, items: &[Item]) -> Vec<(u32, u32)> {
        let rank = &self.ranks[j];
        let mut fixed: Vec<u32> = items
            .iter()
            .filter(|it| it.internal != FREE)
            .map(|it| rank[it.point as usize])
            .collect();
        fixed.sort_unstable();
        fixed.dedup();
        let mut free: Vec<u32> = items
            .iter()
            .filter(|it| it.internal == FREE)
            .map(|it| rank[it.point as usize])
            .collect();
        free.sort_unstable();

        let mut out = Vec::new();
        let mut lo = 0u32;
        let mut count = 0usize;
        let mut fi = 0;
        let mut k = 0;
        while k < free.len() {
            let r = free[k];
            let mut size = 0;
            while k < free.len() && free[k] == r {
                size += 1;
                k += 1;
            }
            while fi < fixed.len() && fixed[fi] < r {
                out.push((lo, fixed[fi]));
                lo = fixed[fi] + 1;
                count = 0;
                fi += 1;
            }
            if fi < fixed.len() && fixed[fi] == r {
                out.push((lo, r));
                lo = r + 1;
                count = 0;
                fi += 1;
            } else if count + size > self.cap {
                // The whole tie group sits on the cut and is never internal.
                out.push((lo, r));
                lo = r + 1;
                count = 0;
            } else {
                count += size;
            }
        }
        for &f in &fixed[fi..] {
            out.push((lo, f));
            lo = f + 1;
        }
        out.push((lo, self.m(j)));
        out
    }

    fn split(&self, j: usize, items: &[Item], (lo, hi): (u32, u32)) -> Vec<Item> {
        let rank = &self.ranks[j];
        items
            .iter()
            .filter_map(|&it| {
                let r = rank[it.point as usize];
                if r >= hi {
                    None
                } else if it.internal != FREE || r < lo {
                    debug_assert!(r < lo);
                    Some(it)
                } else {
                    Some(Item {
                        point: it.point,
                        internal: j as u8,
                    })
                }
            })
            .collect()
    }

    fn region(&self, level: usize, items: &[Item], bounds: &mut [(u32, u32)], best: &mut Best) {
        if level == self.d {
            self.leaf(items, bounds, best);
            return;
        }
        for cut in self.cuts(level, items) {
            bounds[level] = cut;
            let child = self.split(level, items, cut);
            self.region(level + 1, &child, bounds, best);
        }
    }

    fn options(&self, j: usize, (lo, hi): (u32, u32), internal: &[u32]) -> AxisOptions {
        let k = internal.len();
        let mut out = AxisOptions {
            hi: Vec::with_capacity(k + 1),
            lo: Vec::with_capacity(k + 1),
        };
        let _ = j;
        for v in 0..=k {
            // Thresholds t with exactly v internal ranks below t.
            let t_lo = if v == 0 { lo } else { internal[v - 1] + 1 };
            let t_hi = if v == k { hi } else { internal[v] };
            if t_lo <= t_hi {
                out.hi.push(Some(t_hi));
                out.lo.push(Some(t_lo));
            } else {
                out.hi.push(None);
                out.lo.push(None);
            }
        }
        out
    }

    fn leaf(&self, items: &[Item], bounds: &[(u32, u32)], best: &mut Best) {
        let d = self.d;
        let nf = self.n as f64;
        let mut internal: Vec<Vec<u32>> = vec![Vec::new(); d];
        let mut c0 = 0usize;
        for it in items {
            if it.internal == FREE {
                c0 += 1;
            } else {
                let j = it.internal as usize;
                internal[j].push(self.ranks[j][it.point as usize]);
            }
        }
        let total: usize = internal.iter().map(Vec::len).sum();

        // Cheap bounds on anything this leaf can offer.
        let vol_hi: f64 = (0..d).map(|j| self.upper(j, bounds[j].1)).product();
        let vol_lo: f64 = (0..d).map(|j| self.lower(j, bounds[j].0)).product();
        let open_bound = vol_hi - c0 as f64 / nf;
        let closed_bound = (c0 + total) as f64 / nf - vol_lo;
        if open_bound <= best.value && closed_bound <= best.value {
            return;
        }

        for r in &mut internal {
            r.sort_unstable();
        }
        let opts: Vec<AxisOptions> = (0..d)
            .map(|j| self.options(j, bounds[j], &internal[j]))
            .collect();

        // (max, ×) and (min, ×) convolutions over the per-axis counts.
        let mut hi_prod = vec![f64::NEG_INFINITY; total + 1];
        let mut lo_prod = vec![f64::INFINITY; total + 1];
        hi_prod[0] = 1.0;
        lo_prod[0] = 1.0;
        let mut hi_pick = vec![vec![0u32; total + 1]; d];
        let mut lo_pick = vec![vec![0u32; total + 1]; d];
        let mut reach = 0;
        for j in 0..d {
            let mut next_hi = vec![f64::NEG_INFINITY; total + 1];
            let mut next_lo = vec![f64::INFINITY; total + 1];
            for c in 0..=reach {
                for (v, (th, tl)) in opts[j].hi.iter().zip(&opts[j].lo).enumerate() {
                    let (Some(th), Some(tl)) = (th, tl) else {
                        continue;
                    };
                    if hi_prod[c] > f64::NEG_INFINITY {
                        let cand = hi_prod[c] * self.upper(j, *th);
                        if cand > next_hi[c + v] {
                            next_hi[c + v] = cand;
                            hi_pick[j][c + v] = v as u32;
                        }
                    }
                    if lo_prod[c] < f64::INFINITY {
                        let cand = lo_prod[c] * self.lower(j, *tl);
                        if cand < next_lo[c + v] {
                            next_lo[c + v] = cand;
                            lo_pick[j][c + v] = v as u32;
                        }
                    }
                }
            }
            reach += internal[j].len();
            hi_prod = next_hi;
            lo_prod = next_lo;
        }

        let mut open_best: Option<(f64, usize)> = None;
        let mut closed_best: Option<(f64, usize)> = None;
        for c in 0..=total {
            let frac = (c0 + c) as f64 / nf;
            if hi_prod[c] > f64::NEG_INFINITY {
                let v = hi_prod[c] - frac;
                if open_best.is_none_or(|(b, _)| v > b) {
                    open_best = Some((v, c));
                }
            }
            if lo_prod[c] < f64::INFINITY {
                let v = frac - lo_prod[c];
                if closed_best.is_none_or(|(b, _)| v > b) {
                    closed_best = Some((v, c));
                }
            }
        }

        let mut corner = vec![0.0; d];
        if let Some((v, mut c)) = open_best {
            if v > best.value {
                for j in (0..d).rev() {
                    let pick = hi_pick[j][c] as usize;
                    corner[j] = self.upper(j, opts[j].hi[pick].expect("reachable"));
                    c -= pick;
                }
                best.offer(v, &corner, BoxKind::Open);
            }
        }
        if let Some((v, mut c)) = closed_best {
            if v > best.value {
                for j in (0..d).rev() {
                    let pick = lo_pick[j][c] as usize;
                    corner[j] = self.lower(j, opts[j].lo[pick].expect("reachable"));
                    c -= pick;
                }
                best.offer(v, &corner, BoxKind::Closed);
            }
        }
    }
}

/// Exact star discrepancy by decomposition, about `n^{d/2+1}` operations.
pub fn star_dem(x: &PointSet) -> StarResult {
    assert!(x.dim() < FREE as usize, "dimension too large for the decomposition");
    let dem = Dem::new(x);
    let items: Vec<Item> = (0..x.len() as u32)
        .map(|point| Item {
            point,
            internal: FREE,
        })
        .collect();
    let top = dem.cuts(0, &items);
    let parts = par::map_slice(&top, |&cut| {
        let mut bounds = vec![(0u32, 0u32); dem.d];
        bounds[0] = cut;
        let mut best = Best::empty();
        let child = dem.split(0, &items, cut);
        dem.region(1, &child, &mut bounds, &mut best);
        best
    });
    let mut best = Best::empty();
    for b in parts {
        best.merge(b);
    }
    finish(x, best.corner, best.kind, Method::Dem)
}
