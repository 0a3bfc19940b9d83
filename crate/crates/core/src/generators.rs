//! Test subjects: Halton-type sequences, lattices and adversarial sets.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pointset::{box_counts, grid_view, volume, PointSet};

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_k < k (ln k + ln ln k) for k >= 6.
    let k = count.max(6) as f64;
    let limit = (k * (k.ln() + k.ln().ln())).ceil() as usize + 1;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::with_capacity(count);
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        if primes.len() == count {
            break;
        }
        let mut m = i * i;
        while m <= limit {
            composite[m] = true;
            m += i;
        }
    }
    primes
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= p {
        if p % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{p} is not prime")))
    }
}

/// Reversed base-`p` digits of `i`, each mapped through `digit`.
/// Digits are accumulated as an exact integer and divided once; the
/// denominator is at most `p * i < 2^128`.
pub(crate) fn reversed_digits(mut i: u64, p: u64, digit: impl Fn(u64) -> u64) -> f64 {
    let p = p as u128;
    let mut num: u128 = 0;
    let mut den: u128 = 1;
    while i > 0 {
        let d = (i as u128) % p;
        i = ((i as u128) / p) as u64;
        num = num * p + digit(d as u64) as u128;
        den *= p;
    }
    // Very long expansions can round up to 1.
    (num as f64 / den as f64).min(1.0 - f64::EPSILON / 2.0)
}

/// Base-`p` radical inverse of `i`.
pub fn radical_inverse(i: u64, p: u64) -> Result<f64> {
    check_prime(p)?;
    if i == 0 {
        return Err(Error::invalid("radical inverse index must be positive"));
    }
    Ok(reversed_digits(i, p, |d| d))
}

fn check_permutation(perm: &[u64], p: u64) -> Result<()> {
    if perm.len() as u64 != p {
        return Err(Error::invalid(format!(
            "permutation for base {p} has {} entries",
            perm.len()
        )));
    }
    if perm[0] != 0 {
        return Err(Error::invalid(format!(
            "permutation for base {p} must fix 0, maps it to {}",
            perm[0]
        )));
    }
    let mut seen = vec![false; perm.len()];
    for &v in perm {
        if v >= p || std::mem::replace(&mut seen[v as usize], true) {
            return Err(Error::invalid(format!(
                "not a permutation of 0..{p}: {perm:?}"
            )));
        }
    }
    Ok(())
}

/// Radical inverse with every digit passed through `perm`.
pub fn scrambled_radical_inverse(i: u64, p: u64, perm: &[u64]) -> Result<f64> {
    check_prime(p)?;
    check_permutation(perm, p)?;
    if i == 0 {
        return Err(Error::invalid("radical inverse index must be positive"));
    }
    Ok(reversed_digits(i, p, |d| perm[d as usize]))
}

pub fn identity_permutation(p: u64) -> Vec<u64> {
    (0..p).collect()
}

/// `π(0) = 0`, `π(j) = p - j`.
pub fn reverse_permutation(p: u64) -> Vec<u64> {
    (0..p).map(|j| if j == 0 { 0 } else { p - j }).collect()
}

/// Uniform permutation of `0..p` fixing 0.
pub fn random_permutation<R: Rng + ?Sized>(p: u64, rng: &mut R) -> Vec<u64> {
    let mut perm = identity_permutation(p);
    perm[1..].shuffle(rng);
    perm
}

/// Digit permutations for the first `d` primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationConfig {
    perms: Vec<Vec<u64>>,
}

impl PermutationConfig {
    pub fn new(perms: Vec<Vec<u64>>) -> Result<Self> {
        let primes = first_primes(perms.len());
        for (perm, &p) in perms.iter().zip(&primes) {
            check_permutation(perm, p)?;
        }
        Ok(Self { perms })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            perms: first_primes(d).into_iter().map(identity_permutation).collect(),
        }
    }

    pub fn reverse(d: usize) -> Self {
        Self {
            perms: first_primes(d).into_iter().map(reverse_permutation).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self {
            perms: first_primes(d)
                .into_iter()
                .map(|p| random_permutation(p, rng))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Vec<u64>] {
        &self.perms
    }
}

/// Points `1..=n` of the (generalized) Halton sequence in dimension `d`.
pub fn halton(n: usize, d: usize, perms: Option<&PermutationConfig>) -> Result<PointSet> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("halton needs n >= 1 and d >= 1"));
    }
    if let Some(cfg) = perms {
        if cfg.dim() < d {
            return Err(Error::invalid(format!(
                "permutations cover {} bases, need {d}",
                cfg.dim()
            )));
        }
    }
    let primes = first_primes(d);
    let mut coords = Vec::with_capacity(n * d);
    for i in 1..=n as u64 {
        for (j, &p) in primes.iter().enumerate() {
            coords.push(match perms {
                Some(cfg) => reversed_digits(i, p, |dg| cfg.perms[j][dg as usize]),
                None => reversed_digits(i, p, |dg| dg),
            });
        }
    }
    PointSet::new(d, coords)
}

/// Rank-1 lattice `{(i z mod n) / n : i = 0..n}`.
pub fn rank1_lattice(n: usize, z: &[i64]) -> Result<PointSet> {
    if n == 0 || z.is_empty() {
        return Err(Error::invalid("lattice needs n >= 1 and a nonempty generator"));
    }
    let n_i = n as i128;
    let mut coords = Vec::with_capacity(n * z.len());
    for i in 0..n_i {
        for &zj in z {
            coords.push((i * zj as i128).rem_euclid(n_i) as f64 / n as f64);
        }
    }
    PointSet::new(z.len(), coords)
}

/// The 1-D set `{(2i-1)/(2n)}` of minimal star discrepancy.
pub fn midpoint_set(n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::invalid("midpoint set needs n >= 1"));
    }
    let coords = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
    PointSet::new(1, coords)
}

/// Simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<bool>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at {a}")));
            }
            adj[a][b] = true;
            adj[b][a] = true;
        }
        Ok(Self { n, adj })
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &e).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            e.push((n - 1, 0));
        }
        Self::new(n, &e).unwrap()
    }

    pub fn star(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::new(n, &e).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        let e: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self::new(n, &e).unwrap()
    }

    pub fn edgeless(n: usize) -> Self {
        Self::new(n, &[]).unwrap()
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    e.push((a, b));
                }
            }
        }
        Self::new(n, &e).unwrap()
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    /// Size of a smallest dominating set, by subset search.
    pub fn domination_number(&self) -> usize {
        assert!(self.n <= 24, "exhaustive search limited to 24 vertices");
        let closed: Vec<u32> = (0..self.n)
            .map(|v| (0..self.n).fold(1 << v, |m, u| if self.adj[v][u] { m | 1 << u } else { m }))
            .collect();
        let all = (1u32 << self.n) - 1;
        (1u32..=all)
            .filter(|s| {
                let covered = (0..self.n)
                    .filter(|v| s >> v & 1 == 1)
                    .fold(0, |m, v| m | closed[v]);
                covered == all
            })
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }
}

/// Point set whose largest empty anchored box encodes the domination
/// number of `g`: point `i` has coordinate `alpha` on its closed
/// neighbourhood and `beta` elsewhere.
pub fn dominating_set_instance(g: &Graph, alpha: f64, beta: f64) -> Result<PointSet> {
    let n = g.vertices();
    let an = alpha.powi(n as i32);
    if !(0.0 <= beta && beta < an && an < 1.0) {
        return Err(Error::invalid(format!(
            "need 0 <= beta < alpha^n < 1, got alpha={alpha}, beta={beta}, n={n}"
        )));
    }
    let mut coords = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            coords.push(if i == j || g.adjacent(i, j) { alpha } else { beta });
        }
    }
    PointSet::new(n, coords)
}

/// Largest volume of an anchored box `[0,y)` with `y ∈ Γ̄(X)` containing no
/// point of `X`, by full grid enumeration.
pub fn largest_empty_box_volume(x: &PointSet) -> f64 {
    let lists: Vec<Vec<f64>> = grid_view(x)
        .axes
        .iter()
        .map(|a| a.closed_values())
        .collect();
    let d = lists.len();
    let mut idx = vec![0usize; d];
    let mut best = 0.0f64;
    loop {
        let y: Vec<f64> = (0..d).map(|j| lists[j][idx[j]]).collect();
        if box_counts(&y, x).0 == 0 {
            best = best.max(volume(&y));
        }
        let mut j = d;
        loop {
            if j == 0 {
                return best;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < lists[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;

    #[test]
    fn primes() {
        assert_eq!(first_primes(10), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(first_primes(1000)[999], 7919);
        assert!(first_primes(1000).iter().all(|&p| is_prime(p)));
    }

    #[test]
    fn radical_inverse_examples() {
        assert_eq!(radical_inverse(1, 2).unwrap(), 0.5);
        assert_eq!(radical_inverse(3, 2).unwrap(), 0.75);
        assert_eq!(radical_inverse(5, 3).unwrap(), 7.0 / 9.0);
        assert!(radical_inverse(5, 4).is_err());
        assert!(radical_inverse(0, 2).is_err());
    }

    /// Digit loop in floating point, the textbook way.
    fn float_radical_inverse(mut i: u64, p: u64, perm: &[u64]) -> f64 {
        let mut out = 0.0;
        let mut scale = 1.0 / p as f64;
        while i > 0 {
            out += perm[(i % p) as usize] as f64 * scale;
            scale /= p as f64;
            i /= p;
        }
        out
    }

    #[test]
    fn scrambled_examples() {
        let rev = reverse_permutation(3);
        assert_eq!(scrambled_radical_inverse(1, 3, &rev).unwrap(), 2.0 / 3.0);
        assert_eq!(scrambled_radical_inverse(4, 3, &rev).unwrap(), 8.0 / 9.0);
        assert_eq!(float_radical_inverse(4, 3, &rev), 8.0 / 9.0);
        for i in 1..500 {
            for p in [2, 3, 5, 7, 31] {
                let id = identity_permutation(p);
                assert_eq!(
                    scrambled_radical_inverse(i, p, &id).unwrap(),
                    radical_inverse(i, p).unwrap()
                );
                let r = reverse_permutation(p);
                let a = scrambled_radical_inverse(i, p, &r).unwrap();
                assert!((a - float_radical_inverse(i, p, &r)).abs() < 1e-15);
            }
        }
        assert!(scrambled_radical_inverse(1, 3, &[1, 0, 2]).is_err());
        assert!(scrambled_radical_inverse(1, 3, &[0, 1, 1]).is_err());
    }

    #[test]
    fn radical_inverse_is_injective() {
        for p in [2, 3, 5, 7] {
            let mut v: Vec<u64> = (1..=10_000)
                .map(|i| radical_inverse(i, p).unwrap().to_bits())
                .collect();
            v.sort_unstable();
            v.dedup();
            assert_eq!(v.len(), 10_000);
        }
    }

    #[test]
    fn huge_indices_stay_in_unit_interval() {
        for p in [2, 3, 7919] {
            let v = radical_inverse(u64::MAX, p).unwrap();
            assert!(v > 0.0 && v < 1.0);
            assert!((v - float_radical_inverse(u64::MAX, p, &identity_permutation(p))).abs() < 1e-12);
        }
    }

    #[test]
    fn permutations() {
        assert_eq!(reverse_permutation(2), vec![0, 1]);
        assert_eq!(reverse_permutation(3), vec![0, 2, 1]);
        assert_eq!(reverse_permutation(5), vec![0, 4, 3, 2, 1]);
        assert_eq!(random_permutation(2, &mut rng_from_seed(3)), vec![0, 1]);
        let mut seen = std::collections::BTreeMap::new();
        for seed in 0..400 {
            *seen
                .entry(random_permutation(3, &mut rng_from_seed(seed)))
                .or_insert(0) += 1;
        }
        assert_eq!(seen.len(), 2);
        assert!(seen.values().all(|&c| c > 150));
        let a = random_permutation(13, &mut rng_from_seed(77));
        assert_eq!(a, random_permutation(13, &mut rng_from_seed(77)));
        assert!(check_permutation(&a, 13).is_ok());
    }

    #[test]
    fn halton_examples() {
        let h = halton(3, 2, None).unwrap();
        assert_eq!(h.point(0), &[0.5, 1.0 / 3.0]);
        assert_eq!(h.point(1), &[0.25, 2.0 / 3.0]);
        assert_eq!(h.point(2), &[0.75, 1.0 / 9.0]);
        let r = halton(1, 1, Some(&PermutationConfig::reverse(1))).unwrap();
        assert_eq!(r.point(0), &[0.5]);
        let h = halton(200, 6, None).unwrap();
        assert!(h.as_flat().iter().all(|&c| c > 0.0 && c < 1.0));
        assert_eq!(h, halton(200, 6, Some(&PermutationConfig::identity(6))).unwrap());
        assert!(halton(5, 3, Some(&PermutationConfig::identity(2))).is_err());
    }

    #[test]
    fn lattice_examples() {
        let l = rank1_lattice(4, &[1, 3]).unwrap();
        let pts: Vec<_> = l.points().map(|p| p.to_vec()).collect();
        assert_eq!(
            pts,
            vec![
                vec![0.0, 0.0],
                vec![0.25, 0.75],
                vec![0.5, 0.5],
                vec![0.75, 0.25]
            ]
        );
        assert_eq!(rank1_lattice(1, &[5, 7]).unwrap().as_flat(), &[0.0, 0.0]);
        assert_eq!(rank1_lattice(4, &[1]).unwrap().as_flat(), &[0.0, 0.25, 0.5, 0.75]);
        assert_eq!(rank1_lattice(4, &[-1]).unwrap().as_flat(), &[0.0, 0.75, 0.5, 0.25]);
    }

    #[test]
    fn midpoints() {
        assert_eq!(midpoint_set(1).unwrap().as_flat(), &[0.5]);
        assert_eq!(midpoint_set(2).unwrap().as_flat(), &[0.25, 0.75]);
    }

    #[test]
    fn dominating_set_examples() {
        let g = Graph::path(3);
        let x = dominating_set_instance(&g, 0.5, 0.0).unwrap();
        assert_eq!(x.as_flat(), &[0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5]);
        assert_eq!(largest_empty_box_volume(&x), 0.5);
        assert_eq!(box_counts(&[1.0, 0.5, 1.0], &x).0, 0);

        let x = dominating_set_instance(&Graph::complete(4), 0.5, 0.0).unwrap();
        assert!(x.as_flat().iter().all(|&c| c == 0.5));
        assert_eq!(largest_empty_box_volume(&x), 0.5);

        let x = dominating_set_instance(&Graph::edgeless(4), 0.5, 0.0).unwrap();
        assert_eq!(largest_empty_box_volume(&x), 0.0625);

        assert!(dominating_set_instance(&g, 0.5, 0.125).is_err());
        assert!(dominating_set_instance(&g, 1.0, 0.0).is_err());
        assert!(dominating_set_instance(&g, 0.5, 0.1).is_ok());
    }

    #[test]
    fn empty_box_equals_domination_power() {
        let mut rng = rng_from_seed(11);
        let mut graphs = Vec::new();
        for n in 1..=6 {
            graphs.push(Graph::path(n));
            graphs.push(Graph::cycle(n));
            graphs.push(Graph::star(n));
            graphs.push(Graph::random(n, 0.4, &mut rng));
        }
        for g in graphs {
            let x = dominating_set_instance(&g, 0.5, 0.0).unwrap();
            let gamma = g.domination_number();
            assert_eq!(largest_empty_box_volume(&x), 0.5f64.powi(gamma as i32));
        }
    }
}
