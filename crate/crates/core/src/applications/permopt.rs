//! Component-by-component evolutionary search for Halton digit permutations.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::generators::{first_primes, identity_permutation, random_permutation, reversed_digits, PermutationConfig};
use crate::l2::modified_l2_sq;
use crate::par;
use crate::pointset::PointSet;
use crate::{rng_from_seed, Rng};

/// Squared modified L2 discrepancy of the first `n` points of the
/// generalized Halton sequence defined by `perms`.
pub fn halton_fitness(n: usize, perms: &PermutationConfig) -> Result<f64> {
    let x = crate::generators::halton(n, perms.dim(), Some(perms))?;
    Ok(modified_l2_sq(&x))
}

fn column(n: usize, p: u64, perm: &[u64]) -> Vec<f64> {
    (1..=n as u64).map(|i| reversed_digits(i, p, |d| perm[d as usize])).collect()
}

fn fitness(prefix: &[Vec<f64>], last: &[f64]) -> f64 {
    let n = last.len();
    let d = prefix.len() + 1;
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        coords.extend(prefix.iter().map(|c| c[i]));
        coords.push(last[i]);
    }
    modified_l2_sq(&PointSet::new(d, coords).expect("Halton coordinates lie in [0,1)"))
}

/// Swaps each nonzero digit with probability `2/p` with a random other
/// nonzero digit.
fn mutate(perm: &mut [u64], rng: &mut Rng) {
    let p = perm.len();
    if p <= 2 {
        return;
    }
    let rate = (2.0 / p as f64).min(1.0);
    for v in 1..p {
        if rng.random_bool(rate) {
            let mut w = rng.random_range(1..p - 1);
            if w >= v {
                w += 1;
            }
            perm.swap(v, w);
        }
    }
}

/// Starts from `a` and, for each position with probability 1/2, swaps in
/// the value `b` holds there.
fn crossover(a: &[u64], b: &[u64], rng: &mut Rng) -> Vec<u64> {
    let mut child = a.to_vec();
    for i in 1..child.len() {
        if rng.random_bool(0.5) && child[i] != b[i] {
            let k = child.iter().position(|&v| v == b[i]).expect("same value set");
            child.swap(i, k);
        }
    }
    child
}

/// Optimizes one digit permutation per axis in order, each by a (μ+λ)
/// evolutionary algorithm whose population is seeded with the identity.
/// Falls back to the identity configuration if that scores better on the
/// full dimension.
pub fn optimize_halton_permutations(
    d: usize,
    n_points: usize,
    mu: usize,
    lambda: usize,
    generations: usize,
    seed: u64,
) -> Result<PermutationConfig> {
    if d == 0 || n_points == 0 || mu == 0 || lambda == 0 {
        return Err(Error::invalid("d, n_points, mu and lambda must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let mut perms = Vec::with_capacity(d);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(d);
    for p in first_primes(d) {
        let mut pop: Vec<(Vec<u64>, f64)> = Vec::with_capacity(mu + lambda);
        let id = identity_permutation(p);
        pop.push((id.clone(), fitness(&columns, &column(n_points, p, &id))));
        if p > 2 {
            let fresh: Vec<Vec<u64>> = (1..mu).map(|_| random_permutation(p, &mut rng)).collect();
            let scored = par::map_slice(&fresh, |perm| fitness(&columns, &column(n_points, p, perm)));
            pop.extend(fresh.into_iter().zip(scored));
            pop.sort_by(|a, b| a.1.total_cmp(&b.1));
            for _ in 0..generations {
                let children: Vec<Vec<u64>> = (0..lambda)
                    .map(|_| {
                        let a = &pop[rng.random_range(0..pop.len())].0;
                        let b = &pop[rng.random_range(0..pop.len())].0;
                        let mut c = crossover(a, b, &mut rng);
                        mutate(&mut c, &mut rng);
                        c
                    })
                    .collect();
                let scored = par::map_slice(&children, |perm| fitness(&columns, &column(n_points, p, perm)));
                pop.extend(children.into_iter().zip(scored));
                pop.sort_by(|a, b| a.1.total_cmp(&b.1));
                pop.truncate(mu);
            }
        }
        let best = pop.swap_remove(0).0;
        columns.push(column(n_points, p, &best));
        perms.push(best);
    }
    let found = PermutationConfig::new(perms)?;
    let identity = PermutationConfig::identity(d);
    if halton_fitness(n_points, &found)? <= halton_fitness(n_points, &identity)? {
        Ok(found)
    } else {
        Ok(identity)
    }
}
