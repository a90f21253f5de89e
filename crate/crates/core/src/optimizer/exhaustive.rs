use super::EdgeCache;
use crate::criterion::{dot, size_scale, weight_from_score, BetaSet, FitConfig};
use crate::error::{Error, Result};
use crate::features::SimilaritySet;
use crate::graph::Graph;
use crate::partition::Partition;

/// Best labeling by brute force, for `n <= max_n`.
///
/// Only labelings whose communities all have at least
/// `config.min_community_size` members are considered. When all
/// coefficient vectors are equal the criterion is invariant under label
/// permutation and only canonical labelings (first appearance order) are
/// enumerated. Ties keep the first labeling in lexicographic order.
pub fn exhaustive_oracle(
    graph: &Graph,
    sims: &SimilaritySet,
    betas: &BetaSet,
    config: &FitConfig,
    max_n: usize,
) -> Result<(Partition, f64)> {
    exhaustive_oracle_cached(&EdgeCache::new(graph, sims), betas, config, max_n)
}

pub fn exhaustive_oracle_cached(
    cache: &EdgeCache,
    betas: &BetaSet,
    config: &FitConfig,
    max_n: usize,
) -> Result<(Partition, f64)> {
    let n = cache.n();
    let k = betas.k();
    if n > max_n {
        return Err(Error::TooLarge { n, max_n });
    }
    if k * config.min_community_size > n {
        return Err(Error::Config(format!("no labeling of {n} nodes has {k} communities of size >= {}", config.min_community_size)));
    }
    let symmetric = betas.as_rows().windows(2).all(|w| w[0] == w[1]);
    // weights[e][c]
    let weights: Vec<Vec<f64>> = (0..cache.edges().len())
        .map(|e| (0..k).map(|c| weight_from_score(dot(cache.phi(e), betas.get(c)), config.w_n)).collect())
        .collect();
    let mut labels = vec![0usize; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        if admissible(&labels, k, config.min_community_size, symmetric) {
            let mut internal = vec![0.0; k];
            let mut sizes = vec![0usize; k];
            for &l in &labels {
                sizes[l] += 1;
            }
            for (e, &(u, v, a)) in cache.edges().iter().enumerate() {
                if labels[u] == labels[v] {
                    internal[labels[u]] += 2.0 * a * weights[e][labels[u]];
                }
            }
            let value: f64 = (0..k).map(|c| internal[c] * size_scale(sizes[c], config.alpha)).sum();
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((labels.clone(), value));
            }
        }
        if !advance(&mut labels, k) {
            break;
        }
    }
    let (labels, value) = best.expect("at least one admissible labeling");
    Ok((Partition::new(labels, k)?, value))
}

fn admissible(labels: &[usize], k: usize, min_size: usize, canonical_only: bool) -> bool {
    if canonical_only {
        let mut next = 0;
        for &l in labels {
            if l > next {
                return false;
            }
            if l == next {
                next += 1;
            }
        }
    }
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    sizes.iter().all(|&s| s >= min_size)
}

/// Odometer increment over `k^n`; false after the last labeling.
fn advance(labels: &mut [usize], k: usize) -> bool {
    for slot in labels.iter_mut().rev() {
        *slot += 1;
        if *slot < k {
            return true;
        }
        *slot = 0;
    }
    false
}
