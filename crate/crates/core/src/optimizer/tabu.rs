use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use super::{EdgeCache, SwitchState};
use crate::criterion::{BetaSet, FitConfig};
use crate::error::{config_err, Result};
use crate::features::SimilaritySet;
use crate::graph::Graph;
use crate::partition::Partition;
use crate::rng::{self, Rng};

/// Greedy single-node label search with a short-term tabu list, coefficients fixed.
///
/// Runs `config.tabu.restarts` independent searches (the first from
/// `init`) and returns the best labels found; ties go to the lowest run index.
pub fn tabu_label_search(
    graph: &Graph,
    sims: &SimilaritySet,
    init: &Partition,
    betas: &BetaSet,
    config: &FitConfig,
) -> Result<Partition> {
    let cache = EdgeCache::new(graph, sims);
    tabu_search_cached(&cache, init, betas, config, config.seed).map(|(p, _)| p)
}

/// [`tabu_label_search`] over a prebuilt edge cache; also returns the criterion value.
pub fn tabu_search_cached(
    cache: &EdgeCache,
    init: &Partition,
    betas: &BetaSet,
    config: &FitConfig,
    seed: u64,
) -> Result<(Partition, f64)> {
    let k = init.k();
    if k * config.min_community_size > init.n() {
        return Err(config_err(format!(
            "{k} communities of at least {} nodes do not fit in {} nodes",
            config.min_community_size,
            init.n()
        )));
    }
    let restarts = config.tabu.restarts.max(1);
    let runs: Vec<(Partition, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::seeded(rng::child_seed(seed, &[r as u64]));
            let start = if r == 0 {
                let mut p = init.clone();
                repair_min_size(&mut p, config.min_community_size, &mut rng);
                p
            } else {
                perturb(init, 0.25 * r as f64, config.min_community_size, &mut rng)
            };
            single_run(cache, start, betas, config, &mut rng)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, cand| if cand.1 > best.1 { cand } else { best })
        .expect("at least one run");
    Ok(best)
}

fn single_run(cache: &EdgeCache, start: Partition, betas: &BetaSet, config: &FitConfig, rng: &mut Rng) -> (Partition, f64) {
    let alpha = config.alpha;
    let k = start.k();
    let n = start.n();
    let mut state = SwitchState::new(cache, &start, betas, config.w_n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut last_moved: Vec<Option<usize>> = vec![None; n];
    let tenure = config.tabu.tenure;
    for sweep in 0..config.tabu.max_sweeps {
        let (mut moved, mut skipped) = (0usize, 0usize);
        for &i in &order {
            if let Some(s) = last_moved[i] {
                if sweep > s && sweep - s <= tenure {
                    skipped += 1;
                    continue;
                }
            }
            let l = state.partition().label(i);
            if state.sizes()[l] <= config.min_community_size {
                continue;
            }
            let threshold = 1e-12 * state.criterion(alpha).abs().max(1.0);
            let mut best: Option<(usize, f64)> = None;
            for target in 0..k {
                if target == l {
                    continue;
                }
                let gain = state.exact_preference(i, target, alpha);
                if gain > threshold && best.is_none_or(|(_, g)| gain > g) {
                    best = Some((target, gain));
                }
            }
            if let Some((target, _)) = best {
                state.apply_move(i, target);
                last_moved[i] = Some(sweep);
                moved += 1;
            }
        }
        if moved == 0 && skipped == 0 {
            break;
        }
    }
    let partition = state.into_partition();
    let value = SwitchState::new(cache, &partition, betas, config.w_n).criterion(alpha);
    (partition, value)
}

/// Relabel each node uniformly at random with probability `rate`.
fn perturb(init: &Partition, rate: f64, min_size: usize, rng: &mut Rng) -> Partition {
    let k = init.k();
    let mut p = init.clone();
    for i in 0..p.n() {
        if rng.random::<f64>() < rate {
            p.set(i, rng.random_range(0..k));
        }
    }
    repair_min_size(&mut p, min_size, rng);
    p
}

/// Move random members of the largest communities into any community
/// smaller than `min_size`. Requires `k * min_size <= n`.
pub(crate) fn repair_min_size(p: &mut Partition, min_size: usize, rng: &mut Rng) {
    loop {
        let sizes = p.sizes();
        let Some(short) = sizes.iter().position(|&s| s < min_size) else {
            return;
        };
        let donor = (0..sizes.len()).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap();
        let members: Vec<usize> = (0..p.n()).filter(|&i| p.label(i) == donor).collect();
        let pick = members[rng.random_range(0..members.len())];
        p.set(pick, short);
    }
}

/// Random labels with community sizes differing by at most one.
pub(crate) fn random_balanced(n: usize, k: usize, rng: &mut Rng) -> Partition {
    let mut labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    labels.shuffle(rng);
    Partition::new(labels, k).expect("labels in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::TabuConfig;
    use crate::criterion::jcdc_criterion;
    use crate::features::{build_similarities, default_measures, FeatureTable};

    fn two_cliques() -> Graph {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for a in 0..4 {
                for b in (a + 1)..4 {
                    edges.push((base + a, base + b, 1.0));
                }
            }
        }
        Graph::from_edges(8, edges).unwrap()
    }

    fn flat_sims(n: usize) -> SimilaritySet {
        let f = FeatureTable::from_rows(&(0..n).map(|i| vec![i as f64]).collect::<Vec<_>>()).unwrap();
        build_similarities(&f, &default_measures(&f)).unwrap()
    }

    #[test]
    fn recovers_planted_cliques_from_any_start() {
        let g = two_cliques();
        let s = flat_sims(8);
        let b = BetaSet::zeros(2, 1);
        let truth = Partition::from_sizes(&[4, 4]).unwrap();
        for seed in 0..20 {
            let cfg = FitConfig { seed, ..FitConfig::default() };
            let init = random_balanced(8, 2, &mut rng::seeded(seed + 100));
            let out = tabu_label_search(&g, &s, &init, &b, &cfg).unwrap();
            assert_eq!(crate::metrics::misclassification_distance(&out, &truth).unwrap(), 0.0, "seed {seed}");
        }
    }

    #[test]
    fn local_optimum_is_returned_unchanged() {
        let g = two_cliques();
        let s = flat_sims(8);
        let b = BetaSet::zeros(2, 1);
        let truth = Partition::from_sizes(&[4, 4]).unwrap();
        let cfg = FitConfig { tabu: TabuConfig { restarts: 1, ..TabuConfig::default() }, ..FitConfig::default() };
        assert_eq!(tabu_label_search(&g, &s, &truth, &b, &cfg).unwrap(), truth);
    }

    #[test]
    fn respects_min_size_and_never_decreases() {
        let g = two_cliques();
        let s = flat_sims(8);
        let b = BetaSet::new(vec![vec![0.3], vec![-0.2]]).unwrap();
        let cfg = FitConfig { min_community_size: 3, ..FitConfig::default() };
        for seed in 0..10 {
            let init = random_balanced(8, 2, &mut rng::seeded(seed));
            let before = jcdc_criterion(&g, &s, &init, &b, &cfg);
            let (out, value) = tabu_search_cached(&EdgeCache::new(&g, &s), &init, &b, &cfg, seed).unwrap();
            assert!(out.sizes().iter().all(|&c| c >= 3));
            assert!(value >= before - 1e-9);
            assert!((value - jcdc_criterion(&g, &s, &out, &b, &cfg)).abs() < 1e-9);
        }
    }

    #[test]
    fn repair_fills_short_communities() {
        let mut p = Partition::new(vec![0; 10], 3).unwrap();
        repair_min_size(&mut p, 3, &mut rng::seeded(1));
        assert!(p.sizes().iter().all(|&s| s >= 3));
    }

    #[test]
    fn infeasible_min_size_is_rejected() {
        let g = two_cliques();
        let s = flat_sims(8);
        let cfg = FitConfig { min_community_size: 5, ..FitConfig::default() };
        let init = Partition::from_sizes(&[4, 4]).unwrap();
        assert!(tabu_label_search(&g, &s, &init, &BetaSet::zeros(2, 1), &cfg).is_err());
    }
}
