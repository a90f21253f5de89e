use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::beta::optimize_betas_cached;
use super::tabu::{random_balanced, repair_min_size, tabu_search_cached};
use super::{EdgeCache, InitStrategy};
use crate::baselines::{spectral_clustering, SpectralConfig};
use crate::criterion::{jcdc_criterion, BetaSet, FitConfig};
use crate::error::{config_err, Error, Result};
use crate::features::{build_similarities, FeatureTable, Similarity, SimilaritySet};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::rng;

/// Outcome of [`fit`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitResult {
    pub partition: Partition,
    pub betas: BetaSet,
    /// Penalized criterion after each outer iteration.
    pub trace: Vec<f64>,
    /// Unpenalized criterion at the returned labels and coefficients.
    pub criterion: f64,
    pub converged: bool,
    pub iterations: usize,
    pub wall_time_secs: f64,
    pub warnings: Vec<String>,
}

const OUTER_TOL: f64 = 1e-8;

/// Fit the joint criterion to a graph and a feature table.
pub fn fit(graph: &Graph, features: &FeatureTable, measures: &[Similarity], config: &FitConfig) -> Result<FitResult> {
    if features.n() != graph.n() {
        return Err(Error::Dimension(format!("{} feature rows for {} nodes", features.n(), graph.n())));
    }
    let sims = build_similarities(features, measures)?;
    fit_with_similarities(graph, &sims, config)
}

/// [`fit`] with precomputed similarities, initializing labels per `config.init`.
pub fn fit_with_similarities(graph: &Graph, sims: &SimilaritySet, config: &FitConfig) -> Result<FitResult> {
    check(graph, config)?;
    let mut rng = rng::seeded(rng::child_seed(config.seed, &[0xC0FFEE]));
    let init = match config.init {
        InitStrategy::Spectral => {
            let sc = SpectralConfig { k: config.k, seed: config.seed, ..SpectralConfig::default() };
            spectral_clustering(graph, &sc).unwrap_or_else(|_| random_balanced(graph.n(), config.k, &mut rng))
        }
        InitStrategy::Random => random_balanced(graph.n(), config.k, &mut rng),
    };
    fit_from(graph, sims, &init, config)
}

fn check(graph: &Graph, config: &FitConfig) -> Result<()> {
    config.validate()?;
    if config.k > graph.n() {
        return Err(config_err(format!("k = {} exceeds the node count {}", config.k, graph.n())));
    }
    if config.k * config.min_community_size > graph.n() {
        return Err(config_err(format!(
            "k = {} communities of at least {} nodes do not fit in {} nodes",
            config.k,
            config.min_community_size,
            graph.n()
        )));
    }
    Ok(())
}

/// Alternate label search and coefficient ascent from explicit starting labels.
pub fn fit_from(graph: &Graph, sims: &SimilaritySet, init: &Partition, config: &FitConfig) -> Result<FitResult> {
    check(graph, config)?;
    if init.n() != graph.n() || init.k() != config.k {
        return Err(Error::Dimension("initial partition does not match graph size or k".into()));
    }
    let started = Instant::now();
    let mut warnings = Vec::new();
    warnings.extend(config.bound_warning(sims.m_phi()));
    for l in sims.constant_dims() {
        warnings.push(format!("similarity dimension {} ({}) is constant and was zeroed", l, sims.names()[l]));
    }
    let cache = EdgeCache::new(graph, sims);
    let mut labels = init.clone();
    repair_min_size(&mut labels, config.min_community_size, &mut rng::seeded(config.seed));
    let mut betas = BetaSet::zeros(config.k, sims.p());
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let penalized = |labels: &Partition, betas: &BetaSet| {
        jcdc_criterion(graph, sims, labels, betas, config) - config.lambda * betas.l1()
    };

    while iterations < config.max_outer_iters.max(1) {
        let iter = iterations;
        iterations += 1;
        let new_labels = if config.k == 1 {
            labels.clone()
        } else {
            tabu_search_cached(&cache, &labels, &betas, config, rng::child_seed(config.seed, &[iter as u64]))?.0
        };
        let reports = optimize_betas_cached(&cache, &new_labels, &betas, config);
        for (k, r) in reports.into_iter().enumerate() {
            betas.set(k, r.beta);
        }
        let value = penalized(&new_labels, &betas);
        let unchanged = new_labels == labels;
        labels = new_labels;
        let improvement = trace.last().map(|prev| value - prev);
        trace.push(value);
        if config.k == 1 || (unchanged && improvement.is_some_and(|d| d < OUTER_TOL)) {
            converged = true;
            break;
        }
    }

    let criterion = jcdc_criterion(graph, sims, &labels, &betas, config);
    Ok(FitResult {
        partition: labels,
        betas,
        trace,
        criterion,
        converged,
        iterations,
        wall_time_secs: started.elapsed().as_secs_f64(),
        warnings,
    })
}
