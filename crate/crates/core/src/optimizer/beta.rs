use super::EdgeCache;
use crate::criterion::{dot, l2, size_scale, BetaSet, FitConfig, SCORE_CLAMP};
use crate::features::SimilaritySet;
use crate::graph::Graph;
use crate::partition::Partition;

/// Coefficient-dependent part of community `k`'s criterion term and its gradient.
///
/// Returns `(h, grad)` with `h = -|E_k|^-alpha sum A_ij exp(-<phi_ij, beta>)`
/// over ordered internal pairs. The full term is `w_n * (marginal part) + h`,
/// so `h` carries everything that depends on `beta`.
pub fn community_objective(
    cache: &EdgeCache,
    internal_edges: &[usize],
    size: usize,
    beta: &[f64],
    alpha: f64,
) -> (f64, Vec<f64>) {
    let scale = size_scale(size, alpha);
    let mut value = 0.0;
    let mut grad = vec![0.0; beta.len()];
    for &e in internal_edges {
        let a = cache.edges()[e].2;
        let phi = cache.phi(e);
        let s = dot(phi, beta);
        let ex = (-s.clamp(-SCORE_CLAMP, SCORE_CLAMP)).exp();
        value -= 2.0 * a * ex;
        // clamped region is flat in beta
        if s.abs() < SCORE_CLAMP {
            for (g, &f) in grad.iter_mut().zip(phi) {
                *g += 2.0 * a * f * ex;
            }
        }
    }
    grad.iter_mut().for_each(|g| *g *= scale);
    (value * scale, grad)
}

fn value_only(cache: &EdgeCache, internal_edges: &[usize], scale: f64, beta: &[f64]) -> f64 {
    let mut value = 0.0;
    for &e in internal_edges {
        let s = dot(cache.phi(e), beta);
        value -= 2.0 * cache.edges()[e].2 * (-s.clamp(-SCORE_CLAMP, SCORE_CLAMP)).exp();
    }
    value * scale
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn project_ball(mut v: Vec<f64>, radius: f64) -> Vec<f64> {
    let norm = l2(&v);
    if norm > radius {
        let s = radius / norm;
        v.iter_mut().for_each(|x| *x *= s);
    }
    v
}

/// Exact proximal map of `t * lambda * ||.||_1` plus the ball indicator.
fn prox(v: &[f64], threshold: f64, radius: f64) -> Vec<f64> {
    let soft = v.iter().map(|&x| x.signum() * (x.abs() - threshold).max(0.0)).collect();
    project_ball(soft, radius)
}

/// Outcome of one community's coefficient ascent.
#[derive(Clone, Debug)]
pub struct AscentReport {
    pub beta: Vec<f64>,
    /// Penalized coefficient-dependent objective after each accepted step (first entry: start).
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Projected proximal-gradient ascent for one community with backtracking.
pub(crate) fn ascend(
    cache: &EdgeCache,
    internal_edges: &[usize],
    size: usize,
    start: &[f64],
    config: &FitConfig,
) -> AscentReport {
    let p = start.len();
    if internal_edges.is_empty() {
        return AscentReport { beta: vec![0.0; p], trace: vec![0.0], iterations: 0, converged: true };
    }
    let lambda = config.lambda;
    let radius = config.m_beta;
    let scale = size_scale(size, config.alpha);
    let mut beta = project_ball(start.to_vec(), radius);
    let (mut h, mut grad) = community_objective(cache, internal_edges, size, &beta, config.alpha);
    let mut trace = vec![h - lambda * l1(&beta)];
    let mut step = config.ascent.initial_step;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.ascent.max_iters {
        iterations += 1;
        let (cand, diff_sq, h_cand) = loop {
            let moved: Vec<f64> = beta.iter().zip(&grad).map(|(b, g)| b + step * g).collect();
            let cand = prox(&moved, step * lambda, radius);
            let diff: Vec<f64> = cand.iter().zip(&beta).map(|(c, b)| c - b).collect();
            let diff_sq = dot(&diff, &diff);
            let h_cand = value_only(cache, internal_edges, scale, &cand);
            let model = h + dot(&grad, &diff) - diff_sq / (2.0 * step);
            if h_cand >= model - 1e-14 * h.abs().max(1.0) || step < 1e-20 {
                break (cand, diff_sq, h_cand);
            }
            step *= 0.5;
        };
        let mapping_norm = diff_sq.sqrt() / step;
        let f_cand = h_cand - lambda * l1(&cand);
        if f_cand < *trace.last().unwrap() {
            // no ascent possible at this resolution
            converged = true;
            break;
        }
        beta = cand;
        let (nh, ng) = community_objective(cache, internal_edges, size, &beta, config.alpha);
        h = nh;
        grad = ng;
        trace.push(f_cand);
        if mapping_norm < config.ascent.tol {
            converged = true;
            break;
        }
        step *= 2.0;
    }
    AscentReport { beta, trace, iterations, converged }
}

/// Internal edge indices of every community.
pub(crate) fn internal_edges(cache: &EdgeCache, partition: &Partition) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); partition.k()];
    for (e, &(u, v, _)) in cache.edges().iter().enumerate() {
        let k = partition.label(u);
        if k == partition.label(v) {
            out[k].push(e);
        }
    }
    out
}

/// Maximize the penalized criterion over each `beta_k` with labels fixed.
///
/// `w_n` only shifts the objective by a constant, so the result does not depend on it.
pub fn optimize_betas(
    graph: &Graph,
    sims: &SimilaritySet,
    partition: &Partition,
    init: &BetaSet,
    config: &FitConfig,
) -> BetaSet {
    optimize_betas_cached(&EdgeCache::new(graph, sims), partition, init, config)
        .into_iter()
        .enumerate()
        .fold(init.clone(), |mut acc, (k, r)| {
            acc.set(k, r.beta);
            acc
        })
}

/// Per-community ascent reports over a prebuilt edge cache.
pub fn optimize_betas_cached(
    cache: &EdgeCache,
    partition: &Partition,
    init: &BetaSet,
    config: &FitConfig,
) -> Vec<AscentReport> {
    let sizes = partition.sizes();
    internal_edges(cache, partition)
        .iter()
        .enumerate()
        .map(|(k, edges)| ascend(cache, edges, sizes[k], init.get(k), config))
        .collect()
}
