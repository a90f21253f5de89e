//! Objective functions.
//!
//! All sums run over ordered pairs `i != j` inside a community, so each
//! undirected edge contributes twice. Empty communities contribute 0.

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::features::SimilaritySet;
use crate::graph::Graph;
use crate::optimizer::{AscentConfig, InitStrategy, TabuConfig};
pub use crate::partition::Partition;

/// Inner products are clamped to `[-SCORE_CLAMP, SCORE_CLAMP]` before exponentiating.
pub const SCORE_CLAMP: f64 = 50.0;

/// One coefficient vector per community.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSet {
    betas: Vec<Vec<f64>>,
}

impl BetaSet {
    pub fn zeros(k: usize, p: usize) -> Self {
        Self { betas: vec![vec![0.0; p]; k] }
    }

    pub fn new(betas: Vec<Vec<f64>>) -> Result<Self> {
        let p = betas.first().map_or(0, Vec::len);
        if betas.iter().any(|b| b.len() != p) {
            return Err(crate::Error::Dimension("coefficient vectors differ in length".into()));
        }
        Ok(Self { betas })
    }

    pub fn k(&self) -> usize {
        self.betas.len()
    }

    pub fn p(&self) -> usize {
        self.betas.first().map_or(0, Vec::len)
    }

    pub fn get(&self, k: usize) -> &[f64] {
        &self.betas[k]
    }

    pub(crate) fn set(&mut self, k: usize, beta: Vec<f64>) {
        self.betas[k] = beta;
    }

    pub fn as_rows(&self) -> &[Vec<f64>] {
        &self.betas
    }

    /// `sum_k ||beta_k||_1`
    pub fn l1(&self) -> f64 {
        self.betas.iter().flatten().map(|b| b.abs()).sum()
    }

    /// `max_k ||beta_k||_2`
    pub fn max_l2(&self) -> f64 {
        self.betas.iter().map(|b| l2(b)).fold(0.0, f64::max)
    }

    /// Coefficients with community labels permuted: new community `map[k]` gets old `beta_k`.
    pub fn permuted(&self, map: &[usize]) -> Self {
        let mut betas = self.betas.clone();
        for (k, b) in self.betas.iter().enumerate() {
            betas[map[k]] = b.clone();
        }
        Self { betas }
    }
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Tuning parameters for a fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Number of communities.
    pub k: usize,
    /// Size-rescaling exponent.
    pub alpha: f64,
    /// Weight offset; `w_n / (w_n - 1)` bounds how much an edge can be reweighed.
    pub w_n: f64,
    /// L1 penalty on the coefficients.
    pub lambda: f64,
    /// Radius of the L2 ball each `beta_k` is confined to.
    pub m_beta: f64,
    pub max_outer_iters: usize,
    pub tabu: TabuConfig,
    pub ascent: AscentConfig,
    pub min_community_size: usize,
    pub init: InitStrategy,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            k: 2,
            alpha: 1.0,
            w_n: 5.0,
            lambda: 1e-5,
            m_beta: 5.0,
            max_outer_iters: 20,
            tabu: TabuConfig::default(),
            ascent: AscentConfig::default(),
            min_community_size: 1,
            init: InitStrategy::Spectral,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(config_err("k must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(config_err(format!("alpha = {} must be > 0", self.alpha)));
        }
        if !(self.w_n > 1.0 && self.w_n.is_finite()) {
            return Err(config_err(format!("w_n = {} must be > 1", self.w_n)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(config_err(format!("lambda = {} must be >= 0", self.lambda)));
        }
        if !(self.m_beta > 0.0 && self.m_beta.is_finite()) {
            return Err(config_err(format!("m_beta = {} must be > 0", self.m_beta)));
        }
        if self.min_community_size == 0 {
            return Err(config_err("min_community_size must be at least 1"));
        }
        Ok(())
    }

    /// Warning text when `log(w_n) <= m_phi * m_beta`, the regime where the
    /// consistency guarantee does not apply.
    pub fn bound_warning(&self, m_phi: f64) -> Option<String> {
        (self.w_n.ln() <= m_phi * self.m_beta).then(|| {
            format!(
                "log(w_n) = {:.4} does not exceed M_phi * M_beta = {:.4}",
                self.w_n.ln(),
                m_phi * self.m_beta
            )
        })
    }
}

/// Weight for a given inner product `<phi, beta>`.
pub fn weight_from_score(score: f64, w_n: f64) -> f64 {
    let w = w_n - (-score.clamp(-SCORE_CLAMP, SCORE_CLAMP)).exp();
    // saturate one ulp below w_n so the bound stays strict in floating point
    if w < w_n {
        w
    } else {
        w_n.next_down()
    }
}

/// `w_n - exp(-<phi, beta>)`
pub fn edge_weight(phi: &[f64], beta: &[f64], w_n: f64) -> f64 {
    weight_from_score(dot(phi, beta), w_n)
}

/// `|E_k|^(-alpha)`, with empty communities mapped to 0.
pub(crate) fn size_scale(size: usize, alpha: f64) -> f64 {
    if size == 0 {
        0.0
    } else {
        (size as f64).powf(-alpha)
    }
}

/// Adjacency-only criterion `sum_k |E_k|^-alpha sum_{i != j in E_k} A_ij`.
pub fn marginal_criterion(graph: &Graph, partition: &Partition, alpha: f64) -> f64 {
    let mut internal = vec![0.0; partition.k()];
    for (u, v, a) in graph.edges() {
        let k = partition.label(u);
        if k == partition.label(v) {
            internal[k] += 2.0 * a;
        }
    }
    let sizes = partition.sizes();
    internal.iter().zip(&sizes).map(|(s, &n)| s * size_scale(n, alpha)).sum()
}

/// Sum over communities of `|E_k|^-alpha sum A_ij f(phi_ij, beta_k)`.
fn weighted_sum<F>(graph: &Graph, sims: &SimilaritySet, partition: &Partition, betas: &BetaSet, alpha: f64, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut internal = vec![0.0; partition.k()];
    let mut phi = vec![0.0; sims.p()];
    for (u, v, a) in graph.edges() {
        let k = partition.label(u);
        if k == partition.label(v) {
            sims.phi_into(u, v, &mut phi);
            internal[k] += 2.0 * a * f(dot(&phi, betas.get(k)));
        }
    }
    let sizes = partition.sizes();
    internal.iter().zip(&sizes).map(|(s, &n)| s * size_scale(n, alpha)).sum()
}

fn check_dims(graph: &Graph, sims: &SimilaritySet, partition: &Partition, betas: &BetaSet) {
    assert_eq!(graph.n(), partition.n(), "graph and partition disagree on n");
    assert_eq!(graph.n(), sims.n(), "graph and similarities disagree on n");
    assert_eq!(betas.k(), partition.k(), "one coefficient vector per community");
    assert_eq!(betas.p(), sims.p(), "coefficient and similarity dimensions differ");
}

/// The joint criterion: adjacency reweighted by feature similarity,
/// with community-specific coefficients.
pub fn jcdc_criterion(
    graph: &Graph,
    sims: &SimilaritySet,
    partition: &Partition,
    betas: &BetaSet,
    config: &FitConfig,
) -> f64 {
    check_dims(graph, sims, partition, betas);
    let w_n = config.w_n;
    weighted_sum(graph, sims, partition, betas, config.alpha, |s| weight_from_score(s, w_n))
}

/// `jcdc = term_w - term_g`, where only `term_g` depends on the coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition {
    /// `w_n * marginal_criterion`
    pub term_w: f64,
    /// `sum_k |E_k|^-alpha sum A_ij exp(-<phi_ij, beta_k>)`
    pub term_g: f64,
}

pub fn decompose(
    graph: &Graph,
    sims: &SimilaritySet,
    partition: &Partition,
    betas: &BetaSet,
    config: &FitConfig,
) -> Decomposition {
    check_dims(graph, sims, partition, betas);
    Decomposition {
        term_w: config.w_n * marginal_criterion(graph, partition, config.alpha),
        term_g: weighted_sum(graph, sims, partition, betas, config.alpha, |s| {
            (-s.clamp(-SCORE_CLAMP, SCORE_CLAMP)).exp()
        }),
    }
}

/// `jcdc - lambda * sum_k ||beta_k||_1`
pub fn penalized_objective(
    graph: &Graph,
    sims: &SimilaritySet,
    partition: &Partition,
    betas: &BetaSet,
    config: &FitConfig,
) -> f64 {
    jcdc_criterion(graph, sims, partition, betas, config) - config.lambda * betas.l1()
}
