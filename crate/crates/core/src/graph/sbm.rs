use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{config_err, Result};
use crate::partition::Partition;
use crate::rng;

/// Degree-corrected stochastic block model.
///
/// Nodes are laid out community by community. Within community `k` the first
/// `ceil(hub_fraction * sizes[k])` nodes are hubs with degree parameter
/// `hub_theta`; the rest get `base_theta`. Edge `(i, j)` appears with
/// probability `min(prob_cap, theta_i * theta_j * density_scale * P)` where
/// `P = within_prob` inside a community and `out_in_ratio * within_prob`
/// across communities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmConfig {
    pub community_sizes: Vec<usize>,
    pub within_prob: f64,
    pub out_in_ratio: f64,
    pub density_scale: f64,
    pub hub_fraction: f64,
    pub hub_theta: f64,
    pub base_theta: f64,
    pub prob_cap: f64,
    pub seed: u64,
}

impl Default for SbmConfig {
    fn default() -> Self {
        Self::simulation(0.5, 0)
    }
}

impl SbmConfig {
    /// The two-community simulation design: sizes 100 and 50, `p = 0.1`,
    /// 5% hubs with `theta = 10`, probabilities capped at 0.99.
    pub fn simulation(out_in_ratio: f64, seed: u64) -> Self {
        Self {
            community_sizes: vec![100, 50],
            within_prob: 0.1,
            out_in_ratio,
            density_scale: 1.0,
            hub_fraction: 0.05,
            hub_theta: 10.0,
            base_theta: 1.0,
            prob_cap: 0.99,
            seed,
        }
    }

    /// Plain block model (no hubs, no cap binding).
    pub fn planted(community_sizes: Vec<usize>, within_prob: f64, out_in_ratio: f64, seed: u64) -> Self {
        Self {
            community_sizes,
            within_prob,
            out_in_ratio,
            density_scale: 1.0,
            hub_fraction: 0.0,
            hub_theta: 1.0,
            base_theta: 1.0,
            prob_cap: 1.0,
            seed,
        }
    }

    pub fn n(&self) -> usize {
        self.community_sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.community_sizes.is_empty() || self.community_sizes.contains(&0) {
            return Err(config_err("community sizes must be nonempty and each at least 1"));
        }
        let unit = |name: &str, v: f64, lo_open: bool| -> Result<()> {
            let ok = v.is_finite() && v <= 1.0 && if lo_open { v > 0.0 } else { v >= 0.0 };
            if ok {
                Ok(())
            } else {
                Err(config_err(format!("{name} = {v} is out of range")))
            }
        };
        unit("within_prob", self.within_prob, false)?;
        unit("out_in_ratio", self.out_in_ratio, false)?;
        unit("density_scale", self.density_scale, true)?;
        unit("prob_cap", self.prob_cap, true)?;
        if !(0.0..1.0).contains(&self.hub_fraction) {
            return Err(config_err(format!("hub_fraction = {} must lie in [0, 1)", self.hub_fraction)));
        }
        if !(self.hub_theta >= 1.0 && self.hub_theta.is_finite()) {
            return Err(config_err(format!("hub_theta = {} must be >= 1", self.hub_theta)));
        }
        if !(self.base_theta > 0.0 && self.base_theta.is_finite()) {
            return Err(config_err(format!("base_theta = {} must be > 0", self.base_theta)));
        }
        Ok(())
    }

    /// True labels implied by the block layout.
    pub fn partition(&self) -> Result<Partition> {
        Partition::from_sizes(&self.community_sizes)
    }

    /// Degree parameter per node.
    pub fn thetas(&self) -> Vec<f64> {
        self.community_sizes
            .iter()
            .flat_map(|&size| {
                let hubs = (self.hub_fraction * size as f64).ceil() as usize;
                (0..size).map(move |i| if i < hubs { self.hub_theta } else { self.base_theta })
            })
            .collect()
    }

    /// `K x K` block matrix: `p` on the diagonal, `r * p` off it.
    pub fn block_matrix(&self) -> Vec<Vec<f64>> {
        let k = self.community_sizes.len();
        (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| if a == b { self.within_prob } else { self.out_in_ratio * self.within_prob })
                    .collect()
            })
            .collect()
    }

    fn edge_prob(&self, labels: &[usize], thetas: &[f64], i: usize, j: usize) -> f64 {
        let block = if labels[i] == labels[j] {
            self.within_prob
        } else {
            self.out_in_ratio * self.within_prob
        };
        (thetas[i] * thetas[j] * self.density_scale * block).min(self.prob_cap)
    }
}

/// Draw a simple undirected graph from the model, with its true partition.
///
/// Row `i` draws from ChaCha8 stream `i` of `config.seed`, one uniform per
/// `j > i` in increasing order, so the output does not depend on how rows
/// are scheduled.
pub fn generate_dcsbm(config: &SbmConfig) -> Result<(Graph, Partition)> {
    config.validate()?;
    let truth = config.partition()?;
    let thetas = config.thetas();
    let n = config.n();
    let labels = truth.labels();
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(config.seed, i as u64);
            ((i + 1)..n)
                .filter(|&j| {
                    let u: f64 = rng.random();
                    u < config.edge_prob(labels, &thetas, i, j)
                })
                .collect()
        })
        .collect();
    let edges = rows
        .into_iter()
        .enumerate()
        .flat_map(|(i, row)| row.into_iter().map(move |j| (i, j, 1.0)));
    Ok((Graph::from_edges(n, edges)?, truth))
}

/// Expected degree of every node under the model.
pub fn expected_degree(config: &SbmConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let truth = config.partition()?;
    let thetas = config.thetas();
    let n = config.n();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| config.edge_prob(truth.labels(), &thetas, i, j))
                .sum()
        })
        .collect())
}
