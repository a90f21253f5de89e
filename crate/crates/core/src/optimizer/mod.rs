//! Alternating maximization of the joint criterion: label search with the
//! coefficients frozen, then coefficient ascent with the labels frozen.

mod beta;
mod edges;
mod exhaustive;
mod fit;
mod switch;
mod tabu;

pub use beta::{community_objective, optimize_betas, optimize_betas_cached, AscentReport};
pub use edges::EdgeCache;
pub use exhaustive::{exhaustive_oracle, exhaustive_oracle_cached};
pub use fit::{fit, fit_from, fit_with_similarities, FitResult};
pub use switch::{approx_switch_preference, exact_switch_preference, SwitchState};
pub use tabu::{tabu_label_search, tabu_search_cached};

use serde::{Deserialize, Serialize};

/// Label-search settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabuConfig {
    /// Sweeps a node stays frozen after it moves.
    pub tenure: usize,
    pub max_sweeps: usize,
    /// Independent runs; run 0 starts from the given labels, the others from perturbations of it.
    pub restarts: usize,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self { tenure: 3, max_sweeps: 50, restarts: 5 }
    }
}

/// Projected proximal-gradient settings for the coefficient step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub max_iters: usize,
    /// Stop once the step-scaled gradient mapping norm falls below this.
    pub tol: f64,
    pub initial_step: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self { max_iters: 1000, tol: 1e-8, initial_step: 1.0 }
    }
}

/// Where the first label assignment comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// Regularized spectral clustering, falling back to random balanced labels.
    Spectral,
    /// Random balanced labels.
    Random,
}
