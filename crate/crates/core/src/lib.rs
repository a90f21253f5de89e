//! Joint community detection on networks with node features.
//!
//! The criterion rewards dense communities whose internal edges are also
//! similar in feature space. Each community `k` carries a coefficient vector
//! `beta_k` that weights the pairwise similarity components, and an edge
//! `(i, j)` inside community `k` contributes `w_n - exp(-<phi_ij, beta_k>)`.
//!
//! Entry points:
//! - [`graph`]: graphs, edge-list IO, the degree-corrected block model generator.
//! - [`features`]: feature tables, CSV IO, pairwise similarities.
//! - [`criterion`]: the criterion, its decomposition and [`FitConfig`].
//! - [`optimizer`]: label search, coefficient ascent, the alternating [`fit`].
//! - [`baselines`]: spectral clustering and k-means.
//! - [`metrics`]: NMI, misclassification distance, population quantities.
//! - [`harness`]: the simulation grid and heatmap output.

pub mod baselines;
pub mod cli;
pub mod criterion;
pub mod error;
pub mod features;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod optimizer;
pub mod partition;
pub mod rng;
pub mod verify;

pub use criterion::{jcdc_criterion, marginal_criterion, BetaSet, FitConfig};
pub use error::{Error, Result};
pub use features::{ColumnKind, FeatureTable, SimilaritySet};
pub use graph::{generate_dcsbm, Graph, SbmConfig};
pub use optimizer::{fit, FitResult, InitStrategy};
pub use partition::Partition;
