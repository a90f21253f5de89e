use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::kmeans::lloyd;
use crate::error::{config_err, Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub k: usize,
    /// Added to every degree before normalizing.
    pub tau: f64,
    /// Scale each embedding row to unit length before k-means.
    pub row_normalize: bool,
    pub kmeans_starts: usize,
    pub seed: u64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { k: 2, tau: 1e-7, row_normalize: false, kmeans_starts: 10, seed: 0 }
    }
}

/// Leading eigenpairs of `D_tau^-1/2 A D_tau^-1/2`.
#[derive(Clone, Debug)]
pub struct SpectralEmbedding {
    pub laplacian: DMatrix<f64>,
    /// Largest `k` eigenvalues, descending.
    pub values: Vec<f64>,
    /// `n x k`, column `c` is the eigenvector of `values[c]`.
    pub vectors: DMatrix<f64>,
}

pub fn spectral_embedding(graph: &Graph, k: usize, tau: f64) -> Result<SpectralEmbedding> {
    let n = graph.n();
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(config_err(format!("tau = {tau} must be >= 0")));
    }
    if k == 0 || k > n {
        return Err(config_err(format!("k = {k} must lie in 1..={n}")));
    }
    let degrees = graph.degrees();
    if tau == 0.0 && degrees.iter().all(|&d| d == 0.0) {
        return Err(Error::DegenerateLaplacian("every degree is zero and tau = 0".into()));
    }
    let inv_sqrt: Vec<f64> = degrees
        .iter()
        .map(|&d| if d + tau > 0.0 { 1.0 / (d + tau).sqrt() } else { 0.0 })
        .collect();
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (u, v, w) in graph.edges() {
        let x = inv_sqrt[u] * w * inv_sqrt[v];
        lap[(u, v)] = x;
        lap[(v, u)] = x;
    }
    let eig = SymmetricEigen::new(lap.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order[..k].iter().map(|&c| eig.eigenvalues[c]).collect();
    let vectors = DMatrix::from_fn(n, k, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok(SpectralEmbedding { laplacian: lap, values, vectors })
}

/// Regularized spectral clustering: k-means on the rows of the leading eigenvectors.
pub fn spectral_clustering(graph: &Graph, config: &SpectralConfig) -> Result<Partition> {
    if config.k == 1 {
        return Ok(Partition::single(graph.n()));
    }
    let emb = spectral_embedding(graph, config.k, config.tau)?;
    let n = graph.n();
    let mut points = Vec::with_capacity(n * config.k);
    for i in 0..n {
        let row: Vec<f64> = (0..config.k).map(|c| emb.vectors[(i, c)]).collect();
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if config.row_normalize && norm > 0.0 {
            points.extend(row.iter().map(|x| x / norm));
        } else {
            points.extend(row);
        }
    }
    let fit = lloyd(&points, config.k, config.k, config.kmeans_starts, config.seed)?;
    Partition::new(fit.labels, config.k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::misclassification_distance;

    fn cliques(sizes: &[usize]) -> (Graph, Partition) {
        let mut edges = Vec::new();
        let mut base = 0;
        for &s in sizes {
            for a in 0..s {
                for b in (a + 1)..s {
                    edges.push((base + a, base + b, 1.0));
                }
            }
            base += s;
        }
        (Graph::from_edges(base, edges).unwrap(), Partition::from_sizes(sizes).unwrap())
    }

    #[test]
    fn disjoint_cliques_are_recovered() {
        let (g, truth) = cliques(&[6, 4]);
        for row_normalize in [false, true] {
            let p = spectral_clustering(&g, &SpectralConfig { row_normalize, ..SpectralConfig::default() }).unwrap();
            assert_eq!(misclassification_distance(&p, &truth).unwrap(), 0.0);
        }
    }

    #[test]
    fn eigenpairs_are_accurate() {
        let (g, _) = cliques(&[5, 5, 3]);
        let emb = spectral_embedding(&g, 3, 1e-7).unwrap();
        for c in 0..3 {
            let v = emb.vectors.column(c);
            let r = &emb.laplacian * v - v * emb.values[c];
            assert!(r.norm() <= 1e-8);
        }
        assert!(emb.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn single_community() {
        let (g, _) = cliques(&[3]);
        assert_eq!(spectral_clustering(&g, &SpectralConfig { k: 1, ..SpectralConfig::default() }).unwrap(), Partition::single(3));
    }

    #[test]
    fn empty_graph_without_regularization_is_degenerate() {
        let g = Graph::empty(4);
        let cfg = SpectralConfig { tau: 0.0, ..SpectralConfig::default() };
        assert!(matches!(spectral_clustering(&g, &cfg), Err(Error::DegenerateLaplacian(_))));
    }
}
