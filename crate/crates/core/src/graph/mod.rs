//! Undirected weighted graphs and block-model generators.

mod io;
mod sbm;

pub use io::{parse_edge_list, read_edge_list, write_edge_list};
pub use sbm::{expected_degree, generate_dcsbm, SbmConfig};

use crate::error::{config_err, Result};

/// Node counts up to this size also keep a dense adjacency matrix.
pub const DENSE_LIMIT: usize = 2000;

/// Symmetric, nonnegative, loop-free weighted adjacency.
///
/// Neighbor lists are always kept (sorted by neighbor id); a dense row-major
/// copy is kept as well when `n <= DENSE_LIMIT`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    neighbors: Vec<Vec<(usize, f64)>>,
    dense: Option<Vec<f64>>,
    edge_count: usize,
}

impl Graph {
    /// Graph with no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, std::iter::empty()).expect("empty graph is valid")
    }

    /// Build from undirected edges `(u, v, weight)`, each listed once.
    ///
    /// Zero-weight edges are dropped. Self-loops, duplicate edges, negative or
    /// non-finite weights and out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(crate::Error::Dimension(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(config_err(format!("self-loop at node {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(config_err(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            if w == 0.0 {
                continue;
            }
            neighbors[u].push((v, w));
            neighbors[v].push((u, w));
            edge_count += 1;
        }
        for (u, row) in neighbors.iter_mut().enumerate() {
            row.sort_by_key(|&(v, _)| v);
            if let Some(pair) = row.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(config_err(format!("duplicate edge ({u}, {})", pair[0].0)));
            }
        }
        let dense = (n <= DENSE_LIMIT).then(|| {
            let mut m = vec![0.0; n * n];
            for (u, row) in neighbors.iter().enumerate() {
                for &(v, w) in row {
                    m[u * n + v] = w;
                }
            }
            m
        });
        Ok(Self { n, neighbors, dense, edge_count })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges with positive weight.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(m) => m[i * self.n + j],
            None => self.neighbors[i]
                .binary_search_by_key(&j, |&(v, _)| v)
                .map_or(0.0, |pos| self.neighbors[i][pos].1),
        }
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.neighbors[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    /// Undirected edges `(u, v, w)` with `u < v`, ordered by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&&(v, _)| v > u).map(move |&(v, w)| (u, v, w)))
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    /// Graph with nodes renamed by `perm`: node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::from_edges(self.n, self.edges().map(|(u, v, w)| (perm[u], perm[v], w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_loop_free() {
        let g = Graph::from_edges(4, vec![(0, 1, 1.0), (2, 3, 2.5), (0, 2, 1.0)]).unwrap();
        for i in 0..4 {
            assert_eq!(g.weight(i, i), 0.0);
            for j in 0..4 {
                assert_eq!(g.weight(i, j), g.weight(j, i));
            }
        }
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree(0), 2.0);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1.0), (0, 2, 1.0), (2, 3, 2.5)]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, vec![(1, 1, 1.0)]).is_err());
        assert!(Graph::from_edges(3, vec![(0, 1, -1.0)]).is_err());
        assert!(Graph::from_edges(3, vec![(0, 1, f64::NAN)]).is_err());
        assert!(Graph::from_edges(3, vec![(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(matches!(Graph::from_edges(3, vec![(0, 5, 1.0)]), Err(crate::Error::Dimension(_))));
    }

    #[test]
    fn sparse_lookup_matches_dense() {
        let edges: Vec<_> = (0..DENSE_LIMIT).map(|i| (i, i + 1, 1.0 + i as f64)).collect();
        let g = Graph::from_edges(DENSE_LIMIT + 1, edges).unwrap();
        assert!(!g.is_dense());
        assert_eq!(g.weight(5, 6), 6.0);
        assert_eq!(g.weight(6, 5), 6.0);
        assert_eq!(g.weight(5, 7), 0.0);
    }
}
