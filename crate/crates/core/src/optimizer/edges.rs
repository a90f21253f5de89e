use crate::features::SimilaritySet;
use crate::graph::Graph;

/// Edges of a graph with their standardized similarity vectors.
///
/// Only edge-incident similarities are ever needed by the optimizer, so
/// they are evaluated once here.
#[derive(Clone, Debug)]
pub struct EdgeCache {
    n: usize,
    p: usize,
    edges: Vec<(usize, usize, f64)>,
    phi: Vec<f64>,
    incident: Vec<Vec<(usize, usize)>>,
}

impl EdgeCache {
    pub fn new(graph: &Graph, sims: &SimilaritySet) -> Self {
        assert_eq!(graph.n(), sims.n(), "graph and similarities disagree on n");
        let n = graph.n();
        let p = sims.p();
        let edges: Vec<_> = graph.edges().collect();
        let mut phi = vec![0.0; edges.len() * p];
        let mut incident = vec![Vec::new(); n];
        for (e, &(u, v, _)) in edges.iter().enumerate() {
            sims.phi_into(u, v, &mut phi[e * p..(e + 1) * p]);
            incident[u].push((v, e));
            incident[v].push((u, e));
        }
        Self { n, p, edges, phi, incident }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn phi(&self, e: usize) -> &[f64] {
        &self.phi[e * self.p..(e + 1) * self.p]
    }

    /// `(neighbor, edge index)` pairs of node `i`.
    pub fn incident(&self, i: usize) -> &[(usize, usize)] {
        &self.incident[i]
    }
}
