use super::EdgeCache;
use crate::criterion::{dot, size_scale, weight_from_score, BetaSet};
use crate::partition::Partition;

/// Weighted sums needed to score single-node moves with the coefficients fixed.
///
/// `internal[k]` is twice the total edge weight inside community `k` and
/// `cross[i][k]` the weight between node `i` and the members of `k`
/// (excluding `i`), both under `beta_k`.
#[derive(Clone, Debug)]
pub struct SwitchState<'a> {
    cache: &'a EdgeCache,
    partition: Partition,
    k: usize,
    weights: Vec<f64>,
    internal: Vec<f64>,
    cross: Vec<f64>,
    sizes: Vec<usize>,
}

impl<'a> SwitchState<'a> {
    pub fn new(cache: &'a EdgeCache, partition: &Partition, betas: &BetaSet, w_n: f64) -> Self {
        assert_eq!(cache.n(), partition.n());
        assert_eq!(betas.k(), partition.k());
        let k = partition.k();
        let mut weights = vec![0.0; cache.edges().len() * k];
        for e in 0..cache.edges().len() {
            for c in 0..k {
                weights[e * k + c] = weight_from_score(dot(cache.phi(e), betas.get(c)), w_n);
            }
        }
        let mut state = Self {
            cache,
            partition: partition.clone(),
            k,
            weights,
            internal: vec![0.0; k],
            cross: vec![0.0; cache.n() * k],
            sizes: partition.sizes(),
        };
        state.recompute();
        state
    }

    fn recompute(&mut self) {
        self.internal.iter_mut().for_each(|x| *x = 0.0);
        self.cross.iter_mut().for_each(|x| *x = 0.0);
        for (e, &(u, v, a)) in self.cache.edges().iter().enumerate() {
            let (lu, lv) = (self.partition.label(u), self.partition.label(v));
            self.cross[u * self.k + lv] += a * self.weights[e * self.k + lv];
            self.cross[v * self.k + lu] += a * self.weights[e * self.k + lu];
            if lu == lv {
                self.internal[lu] += 2.0 * a * self.weights[e * self.k + lu];
            }
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// `S_kk`
    pub fn internal(&self, k: usize) -> f64 {
        self.internal[k]
    }

    /// `S_{i <-> k}`
    pub fn cross(&self, i: usize, k: usize) -> f64 {
        self.cross[i * self.k + k]
    }

    /// Current criterion value.
    pub fn criterion(&self, alpha: f64) -> f64 {
        self.internal
            .iter()
            .zip(&self.sizes)
            .map(|(&s, &n)| s * size_scale(n, alpha))
            .sum()
    }

    /// Change in the criterion if node `i` moved to community `k`.
    pub fn exact_preference(&self, i: usize, k: usize, alpha: f64) -> f64 {
        let l = self.partition.label(i);
        if k == l {
            return 0.0;
        }
        let term = |s: f64, size: usize| s * size_scale(size, alpha);
        // community l with i removed
        let s_ll = self.internal[l] - 2.0 * self.cross(i, l);
        let n_l = self.sizes[l] - 1;
        let s_kk = self.internal[k];
        let n_k = self.sizes[k];
        let after = term(s_kk + 2.0 * self.cross(i, k), n_k + 1) + term(s_ll, n_l);
        let before = term(s_kk, n_k) + term(s_ll + 2.0 * self.cross(i, l), n_l + 1);
        after - before
    }

    /// Large-community approximation of [`Self::exact_preference`]'s sign.
    pub fn approx_preference(&self, i: usize, k: usize, alpha: f64) -> f64 {
        let l = self.partition.label(i);
        if k == l {
            return 0.0;
        }
        let (n_k, n_l) = (self.sizes[k] as f64, self.sizes[l] as f64);
        if self.sizes[k] == 0 {
            return self.exact_preference(i, k, alpha);
        }
        self.cross(i, k) / n_k * (n_k / n_l).powf(1.0 - alpha) - self.cross(i, l) / n_l
    }

    /// Move node `i` to community `k`, updating all sums incrementally.
    pub fn apply_move(&mut self, i: usize, k: usize) {
        let l = self.partition.label(i);
        if k == l {
            return;
        }
        self.internal[l] -= 2.0 * self.cross(i, l);
        self.internal[k] += 2.0 * self.cross(i, k);
        for &(j, e) in self.cache.incident(i) {
            let a = self.cache.edges()[e].2;
            self.cross[j * self.k + l] -= a * self.weights[e * self.k + l];
            self.cross[j * self.k + k] += a * self.weights[e * self.k + k];
        }
        self.sizes[l] -= 1;
        self.sizes[k] += 1;
        self.partition.set(i, k);
    }

    pub fn into_partition(self) -> Partition {
        self.partition
    }
}

/// Criterion gain of moving node `i` from its current community `l` to `k`.
pub fn exact_switch_preference(state: &SwitchState<'_>, i: usize, k: usize, l: usize, alpha: f64) -> f64 {
    assert_eq!(state.partition().label(i), l, "node {i} is not in community {l}");
    state.exact_preference(i, k, alpha)
}

/// `(S_ik / |E_k|) (|E_k| / |E_l|)^(1 - alpha) - S_il / |E_l|`; positive favors `k`.
pub fn approx_switch_preference(state: &SwitchState<'_>, i: usize, k: usize, l: usize, alpha: f64) -> f64 {
    assert_eq!(state.partition().label(i), l, "node {i} is not in community {l}");
    state.approx_preference(i, k, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{jcdc_criterion, FitConfig};
    use crate::features::{build_similarities, default_measures, FeatureTable};
    use crate::graph::Graph;

    fn setup() -> (Graph, crate::features::SimilaritySet) {
        let g = Graph::from_edges(
            6,
            vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 2.0), (3, 4, 1.0), (4, 5, 1.0), (2, 3, 0.5)],
        )
        .unwrap();
        let f = FeatureTable::from_rows(&[
            vec![0.0, 1.0],
            vec![0.2, 0.0],
            vec![0.1, 3.0],
            vec![2.0, 1.0],
            vec![2.5, 0.5],
            vec![1.9, 2.0],
        ])
        .unwrap();
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        (g, s)
    }

    #[test]
    fn sums_match_recomputation_after_moves() {
        let (g, s) = setup();
        let cache = EdgeCache::new(&g, &s);
        let betas = BetaSet::new(vec![vec![0.5, -0.3], vec![1.0, 0.2]]).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1, 0, 1], 2).unwrap();
        let mut st = SwitchState::new(&cache, &p, &betas, 5.0);
        for &(i, k) in &[(2, 0), (4, 1), (0, 1), (0, 0)] {
            st.apply_move(i, k);
        }
        let fresh = SwitchState::new(&cache, st.partition(), &betas, 5.0);
        for k in 0..2 {
            assert!((st.internal(k) - fresh.internal(k)).abs() < 1e-9);
            for i in 0..6 {
                assert!((st.cross(i, k) - fresh.cross(i, k)).abs() < 1e-9);
            }
        }
        let cfg = FitConfig::default();
        let direct = jcdc_criterion(&g, &s, st.partition(), &betas, &cfg);
        assert!((st.criterion(1.0) - direct).abs() < 1e-9);
    }

    #[test]
    fn isolated_node_has_zero_preference_at_unit_alpha() {
        let g = Graph::from_edges(4, vec![(0, 1, 1.0)]).unwrap();
        let f = FeatureTable::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        let cache = EdgeCache::new(&g, &s);
        // node 3 is isolated; communities {0,2} | {1,3} have no internal edges
        let p = Partition::new(vec![0, 1, 0, 1], 2).unwrap();
        let st = SwitchState::new(&cache, &p, &BetaSet::zeros(2, 1), 5.0);
        assert_eq!(exact_switch_preference(&st, 3, 0, 1, 1.0), 0.0);
        assert_eq!(exact_switch_preference(&st, 3, 1, 1, 1.0), 0.0);
    }

    #[test]
    fn stronger_cross_sum_is_preferred() {
        // node 2 sits in {2,3,4}; edges to community 0 outweigh edges home.
        let g = Graph::from_edges(6, vec![(0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 5, 1.0), (1, 5, 1.0), (3, 4, 1.0)]).unwrap();
        let f = FeatureTable::from_rows(&vec![vec![0.0]; 6]).unwrap();
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        let cache = EdgeCache::new(&g, &s);
        let p = Partition::new(vec![0, 0, 1, 1, 1, 0], 2).unwrap();
        let st = SwitchState::new(&cache, &p, &BetaSet::zeros(2, 1), 5.0);
        assert_eq!(st.internal(0), st.internal(1));
        assert!(st.cross(2, 0) > st.cross(2, 1));
        assert!(exact_switch_preference(&st, 2, 0, 1, 1.0) > 0.0);
        assert!(approx_switch_preference(&st, 2, 0, 1, 1.0) > 0.0);
    }
}
