use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Assignment of `n` nodes to `k` communities, labels `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(config_err("partition needs at least one community"));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(config_err(format!("label {l} of node {i} is out of range for k = {k}")));
        }
        Ok(Self { labels, k })
    }

    /// Every node in community 0.
    pub fn single(n: usize) -> Self {
        Self { labels: vec![0; n], k: 1 }
    }

    /// Contiguous blocks: the first `sizes[0]` nodes get label 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
            .collect();
        Self::new(labels, sizes.len())
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Members of each community, in node order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    /// Apply a label map `old -> map[old]`.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        Self::new(self.labels.iter().map(|&l| map[l]).collect(), self.k)
    }

    pub(crate) fn set(&mut self, i: usize, label: usize) {
        debug_assert!(label < self.k);
        self.labels[i] = label;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_sum_to_n() {
        let p = Partition::from_sizes(&[3, 0, 2]).unwrap();
        assert_eq!(p.sizes(), vec![3, 0, 2]);
        assert_eq!(p.labels(), &[0, 0, 0, 2, 2]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Partition::new(vec![0, 2], 2).is_err());
        assert!(Partition::new(vec![], 0).is_err());
    }
}
