use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ColumnKind, FeatureTable};
use crate::error::{Error, Result};

/// Per-column similarity measure. Larger means more alike.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    /// `-|x - y|`
    NegAbsDiff,
    /// `1{x == y}`
    Equality,
}

impl Similarity {
    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            Similarity::NegAbsDiff => -(x - y).abs(),
            Similarity::Equality => f64::from(u8::from(x == y)),
        }
    }
}

/// Default measure for each column kind.
pub fn default_measures(features: &FeatureTable) -> Vec<Similarity> {
    features
        .kinds()
        .iter()
        .map(|k| match k {
            ColumnKind::Categorical { .. } => Similarity::Equality,
            ColumnKind::Continuous | ColumnKind::Ordinal => Similarity::NegAbsDiff,
        })
        .collect()
}

/// Standardized pairwise similarity vectors.
///
/// Raw similarities are evaluated on demand from the stored columns.
/// Standardization uses the population mean and standard deviation of each
/// dimension over all `n(n-1)/2` unordered pairs. A dimension whose raw
/// values are constant is reported in [`SimilaritySet::constant_dims`] and
/// evaluates to 0.
#[derive(Clone, Debug)]
pub struct SimilaritySet {
    n: usize,
    columns: Vec<Vec<f64>>,
    measures: Vec<Similarity>,
    mean: Vec<f64>,
    sd: Vec<f64>,
    constant: Vec<bool>,
    m_phi: f64,
    names: Vec<String>,
}

// Relative threshold below which a dimension counts as constant.
const CONSTANT_SD: f64 = 1e-12;

impl SimilaritySet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn measures(&self) -> &[Similarity] {
        &self.measures
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sd(&self) -> &[f64] {
        &self.sd
    }

    /// Largest `||phi(i, j)||_2` over all pairs.
    pub fn m_phi(&self) -> f64 {
        self.m_phi
    }

    pub fn constant_dims(&self) -> Vec<usize> {
        self.constant.iter().enumerate().filter(|(_, &c)| c).map(|(l, _)| l).collect()
    }

    pub fn raw(&self, i: usize, j: usize, l: usize) -> f64 {
        self.measures[l].eval(self.columns[l][i], self.columns[l][j])
    }

    pub fn raw_vec(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.p()).map(|l| self.raw(i, j, l)).collect()
    }

    pub fn phi_component(&self, i: usize, j: usize, l: usize) -> f64 {
        if self.constant[l] {
            0.0
        } else {
            (self.raw(i, j, l) - self.mean[l]) / self.sd[l]
        }
    }

    /// Standardized similarity written into `out` (length `p`).
    pub fn phi_into(&self, i: usize, j: usize, out: &mut [f64]) {
        for (l, slot) in out.iter_mut().enumerate() {
            *slot = self.phi_component(i, j, l);
        }
    }

    pub fn phi(&self, i: usize, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.p()];
        self.phi_into(i, j, &mut out);
        out
    }

    /// Sum of `f(i, j)` over unordered pairs, reduced row by row in a fixed order.
    fn pair_sum<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(usize, usize, &mut [f64]) + Sync,
    {
        let p = self.p();
        let rows: Vec<Vec<f64>> = (0..self.n)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![0.0; p];
                let mut buf = vec![0.0; p];
                for j in (i + 1)..self.n {
                    f(i, j, &mut buf);
                    for (a, b) in acc.iter_mut().zip(&buf) {
                        *a += b;
                    }
                }
                acc
            })
            .collect();
        rows.into_iter().fold(vec![0.0; p], |mut tot, row| {
            for (t, r) in tot.iter_mut().zip(row) {
                *t += r;
            }
            tot
        })
    }
}

/// Compute pair-population moments and the norm bound for `features`.
///
/// `measures` gives one similarity per column; pass
/// [`default_measures`] for the kind-based defaults.
pub fn build_similarities(features: &FeatureTable, measures: &[Similarity]) -> Result<SimilaritySet> {
    if measures.len() != features.p() {
        return Err(Error::Dimension(format!(
            "{} similarity measures for {} feature columns",
            measures.len(),
            features.p()
        )));
    }
    let n = features.n();
    let p = features.p();
    let mut set = SimilaritySet {
        n,
        columns: (0..p).map(|l| features.column(l)).collect(),
        measures: measures.to_vec(),
        mean: vec![0.0; p],
        sd: vec![1.0; p],
        constant: vec![false; p],
        m_phi: 0.0,
        names: features.names().to_vec(),
    };
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    if pairs == 0.0 {
        set.constant = vec![true; p];
        return Ok(set);
    }
    let sums = set.pair_sum(|i, j, out| {
        for (l, o) in out.iter_mut().enumerate() {
            *o = set.raw(i, j, l);
        }
    });
    set.mean = sums.iter().map(|s| s / pairs).collect();
    let sq = set.pair_sum(|i, j, out| {
        for (l, o) in out.iter_mut().enumerate() {
            *o = (set.raw(i, j, l) - set.mean[l]).powi(2);
        }
    });
    for l in 0..p {
        let sd = (sq[l] / pairs).sqrt();
        if sd <= CONSTANT_SD * set.mean[l].abs().max(1.0) {
            set.constant[l] = true;
            set.sd[l] = 0.0;
        } else {
            set.sd[l] = sd;
        }
    }
    let m_phi = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut buf = vec![0.0; p];
            ((i + 1)..n).fold(0.0f64, |m, j| {
                set.phi_into(i, j, &mut buf);
                m.max(buf.iter().map(|x| x * x).sum::<f64>().sqrt())
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    set.m_phi = m_phi;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(col: &[f64]) -> FeatureTable {
        FeatureTable::new(col.len(), 1, col.to_vec(), vec![ColumnKind::Continuous]).unwrap()
    }

    #[test]
    fn three_node_hand_example() {
        // raw over pairs (0,1),(0,2),(1,2) = (-1,-3,-2); mean -2,
        // population variance 2/3.
        let f = table(&[0.0, 1.0, 3.0]);
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        assert_eq!(s.raw_vec(0, 1), vec![-1.0]);
        assert_eq!(s.raw_vec(0, 2), vec![-3.0]);
        assert_eq!(s.raw_vec(1, 2), vec![-2.0]);
        assert!((s.mean()[0] + 2.0).abs() < 1e-15);
        let sd = (2.0f64 / 3.0).sqrt();
        assert!((s.sd()[0] - sd).abs() < 1e-15);
        let z = 1.0 / sd;
        assert!((s.phi(0, 1)[0] - z).abs() < 1e-12);
        assert!((s.phi(0, 2)[0] + z).abs() < 1e-12);
        assert!(s.phi(1, 2)[0].abs() < 1e-12);
        assert!((s.m_phi() - z).abs() < 1e-12);
    }

    #[test]
    fn identical_nodes_have_zero_raw_distance() {
        let f = table(&[0.7, 0.7, 2.0]);
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        assert_eq!(s.raw(0, 1, 0), 0.0);
        assert!(s.phi(0, 1)[0] > s.phi(0, 2)[0]);
    }

    #[test]
    fn all_distinct_categories_is_constant_column() {
        let f = FeatureTable::new(4, 1, vec![0.0, 1.0, 2.0, 3.0], vec![ColumnKind::Categorical { levels: 4 }]).unwrap();
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        assert_eq!(s.constant_dims(), vec![0]);
        assert_eq!(s.phi(0, 3), vec![0.0]);
        assert_eq!(s.m_phi(), 0.0);
    }

    #[test]
    fn measure_count_must_match() {
        let f = table(&[0.0, 1.0]);
        assert!(build_similarities(&f, &[]).is_err());
    }
}
