//! Node features, the Gaussian simulation design, and pairwise similarities.

mod io;
mod similarity;

pub use io::{parse_feature_csv, parse_kinds, KindSpec};
pub use similarity::{build_similarities, default_measures, Similarity, SimilaritySet};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::partition::Partition;
use crate::rng;

/// How a feature column is interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    /// Integer level codes `0..levels`.
    Categorical { levels: usize },
    Ordinal,
}

/// Dense `n x p` feature matrix with per-column kinds and names.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    n: usize,
    p: usize,
    values: Vec<f64>,
    kinds: Vec<ColumnKind>,
    names: Vec<String>,
    level_labels: Vec<Vec<String>>,
}

impl FeatureTable {
    /// Build from row-major values. All columns get generated names `f0, f1, ...`.
    pub fn new(n: usize, p: usize, values: Vec<f64>, kinds: Vec<ColumnKind>) -> Result<Self> {
        let names = (0..p).map(|l| format!("f{l}")).collect();
        Self::with_names(n, p, values, kinds, names)
    }

    pub fn with_names(
        n: usize,
        p: usize,
        values: Vec<f64>,
        kinds: Vec<ColumnKind>,
        names: Vec<String>,
    ) -> Result<Self> {
        let level_labels = kinds
            .iter()
            .map(|k| match k {
                ColumnKind::Categorical { levels } => (0..*levels).map(|l| l.to_string()).collect(),
                _ => Vec::new(),
            })
            .collect();
        let table = Self { n, p, values, kinds, names, level_labels };
        table.validate()?;
        Ok(table)
    }

    /// Continuous columns from a list of rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(crate::Error::Dimension("ragged feature rows".into()));
        }
        Self::new(n, p, rows.concat(), vec![ColumnKind::Continuous; p])
    }

    pub(crate) fn set_level_labels(&mut self, column: usize, labels: Vec<String>) {
        self.level_labels[column] = labels;
    }

    fn validate(&self) -> Result<()> {
        if self.values.len() != self.n * self.p {
            return Err(crate::Error::Dimension(format!(
                "{} values for a {} x {} table",
                self.values.len(),
                self.n,
                self.p
            )));
        }
        if self.kinds.len() != self.p || self.names.len() != self.p {
            return Err(crate::Error::Dimension("column kinds/names do not match p".into()));
        }
        for l in 0..self.p {
            for i in 0..self.n {
                let v = self.get(i, l);
                let ok = match self.kinds[l] {
                    ColumnKind::Categorical { levels } => v >= 0.0 && v.fract() == 0.0 && (v as usize) < levels,
                    _ => v.is_finite(),
                };
                if !ok {
                    return Err(config_err(format!("invalid value {v} at node {i}, column {}", self.names[l])));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, l: usize) -> f64 {
        self.values[i * self.p + l]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn column(&self, l: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, l)).collect()
    }

    pub fn kinds(&self) -> &[ColumnKind] {
        &self.kinds
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Replace each categorical column with `M - 1` indicator columns for
    /// levels `1..M` (level 0 is the baseline). Indicators keep a two-level
    /// categorical kind so they are compared by equality.
    pub fn expand_categorical(&self) -> FeatureTable {
        self.expand(false)
    }

    /// Numeric design matrix for k-means: categorical columns become `M`
    /// one-hot continuous columns, other columns are copied.
    pub fn one_hot(&self) -> FeatureTable {
        self.expand(true)
    }

    fn expand(&self, full: bool) -> FeatureTable {
        let mut cols: Vec<(Vec<f64>, ColumnKind, String)> = Vec::new();
        for l in 0..self.p {
            match self.kinds[l] {
                ColumnKind::Categorical { levels } if full || levels > 2 => {
                    let first = if full { 0 } else { 1 };
                    for level in first..levels {
                        let col = (0..self.n).map(|i| f64::from(u8::from(self.get(i, l) as usize == level))).collect();
                        let kind = if full { ColumnKind::Continuous } else { ColumnKind::Categorical { levels: 2 } };
                        let label = self.level_labels[l].get(level).cloned().unwrap_or_else(|| level.to_string());
                        cols.push((col, kind, format!("{}={}", self.names[l], label)));
                    }
                }
                kind => {
                    let kind = if full { ColumnKind::Continuous } else { kind };
                    cols.push((self.column(l), kind, self.names[l].clone()));
                }
            }
        }
        let p = cols.len();
        let mut values = vec![0.0; self.n * p];
        for (l, (col, _, _)) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                values[i * p + l] = v;
            }
        }
        let (kinds, names) = cols.into_iter().map(|(_, k, name)| (k, name)).unzip();
        FeatureTable::with_names(self.n, p, values, kinds, names).expect("expansion preserves validity")
    }

    /// Rows reordered so that node `i` moves to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> FeatureTable {
        let mut values = vec![0.0; self.values.len()];
        for i in 0..self.n {
            values[perm[i] * self.p..(perm[i] + 1) * self.p].copy_from_slice(self.row(i));
        }
        FeatureTable { values, ..self.clone() }
    }
}

/// Gaussian feature design: one signal column, `n_noise` noise columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureGenConfig {
    pub mu: f64,
    pub n_noise: usize,
    pub seed: u64,
}

/// Column 0 is `N(mu, 1)` for community 0 and `N(-mu, 1)` for every other
/// community; the remaining `n_noise` columns are iid `N(0, 1)`.
/// Draws are taken node by node, signal first.
pub fn generate_features(partition: &Partition, config: &FeatureGenConfig) -> Result<FeatureTable> {
    if !(config.mu.is_finite() && config.mu >= 0.0) {
        return Err(config_err(format!("mu = {} must be a finite nonnegative number", config.mu)));
    }
    let p = 1 + config.n_noise;
    let mut rng = rng::seeded(config.seed);
    let mut values = Vec::with_capacity(partition.n() * p);
    for &label in partition.labels() {
        let mean = if label == 0 { config.mu } else { -config.mu };
        let z: f64 = StandardNormal.sample(&mut rng);
        values.push(mean + z);
        for _ in 0..config.n_noise {
            values.push(StandardNormal.sample(&mut rng));
        }
    }
    let names = std::iter::once("signal".to_string())
        .chain((1..=config.n_noise).map(|l| format!("noise{l}")))
        .collect();
    FeatureTable::with_names(partition.n(), p, values, vec![ColumnKind::Continuous; p], names)
}
