use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{config_err, Result};
use crate::features::FeatureTable;
use crate::partition::Partition;
use crate::rng;

const MAX_LLOYD_ITERS: usize = 300;

/// Best Lloyd run over several random starts.
#[derive(Clone, Debug)]
pub struct KmeansFit {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares.
    pub wcss: f64,
    /// WCSS after every assignment step of the winning start.
    pub trace: Vec<f64>,
    /// Start index that produced this fit.
    pub start: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Lloyd's algorithm on row-major `points` (`dim` columns).
///
/// Each start seeds its centroids with `k` distinct rows drawn at random
/// (stream `start` of `seed`). If fewer than `k` distinct rows exist the
/// extra clusters stay empty. A cluster that empties during iteration is
/// reseeded at the point farthest from its centroid. The start with the
/// lowest WCSS wins, ties to the lowest index.
pub fn lloyd(points: &[f64], dim: usize, k: usize, n_starts: usize, seed: u64) -> Result<KmeansFit> {
    if dim == 0 {
        return Err(config_err("k-means needs at least one column"));
    }
    let n = points.len() / dim;
    if k == 0 || k > n {
        return Err(config_err(format!("k = {k} must lie in 1..={n}")));
    }
    let rows: Vec<&[f64]> = points.chunks(dim).collect();
    let fits: Vec<KmeansFit> = (0..n_starts.max(1))
        .into_par_iter()
        .map(|start| single_start(&rows, k, seed, start))
        .collect();
    Ok(fits
        .into_iter()
        .reduce(|best, f| if f.wcss < best.wcss { f } else { best })
        .expect("at least one start"))
}

fn single_start(rows: &[&[f64]], k: usize, seed: u64, start: usize) -> KmeansFit {
    let n = rows.len();
    let dim = rows[0].len();
    let mut rng = rng::substream(seed, start as u64);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut centroids: Vec<Option<Vec<f64>>> = Vec::with_capacity(k);
    for &i in &order {
        if centroids.len() == k {
            break;
        }
        if !centroids.iter().flatten().any(|c| c.as_slice() == rows[i]) {
            centroids.push(Some(rows[i].to_vec()));
        }
    }
    centroids.resize(k, None);

    let mut labels = vec![usize::MAX; n];
    let mut trace = Vec::new();
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        let mut wcss = 0.0;
        for (i, row) in rows.iter().enumerate() {
            let (best, d) = centroids
                .iter()
                .enumerate()
                .filter_map(|(c, cent)| cent.as_ref().map(|cent| (c, sq_dist(row, cent))))
                .fold((usize::MAX, f64::INFINITY), |acc, (c, d)| if d < acc.1 { (c, d) } else { acc });
            wcss += d;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        trace.push(wcss);
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, row) in rows.iter().enumerate() {
            counts[labels[i]] += 1;
            for (s, x) in sums[labels[i]].iter_mut().zip(row.iter()) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = Some(sums[c].iter().map(|s| s / counts[c] as f64).collect());
            }
        }
        for c in 0..k {
            if counts[c] == 0 && centroids[c].is_some() {
                // drop and reseed at the worst-fit point
                let far = (0..n)
                    .map(|i| (i, sq_dist(rows[i], centroids[labels[i]].as_ref().unwrap())))
                    .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                centroids[c] = (far.1 > 0.0).then(|| rows[far.0].to_vec());
                if far.1 > 0.0 {
                    counts[c] = 1;
                    counts[labels[far.0]] -= 1;
                }
            }
        }
    }
    let wcss = *trace.last().unwrap();
    KmeansFit {
        labels,
        centroids: centroids.into_iter().map(|c| c.unwrap_or_else(|| vec![f64::NAN; dim])).collect(),
        wcss,
        trace,
        start,
    }
}

/// K-means on node features; categorical columns are one-hot encoded first.
pub fn kmeans(features: &FeatureTable, k: usize, n_starts: usize, seed: u64) -> Result<Partition> {
    let design = features.one_hot();
    let points: Vec<f64> = (0..design.n()).flat_map(|i| design.row(i).to_vec()).collect();
    let fit = lloyd(&points, design.p(), k, n_starts, seed)?;
    Partition::new(fit.labels, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cluster_is_grand_mean() {
        let pts = [1.0, 2.0, 3.0, 6.0];
        let f = lloyd(&pts, 1, 1, 3, 0).unwrap();
        assert_eq!(f.labels, vec![0; 4]);
        assert!((f.centroids[0][0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn duplicate_rows_are_recovered_exactly() {
        let mut pts = Vec::new();
        for i in 0..30 {
            pts.extend_from_slice(if i % 3 == 0 { &[0.0, 0.0] } else if i % 3 == 1 { &[5.0, 1.0] } else { &[-3.0, 4.0] });
        }
        let f = lloyd(&pts, 2, 3, 10, 9).unwrap();
        assert_eq!(f.wcss, 0.0);
        for i in 0..30 {
            assert_eq!(f.labels[i], f.labels[i % 3]);
        }
    }

    #[test]
    fn fewer_distinct_rows_than_k() {
        let pts = [1.0, 1.0, 2.0, 2.0];
        let f = lloyd(&pts, 1, 3, 2, 0).unwrap();
        assert_eq!(f.wcss, 0.0);
        assert!(f.labels.iter().all(|&l| l < 3));
    }

    #[test]
    fn wcss_never_increases() {
        let mut rng = rng::seeded(5);
        use rand::Rng as _;
        let pts: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        for seed in 0..5 {
            let f = lloyd(&pts, 2, 4, 1, seed).unwrap();
            for w in f.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{:?}", f.trace);
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let pts: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64).collect();
        let a = lloyd(&pts, 2, 3, 10, 4).unwrap();
        let b = lloyd(&pts, 2, 3, 10, 4).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.wcss, b.wcss);
    }
}
