use serde::{Deserialize, Serialize};

use super::assignment::max_weight_assignment;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Denominator used to normalize mutual information.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NmiNormalization {
    /// `sqrt(H(e) H(c))`
    #[default]
    Sqrt,
    /// `(H(e) + H(c)) / 2`
    Mean,
    /// `max(H(e), H(c))`
    Max,
}

fn check_len(e: &Partition, c: &Partition) -> Result<usize> {
    if e.n() != c.n() {
        return Err(Error::Dimension(format!("partitions have {} and {} nodes", e.n(), c.n())));
    }
    Ok(e.n())
}

/// `counts[a][b] = |{i : e_i = a, c_i = b}|` on a square `K x K` grid.
fn contingency(e: &Partition, c: &Partition) -> Vec<Vec<usize>> {
    let k = e.k().max(c.k());
    let mut counts = vec![vec![0usize; k]; k];
    for (&a, &b) in e.labels().iter().zip(c.labels()) {
        counts[a][b] += 1;
    }
    counts
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&x| x > 0)
        .map(|x| {
            let q = x as f64 / n;
            -q * q.ln()
        })
        .sum()
}

/// Normalized mutual information with `sqrt` normalization.
pub fn nmi(e: &Partition, c: &Partition) -> Result<f64> {
    nmi_with(e, c, NmiNormalization::Sqrt)
}

/// Normalized mutual information. Two single-cluster partitions score 1;
/// a single-cluster partition against a nontrivial one scores 0.
pub fn nmi_with(e: &Partition, c: &Partition, norm: NmiNormalization) -> Result<f64> {
    let n = check_len(e, c)?;
    if n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let table = contingency(e, c);
    let k = table.len();
    let rows: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<usize> = (0..k).map(|b| table.iter().map(|r| r[b]).sum()).collect();
    let (he, hc) = (entropy(rows.iter().copied(), nf), entropy(cols.iter().copied(), nf));
    if he == 0.0 && hc == 0.0 {
        return Ok(1.0);
    }
    if he == 0.0 || hc == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for a in 0..k {
        for b in 0..k {
            let x = table[a][b];
            if x > 0 {
                let pab = x as f64 / nf;
                mi += pab * (pab * nf * nf / (rows[a] as f64 * cols[b] as f64)).ln();
            }
        }
    }
    let denom = match norm {
        NmiNormalization::Sqrt => (he * hc).sqrt(),
        NmiNormalization::Mean => 0.5 * (he + hc),
        NmiNormalization::Max => he.max(hc),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}

fn best_agreement_exhaustive(table: &[Vec<usize>]) -> usize {
    fn rec(t: &[Vec<usize>], row: usize, used: &mut [bool]) -> usize {
        if row == t.len() {
            return 0;
        }
        let mut best = 0;
        for col in 0..t.len() {
            if !used[col] {
                used[col] = true;
                best = best.max(t[row][col] + rec(t, row + 1, used));
                used[col] = false;
            }
        }
        best
    }
    rec(table, 0, &mut vec![false; table.len()])
}

/// Smallest fraction of misassigned nodes over all relabelings of `e`.
///
/// Label counts are padded to a common `K`. Permutations are enumerated for
/// `K <= 8`; above that an optimal assignment is solved.
pub fn misclassification_distance(e: &Partition, c: &Partition) -> Result<f64> {
    let n = check_len(e, c)?;
    if n == 0 {
        return Ok(0.0);
    }
    let table = contingency(e, c);
    let agree = if table.len() <= 8 {
        best_agreement_exhaustive(&table)
    } else {
        let w: Vec<Vec<f64>> = table.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        max_weight_assignment(&w).iter().enumerate().map(|(a, &b)| table[a][b]).sum()
    };
    Ok((n - agree) as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(labels: &[usize], k: usize) -> Partition {
        Partition::new(labels.to_vec(), k).unwrap()
    }

    #[test]
    fn nmi_basic_values() {
        let c = part(&[0, 0, 1, 1, 2, 2], 3);
        assert!((nmi(&c, &c).unwrap() - 1.0).abs() < 1e-12);
        let relabeled = part(&[2, 2, 0, 0, 1, 1], 3);
        assert!((nmi(&relabeled, &c).unwrap() - 1.0).abs() < 1e-12);
        let constant = part(&[0; 6], 1);
        let balanced = part(&[0, 0, 0, 1, 1, 1], 2);
        assert_eq!(nmi(&constant, &balanced).unwrap(), 0.0);
        assert_eq!(nmi(&constant, &constant).unwrap(), 1.0);
    }

    #[test]
    fn nmi_hand_value() {
        // e = (0,0,1,1), c = (0,0,0,1): H(e)=ln2, H(c)=H(3/4),
        // MI = H(c) - H(c|e) = H(3/4) - ln2/2
        let e = part(&[0, 0, 1, 1], 2);
        let c = part(&[0, 0, 0, 1], 2);
        let h = |q: f64| -q * q.ln() - (1.0 - q) * (1.0 - q).ln();
        let mi = h(0.75) - 0.5 * 2f64.ln();
        let want = mi / (2f64.ln() * h(0.75)).sqrt();
        assert!((nmi(&e, &c).unwrap() - want).abs() < 1e-12);
        let mean = mi / (0.5 * (2f64.ln() + h(0.75)));
        assert!((nmi_with(&e, &c, NmiNormalization::Mean).unwrap() - mean).abs() < 1e-12);
        let max = mi / 2f64.ln();
        assert!((nmi_with(&e, &c, NmiNormalization::Max).unwrap() - max).abs() < 1e-12);
    }

    #[test]
    fn distance_values() {
        let c = part(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1], 2);
        assert_eq!(misclassification_distance(&c, &c).unwrap(), 0.0);
        let flipped = part(&[1, 1, 1, 1, 1, 0, 0, 0, 0, 1], 2);
        assert!((misclassification_distance(&flipped, &c).unwrap() - 0.1).abs() < 1e-15);
        assert!(misclassification_distance(&part(&[0], 1), &c).is_err());
    }

    #[test]
    fn assignment_route_matches_enumeration() {
        // K = 9 goes through the assignment solver; compare against the
        // enumeration route on the same contingency table.
        use crate::rng;
        use rand::Rng as _;
        let mut r = rng::seeded(8);
        for _ in 0..5 {
            let e = part(&(0..60).map(|_| r.random_range(0..9)).collect::<Vec<_>>(), 9);
            let c = part(&(0..60).map(|_| r.random_range(0..9)).collect::<Vec<_>>(), 9);
            let via_assignment = misclassification_distance(&e, &c).unwrap();
            let table = contingency(&e, &c);
            let exhaustive = (60 - best_agreement_exhaustive(&table)) as f64 / 60.0;
            assert_eq!(via_assignment, exhaustive);
        }
    }
}
