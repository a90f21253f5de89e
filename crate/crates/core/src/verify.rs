//! Numerical checks of the consistency theory: assumptions, the maximizer of
//! `g(U)`, the gap between the population and expected criteria, and the
//! concentration trend of the observed criterion.

use rand::Rng as _;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::BetaSet;
use crate::error::Result;
use crate::graph::{generate_dcsbm, SbmConfig};
use crate::metrics::theory::for_each_permutation;
use crate::metrics::{
    check_conditions, g_functional, concentration_deviation, population_gap, sample_feasible_confusion, BlockModelSpec,
    ConditionReport, ConfusionMatrix, UniformPairModel,
};
use crate::partition::Partition;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Out/in ratio of the two-block model used for the condition checks and trend.
    pub r: f64,
    pub within_prob: f64,
    pub w_n: f64,
    pub alpha: f64,
    pub m_phi: f64,
    pub m_beta: f64,
    pub g_configs: usize,
    pub g_samples: usize,
    pub gap_instances: usize,
    pub mc_samples: usize,
    pub trend_sizes: Vec<usize>,
    pub trend_reps: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            r: 0.25,
            within_prob: 0.1,
            w_n: 5.0,
            alpha: 1.0,
            m_phi: 1.0,
            m_beta: 1.5,
            g_configs: 20,
            g_samples: 10_000,
            gap_instances: 5,
            mc_samples: 2_000,
            trend_sizes: vec![60, 120, 240],
            trend_reps: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub conditions: ConditionReport,
    pub g_search: GSearchOutcome,
    pub gaps: Vec<GapCheck>,
    pub trend: TrendOutcome,
    pub items: Vec<VerifyItem>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.items.iter().filter(|i| !i.passed).map(|i| i.name.as_str()).collect()
    }
}

/// Two-block model with proportions 2/3 and 1/3.
pub fn reference_spec(within_prob: f64, r: f64) -> BlockModelSpec {
    BlockModelSpec::two_block(within_prob, r, [2.0 / 3.0, 1.0 / 3.0])
}

/// One random search instance for the maximizer of `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSearchCase {
    pub spec: BlockModelSpec,
    pub alpha: f64,
    pub g_d: f64,
    pub best_sampled: f64,
    /// Max over all row permutations of `D` of `|g(D O) - g(D)|`.
    pub alignment_spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSearchOutcome {
    pub cases: Vec<GSearchCase>,
    /// Largest `g(U) - g(D)` over all cases and samples.
    pub worst_excess: f64,
}

impl GSearchOutcome {
    pub fn passed(&self, tol: f64) -> bool {
        self.worst_excess <= tol && self.cases.iter().all(|c| c.alignment_spread <= tol)
    }
}

/// Random block model with `K` in 2..=4 satisfying the assortativity
/// condition, and `alpha` drawn from its admissible range.
pub fn random_assortative_spec(rng: &mut rng::Rng) -> (BlockModelSpec, f64) {
    let k = rng.random_range(2..=4usize);
    let diag: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..0.9)).collect();
    let mut p = vec![vec![0.0; k]; k];
    for a in 0..k {
        p[a][a] = diag[a];
        for b in (a + 1)..k {
            let cap = diag[a].min(diag[b]) / (2.0 * (k as f64 - 1.0));
            let v = cap * rng.random_range(0.0..0.95);
            p[a][b] = v;
            p[b][a] = v;
        }
    }
    let raw: Vec<f64> = (0..k).map(|_| { let x: f64 = Exp1.sample(rng); 0.5 + x }).collect();
    let tot: f64 = raw.iter().sum();
    let pi: Vec<f64> = raw.iter().map(|x| x / tot).collect();
    let pi0 = pi.iter().copied().fold(f64::INFINITY, f64::min);
    let spec = BlockModelSpec { p, pi, rho: 1.0, pi0 };
    let lo = spec.alpha_lower_bound();
    let alpha = lo + (1.0 - lo) * rng.random::<f64>();
    (spec, alpha)
}

/// Random search for a feasible `U` beating `g(D)`.
pub fn g_maximizer_search(configs: usize, samples: usize, seed: u64) -> GSearchOutcome {
    let cases: Vec<GSearchCase> = (0..configs)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::substream(seed, c as u64);
            let (spec, alpha) = random_assortative_spec(&mut rng);
            let g_d = g_functional(&ConfusionMatrix::diagonal(&spec.pi), &spec.p, alpha);
            let mut best = f64::NEG_INFINITY;
            for _ in 0..samples {
                let u = sample_feasible_confusion(&spec.pi, &mut rng);
                best = best.max(g_functional(&u, &spec.p, alpha));
            }
            let mut spread = 0.0f64;
            for_each_permutation(spec.k(), &mut |sigma| {
                let u = ConfusionMatrix::permuted_diagonal(&spec.pi, sigma);
                spread = spread.max((g_functional(&u, &spec.p, alpha) - g_d).abs());
            });
            GSearchCase { spec, alpha, g_d, best_sampled: best, alignment_spread: spread }
        })
        .collect();
    let worst_excess = cases.iter().map(|c| c.best_sampled - c.g_d).fold(f64::NEG_INFINITY, f64::max);
    GSearchOutcome { cases, worst_excess }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub n: usize,
    pub misclassified: usize,
    pub gap: f64,
    pub bound: f64,
    pub std_error: f64,
}

impl GapCheck {
    pub fn passed(&self) -> bool {
        self.gap <= self.bound + 3.0 * self.std_error
    }
}

/// Population criterion versus `g(U)` on perturbed labelings with random
/// coefficients inside the `m_beta` ball.
pub fn gap_spot_checks(cfg: &VerifyConfig) -> Result<Vec<GapCheck>> {
    let spec = reference_spec(cfg.within_prob, cfg.r);
    let dim = 2;
    let half = cfg.m_phi / (dim as f64).sqrt();
    let model = UniformPairModel { dim, within: (0.0, half), across: (-half, 0.0) };
    (0..cfg.gap_instances)
        .map(|i| {
            let mut r = rng::substream(rng::child_seed(cfg.seed, &[2]), i as u64);
            let n = 30 * (i + 1);
            let c = Partition::from_sizes(&[2 * n / 3, n - 2 * n / 3])?;
            let flip_rate = 0.3 * r.random::<f64>();
            let mut labels = c.labels().to_vec();
            let mut misclassified = 0;
            for l in labels.iter_mut() {
                if r.random::<f64>() < flip_rate {
                    *l = 1 - *l;
                    misclassified += 1;
                }
            }
            let e = Partition::new(labels, 2)?;
            let rows = (0..2)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                    let radius = cfg.m_beta * r.random::<f64>();
                    v.iter().map(|x| x * radius / norm).collect()
                })
                .collect();
            let betas = BetaSet::new(rows)?;
            let g = population_gap(&e, &c, &betas, &spec, &model, cfg.w_n, cfg.alpha, cfg.mc_samples, r.random())?;
            Ok(GapCheck { n, misclassified, gap: g.gap, bound: g.bound, std_error: g.std_error })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendOutcome {
    pub sizes: Vec<usize>,
    pub medians: Vec<f64>,
    pub deviations: Vec<Vec<f64>>,
}

impl TrendOutcome {
    pub fn strictly_decreasing(&self) -> bool {
        self.medians.windows(2).all(|w| w[1] < w[0])
    }
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Median deviation of the scaled observed criterion at the true labels from
/// `g(D)`, for block-model graphs of increasing size with proportions 2/3, 1/3.
pub fn concentration_trend(cfg: &VerifyConfig) -> Result<TrendOutcome> {
    let spec = reference_spec(cfg.within_prob, cfg.r);
    let mut deviations = Vec::new();
    for (si, &n) in cfg.trend_sizes.iter().enumerate() {
        let sizes = vec![2 * n / 3, n - 2 * n / 3];
        let devs = (0..cfg.trend_reps)
            .into_par_iter()
            .map(|rep| {
                let seed = rng::child_seed(cfg.seed, &[3, si as u64, rep as u64]);
                let sbm = SbmConfig::planted(sizes.clone(), cfg.within_prob, cfg.r, seed);
                let (graph, truth) = generate_dcsbm(&sbm)?;
                Ok(concentration_deviation(&graph, &truth, &spec, cfg.w_n, cfg.alpha))
            })
            .collect::<Result<Vec<f64>>>()?;
        deviations.push(devs);
    }
    let medians = deviations.iter().map(|d| median(d)).collect();
    Ok(TrendOutcome { sizes: cfg.trend_sizes.clone(), medians, deviations })
}

/// Run the full suite.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let spec = reference_spec(cfg.within_prob, cfg.r);
    spec.validate()?;
    let conditions = check_conditions(&spec, cfg.m_phi, cfg.m_beta, cfg.w_n, cfg.alpha);
    let mut items: Vec<VerifyItem> = conditions
        .checks
        .iter()
        .map(|c| VerifyItem {
            name: format!("condition:{}", c.name),
            passed: c.status.ok(),
            detail: format!("{:?}: {}", c.status, c.detail),
        })
        .collect();
    items.push(VerifyItem {
        name: "condition:alpha_interval".into(),
        passed: true,
        detail: format!("admissible alpha in [{:.4}, {:.4}]", conditions.alpha_range.0, conditions.alpha_range.1),
    });

    let g_search = g_maximizer_search(cfg.g_configs, cfg.g_samples, rng::child_seed(cfg.seed, &[1]));
    items.push(VerifyItem {
        name: "g_maximizer".into(),
        passed: g_search.passed(1e-12),
        detail: format!(
            "{} configs x {} samples; max g(U) - g(D) = {:.3e}; permutation alignments reach g(D)",
            cfg.g_configs, cfg.g_samples, g_search.worst_excess
        ),
    });

    let gaps = gap_spot_checks(cfg)?;
    for g in &gaps {
        items.push(VerifyItem {
            name: format!("population_gap:n={}", g.n),
            passed: g.passed(),
            detail: format!("gap {:.4e} (se {:.1e}) vs bound {:.4e}", g.gap, g.std_error, g.bound),
        });
    }

    let trend = concentration_trend(cfg)?;
    let medians: Vec<String> =
        trend.sizes.iter().zip(&trend.medians).map(|(n, m)| format!("n={n}: {m:.6}")).collect();
    items.push(VerifyItem {
        name: "concentration_trend".into(),
        passed: trend.strictly_decreasing(),
        detail: format!("median deviation {}", medians.join(", ")),
    });
    Ok(VerifyReport { conditions, g_search, gaps, trend, items })
}
