use proptest::prelude::*;

use jcdc::criterion::{decompose, jcdc_criterion, marginal_criterion, BetaSet, FitConfig};
use jcdc::features::{build_similarities, default_measures, generate_features, FeatureGenConfig, FeatureTable, SimilaritySet};
use jcdc::graph::{generate_dcsbm, Graph, SbmConfig};
use jcdc::metrics::{misclassification_distance, nmi, ConfusionMatrix};
use jcdc::optimizer::{
    community_objective, fit, optimize_betas, optimize_betas_cached, tabu_label_search, EdgeCache, SwitchState,
};
use jcdc::partition::Partition;
use jcdc::rng;

#[derive(Clone, Debug)]
struct Instance {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    k: usize,
    betas: Vec<Vec<f64>>,
    alpha: f64,
}

impl Instance {
    fn graph(&self) -> Graph {
        Graph::from_edges(self.n, self.edges.clone()).unwrap()
    }
    fn table(&self) -> FeatureTable {
        FeatureTable::from_rows(&self.features).unwrap()
    }
    fn sims(&self) -> SimilaritySet {
        let f = self.table();
        build_similarities(&f, &default_measures(&f)).unwrap()
    }
    fn partition(&self) -> Partition {
        Partition::new(self.labels.clone(), self.k).unwrap()
    }
    fn beta_set(&self) -> BetaSet {
        BetaSet::new(self.betas.clone()).unwrap()
    }
    fn config(&self, w_n: f64) -> FitConfig {
        FitConfig { k: self.k, alpha: self.alpha, w_n, ..FitConfig::default() }
    }
}

fn instance(max_n: usize, max_k: usize, p: usize) -> impl Strategy<Value = Instance> {
    (4..=max_n, 1..=max_k, any::<u64>(), 0.1f64..0.7, 0.2f64..1.0).prop_map(move |(n, k, seed, dens, alpha)| {
        let mut r = rng::seeded(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if r.random::<f64>() < dens {
                    edges.push((i, j, if r.random::<bool>() { 1.0 } else { r.random_range(0.5..2.0) }));
                }
            }
        }
        let features = (0..n).map(|_| (0..p).map(|_| r.random_range(-3.0..3.0)).collect()).collect();
        let labels = (0..n).map(|_| r.random_range(0..k)).collect();
        let betas = (0..k).map(|_| (0..p).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
        Instance { n, edges, features, labels, k, betas, alpha }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn similarities_symmetric_and_standardized(inst in instance(25, 1, 3)) {
        let s = inst.sims();
        let mut sums = vec![0.0; 3];
        let mut sq = vec![0.0; 3];
        let mut pairs = 0.0;
        for i in 0..inst.n {
            prop_assert_eq!(s.phi(i, i).len(), 3);
            for j in (i + 1)..inst.n {
                prop_assert_eq!(s.phi(i, j), s.phi(j, i));
                for (l, v) in s.phi(i, j).into_iter().enumerate() {
                    sums[l] += v;
                    sq[l] += v * v;
                }
                pairs += 1.0;
            }
        }
        for l in 0..3 {
            prop_assert!((sums[l] / pairs).abs() < 1e-9);
            prop_assert!((sq[l] / pairs - 1.0).abs() < 1e-9);
        }
        let max_norm = (0..inst.n)
            .flat_map(|i| ((i + 1)..inst.n).map(move |j| (i, j)))
            .map(|(i, j)| s.phi(i, j).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        prop_assert!((s.m_phi() - max_norm).abs() < 1e-12);
    }

    #[test]
    fn criterion_is_affine_in_w(inst in instance(30, 3, 2), w1 in 1.01f64..20.0, w2 in 1.01f64..20.0) {
        let (g, s, e, b) = (inst.graph(), inst.sims(), inst.partition(), inst.beta_set());
        let diff = jcdc_criterion(&g, &s, &e, &b, &inst.config(w1)) - jcdc_criterion(&g, &s, &e, &b, &inst.config(w2));
        let m = marginal_criterion(&g, &e, inst.alpha);
        prop_assert!((diff - (w1 - w2) * m).abs() <= 1e-9 * (1.0 + m * (w1 - w2).abs()));
        let d = decompose(&g, &s, &e, &b, &inst.config(w1));
        prop_assert!((d.term_w - d.term_g - jcdc_criterion(&g, &s, &e, &b, &inst.config(w1))).abs() < 1e-9);
    }

    #[test]
    fn criterion_concave_along_lines(inst in instance(30, 2, 2), dir in prop::collection::vec(-1.0f64..1.0, 2), c in 0usize..2) {
        let (g, s, e) = (inst.graph(), inst.sims(), inst.partition());
        let c = c % inst.k;
        let cfg = inst.config(5.0);
        let f = |t: f64| {
            let mut rows = inst.betas.clone();
            for (b, d) in rows[c].iter_mut().zip(&dir) {
                *b += t * d;
            }
            jcdc_criterion(&g, &s, &e, &BetaSet::new(rows).unwrap(), &cfg)
        };
        let h = 0.1;
        let vals: Vec<f64> = (-10..=10).map(|i| f(i as f64 * h)).collect();
        for w in vals.windows(3) {
            let second = w[0] - 2.0 * w[1] + w[2];
            prop_assert!(second <= 1e-9 * (1.0 + w[1].abs()), "second difference {second}");
        }
    }

    #[test]
    fn criterion_permutation_equivariant(inst in instance(25, 3, 2), seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let mut perm: Vec<usize> = (0..inst.n).collect();
        for i in (1..inst.n).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        let g2 = inst.graph().permuted(&perm).unwrap();
        let f2 = inst.table().permuted(&perm);
        let s2 = build_similarities(&f2, &default_measures(&f2)).unwrap();
        let mut labels = vec![0; inst.n];
        for i in 0..inst.n {
            labels[perm[i]] = inst.labels[i];
        }
        let e2 = Partition::new(labels, inst.k).unwrap();
        let cfg = inst.config(5.0);
        let a = jcdc_criterion(&inst.graph(), &inst.sims(), &inst.partition(), &inst.beta_set(), &cfg);
        let b = jcdc_criterion(&g2, &s2, &e2, &inst.beta_set(), &cfg);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        let sigma: Vec<usize> = (0..inst.k).rev().collect();
        let relabeled = inst.partition().relabel(&sigma).unwrap();
        let c = jcdc_criterion(&inst.graph(), &inst.sims(), &relabeled, &inst.beta_set().permuted(&sigma), &cfg);
        prop_assert!((a - c).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn gradient_matches_central_differences(inst in instance(40, 2, 4)) {
        let (g, s, e, b) = (inst.graph(), inst.sims(), inst.partition(), inst.beta_set());
        let cache = EdgeCache::new(&g, &s);
        let cfg = inst.config(5.0);
        for c in 0..inst.k {
            let internal: Vec<usize> = cache.edges().iter().enumerate()
                .filter(|(_, &(u, v, _))| e.label(u) == c && e.label(v) == c).map(|(i, _)| i).collect();
            let (_, grad) = community_objective(&cache, &internal, e.sizes()[c], b.get(c), inst.alpha);
            for l in 0..4 {
                let at = |d: f64| {
                    let mut rows = inst.betas.clone();
                    rows[c][l] += d;
                    jcdc_criterion(&g, &s, &e, &BetaSet::new(rows).unwrap(), &cfg)
                };
                let fd = (at(1e-5) - at(-1e-5)) / 2e-5;
                prop_assert!((fd - grad[l]).abs() <= 1e-6 * grad[l].abs().max(1.0), "fd {fd} vs {}", grad[l]);
            }
        }
    }

    #[test]
    fn ascent_is_monotone_and_w_free(inst in instance(40, 3, 3)) {
        let (g, s, e) = (inst.graph(), inst.sims(), inst.partition());
        let cache = EdgeCache::new(&g, &s);
        let init = BetaSet::zeros(inst.k, 3);
        for rep in optimize_betas_cached(&cache, &e, &init, &inst.config(5.0)) {
            for w in rep.trace.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0));
            }
            prop_assert!(rep.beta.iter().map(|x| x * x).sum::<f64>().sqrt() <= 5.0 + 1e-9);
        }
        let a = optimize_betas(&g, &s, &e, &init, &inst.config(1.5));
        let b = optimize_betas(&g, &s, &e, &init, &inst.config(5.0));
        for (x, y) in a.as_rows().iter().flatten().zip(b.as_rows().iter().flatten()) {
            prop_assert!((x - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn tabu_output_is_valid(inst in instance(20, 3, 1), min_size in 1usize..4) {
        prop_assume!(inst.k * min_size <= inst.n);
        let cfg = FitConfig { min_community_size: min_size, ..inst.config(5.0) };
        let (g, s) = (inst.graph(), inst.sims());
        let b = inst.beta_set();
        let out = tabu_label_search(&g, &s, &inst.partition(), &b, &cfg).unwrap();
        prop_assert_eq!(out.n(), inst.n);
        prop_assert!(out.sizes().iter().all(|&x| x >= min_size));
        prop_assert!(out.labels().iter().all(|&l| l < inst.k));
    }

    #[test]
    fn switch_state_tracks_criterion(inst in instance(25, 3, 2), moves in prop::collection::vec((0usize..25, 0usize..3), 1..20)) {
        let (g, s, b) = (inst.graph(), inst.sims(), inst.beta_set());
        let cache = EdgeCache::new(&g, &s);
        let mut state = SwitchState::new(&cache, &inst.partition(), &b, 5.0);
        for (i, k) in moves {
            let (i, k) = (i % inst.n, k % inst.k);
            let before = state.criterion(inst.alpha);
            let gain = state.exact_preference(i, k, inst.alpha);
            state.apply_move(i, k);
            let after = jcdc_criterion(&g, &s, state.partition(), &b, &inst.config(5.0));
            prop_assert!((before + gain - after).abs() <= 1e-9 * (1.0 + after.abs()));
        }
    }

    #[test]
    fn nmi_and_distance_properties(n in 3usize..40, k in 2usize..5, seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let e = Partition::new((0..n).map(|_| r.random_range(0..k)).collect(), k).unwrap();
        let c = Partition::new((0..n).map(|_| r.random_range(0..k)).collect(), k).unwrap();
        let a = nmi(&e, &c).unwrap();
        prop_assert!((a - nmi(&c, &e).unwrap()).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
        let d = misclassification_distance(&e, &c).unwrap();
        let u = ConfusionMatrix::from_partitions(&e, &c).unwrap();
        prop_assert!((2.0 * d - u.min_l1_to_permuted_diagonal()).abs() < 1e-12);
        prop_assert!((0.0..=1.0 - 1.0 / k as f64 + 1e-12).contains(&d));
    }
}

#[test]
fn approximate_preference_sign_agreement() {
    let mut r = rng::seeded(31);
    let (mut agree, mut total) = (0usize, 0usize);
    for _ in 0..40 {
        let k = r.random_range(2..4);
        let sizes: Vec<usize> = (0..k).map(|_| r.random_range(20..40)).collect();
        let sbm = SbmConfig::planted(sizes.clone(), r.random_range(0.1..0.3), r.random_range(0.2..0.8), r.random());
        let (g, truth) = generate_dcsbm(&sbm).unwrap();
        let f = generate_features(&truth, &FeatureGenConfig { mu: 1.0, n_noise: 1, seed: r.random() }).unwrap();
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        let cache = EdgeCache::new(&g, &s);
        let betas = BetaSet::new((0..k).map(|_| vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]).collect()).unwrap();
        let alpha = 1.0;
        let state = SwitchState::new(&cache, &truth, &betas, 5.0);
        for _ in 0..50 {
            let i = r.random_range(0..g.n());
            let l = truth.label(i);
            let target = (l + r.random_range(1..k)) % k;
            let ex = state.exact_preference(i, target, alpha);
            let ap = state.approx_preference(i, target, alpha);
            total += 1;
            if (ex > 0.0) == (ap > 0.0) {
                agree += 1;
            }
        }
    }
    let rate = agree as f64 / total as f64;
    assert!(rate >= 0.95, "sign agreement {rate}");
}

#[test]
fn beta_matches_grid_search() {
    let mut r = rng::seeded(41);
    for _ in 0..5 {
        let (g, truth) = generate_dcsbm(&SbmConfig::planted(vec![20, 15], 0.3, 0.3, r.random())).unwrap();
        let f = generate_features(&truth, &FeatureGenConfig { mu: r.random_range(0.0..2.0), n_noise: 1, seed: r.random() }).unwrap();
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        let cfg = FitConfig::default();
        let cache = EdgeCache::new(&g, &s);
        let fitted = optimize_betas(&g, &s, &truth, &BetaSet::zeros(2, 2), &cfg);
        for c in 0..2 {
            let internal: Vec<usize> = cache.edges().iter().enumerate()
                .filter(|(_, &(u, v, _))| truth.label(u) == c && truth.label(v) == c).map(|(i, _)| i).collect();
            let size = truth.sizes()[c];
            let obj = |b: &[f64]| community_objective(&cache, &internal, size, b, 1.0).0 - cfg.lambda * b.iter().map(|x| x.abs()).sum::<f64>();
            let mut best = f64::NEG_INFINITY;
            let steps = 200;
            for a in 0..=steps {
                for bb in 0..=steps {
                    let b = [-5.0 + 10.0 * a as f64 / steps as f64, -5.0 + 10.0 * bb as f64 / steps as f64];
                    if b[0] * b[0] + b[1] * b[1] <= 25.0 {
                        best = best.max(obj(&b));
                    }
                }
            }
            let got = obj(fitted.get(c));
            assert!(got >= best - 1e-2 && got <= best + 1e-2, "community {c}: ascent {got} vs grid {best}");
        }
    }
}

#[test]
fn beta_clamps_at_ball_when_all_similarities_positive() {
    // two cliques; features identical inside each clique, far apart across
    let mut edges = Vec::new();
    for base in [0, 5] {
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((base + i, base + j, 1.0));
            }
        }
    }
    let g = Graph::from_edges(10, edges).unwrap();
    let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![if i < 5 { 0.0 } else { 10.0 }]).collect();
    let f = FeatureTable::from_rows(&rows).unwrap();
    let s = build_similarities(&f, &default_measures(&f)).unwrap();
    assert!(s.phi(0, 1)[0] > 0.0);
    let truth = Partition::from_sizes(&[5, 5]).unwrap();
    let b = optimize_betas(&g, &s, &truth, &BetaSet::zeros(2, 1), &FitConfig::default());
    for c in 0..2 {
        assert!((b.get(c)[0] - 5.0).abs() < 1e-9, "beta {:?}", b.get(c));
    }
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &t in &idx[i..=j] {
            out[t] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn coefficients_track_within_community_similarity() {
    let mut r = rng::seeded(51);
    let (mut betas, mut means) = (Vec::new(), Vec::new());
    for _ in 0..50 {
        let sbm = SbmConfig::planted(vec![40, 30], 0.2, 0.3, r.random());
        let (g, truth) = generate_dcsbm(&sbm).unwrap();
        let f = generate_features(&truth, &FeatureGenConfig { mu: r.random_range(0.0..2.0), n_noise: 1, seed: r.random() }).unwrap();
        let cfg = FitConfig { seed: r.random(), ..FitConfig::default() };
        let res = fit(&g, &f, &default_measures(&f), &cfg).unwrap();
        let s = build_similarities(&f, &default_measures(&f)).unwrap();
        for c in 0..2 {
            for l in 0..2 {
                let vals: Vec<f64> = g.edges()
                    .filter(|&(u, v, _)| res.partition.label(u) == c && res.partition.label(v) == c)
                    .map(|(u, v, _)| s.phi(u, v)[l])
                    .collect();
                if vals.is_empty() {
                    continue;
                }
                betas.push(res.betas.get(c)[l]);
                means.push(vals.iter().sum::<f64>() / vals.len() as f64);
            }
        }
    }
    let rho = pearson(&ranks(&betas), &ranks(&means));
    let n = betas.len() as f64;
    let t = rho * ((n - 2.0) / (1.0 - rho * rho)).sqrt();
    assert!(t > 1.645, "spearman {rho} (t = {t}, n = {n})");
}

#[test]
fn fit_traces_are_nondecreasing() {
    let mut r = rng::seeded(61);
    for _ in 0..50 {
        let sbm = SbmConfig::planted(vec![20, 20], 0.3, r.random_range(0.2..0.8), r.random());
        let (g, truth) = generate_dcsbm(&sbm).unwrap();
        let f = generate_features(&truth, &FeatureGenConfig { mu: r.random_range(0.0..2.0), n_noise: 1, seed: r.random() }).unwrap();
        let res = fit(&g, &f, &default_measures(&f), &FitConfig { seed: r.random(), ..FitConfig::default() }).unwrap();
        for w in res.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0), "trace {:?}", res.trace);
        }
    }
}
