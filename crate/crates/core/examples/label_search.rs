//! Tabu label search on a small graph, checked against exhaustive enumeration.
//!
//! `cargo run --release --example label_search -- [seed]`

use jcdc::features::{build_similarities, default_measures, FeatureTable};
use jcdc::optimizer::{exhaustive_oracle, tabu_label_search};
use jcdc::{jcdc_criterion, BetaSet, FitConfig, Graph, Partition};
use rand::Rng;

fn main() -> jcdc::Result<()> {
    let seed: u64 = std::env::args().nth(1).map_or(5, |s| s.parse().expect("seed must be an integer"));
    let n = 10;
    let mut rng = jcdc::rng::seeded(seed);
    let edges: Vec<(usize, usize, f64)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.random_bool(0.4)).map(|(i, j)| (i, j, 1.0)).collect();
    let graph = Graph::from_edges(n, edges)?;
    let table = FeatureTable::from_rows(&(0..n).map(|i| vec![i as f64]).collect::<Vec<_>>())?;
    let sims = build_similarities(&table, &default_measures(&table))?;
    let config = FitConfig { seed, ..FitConfig::default() };
    let betas = BetaSet::zeros(2, 1);

    let init = Partition::new((0..n).map(|i| i % 2).collect(), 2)?;
    let found = tabu_label_search(&graph, &sims, &init, &betas, &config)?;
    let (best, best_value) = exhaustive_oracle(&graph, &sims, &betas, &config, 16)?;
    let value = jcdc_criterion(&graph, &sims, &found, &betas, &config);
    println!("tabu:       {:?}  value {value:.6}", found.labels());
    println!("exhaustive: {:?}  value {best_value:.6}", best.labels());
    println!("gap: {:.2e}", best_value - value);
    Ok(())
}
