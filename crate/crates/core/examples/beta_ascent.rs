//! Coefficient step with labels held fixed: the ascent result does not move
//! when the weight offset changes.
//!
//! `cargo run --release --example beta_ascent`

use jcdc::criterion::penalized_objective;
use jcdc::features::{build_similarities, default_measures, generate_features, FeatureGenConfig};
use jcdc::optimizer::optimize_betas;
use jcdc::{generate_dcsbm, BetaSet, FitConfig, SbmConfig};

fn main() -> jcdc::Result<()> {
    let (graph, truth) = generate_dcsbm(&SbmConfig::simulation(0.4, 11))?;
    let table = generate_features(&truth, &FeatureGenConfig { mu: 1.0, n_noise: 1, seed: 12 })?;
    let sims = build_similarities(&table, &default_measures(&table))?;
    let start = BetaSet::zeros(2, sims.p());

    for w_n in [2.0, 5.0, 15.0] {
        let config = FitConfig { w_n, ..FitConfig::default() };
        let betas = optimize_betas(&graph, &sims, &truth, &start, &config);
        println!(
            "w_n = {w_n:>4}: objective {:.4} -> {:.4}, beta = {:.4?}",
            penalized_objective(&graph, &sims, &truth, &start, &config),
            penalized_objective(&graph, &sims, &truth, &betas, &config),
            betas.as_rows()
        );
    }
    Ok(())
}
