//! Fit the joint criterion to a simulated attributed network and compare
//! with the planted labels.
//!
//! `cargo run --release --example fit_attributed_graph -- [r] [mu] [seed]`

use jcdc::features::{default_measures, generate_features, FeatureGenConfig};
use jcdc::metrics::nmi;
use jcdc::{fit, generate_dcsbm, FitConfig, SbmConfig};

fn main() -> jcdc::Result<()> {
    let mut args = std::env::args().skip(1);
    let r: f64 = args.next().map_or(0.45, |s| s.parse().expect("r must be a number"));
    let mu: f64 = args.next().map_or(1.25, |s| s.parse().expect("mu must be a number"));
    let seed: u64 = args.next().map_or(3, |s| s.parse().expect("seed must be an integer"));

    let (graph, truth) = generate_dcsbm(&SbmConfig::simulation(r, seed))?;
    let features = generate_features(&truth, &FeatureGenConfig { mu, n_noise: 1, seed: seed + 1 })?;
    let config = FitConfig { seed, ..FitConfig::default() };
    let result = fit(&graph, &features, &default_measures(&features), &config)?;

    println!("NMI vs truth: {:.3}", nmi(&result.partition, &truth)?);
    println!("criterion: {:.4}, outer iterations: {}, converged: {}", result.criterion, result.iterations, result.converged);
    for (k, beta) in result.betas.as_rows().iter().enumerate() {
        println!("beta_{k} = {beta:.3?}");
    }
    for w in &result.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
