//! Graph-only spectral clustering and feature-only k-means on the same data.
//!
//! `cargo run --release --example baselines -- [r] [mu] [seed]`

use jcdc::baselines::{kmeans, spectral_clustering, SpectralConfig};
use jcdc::features::{generate_features, FeatureGenConfig};
use jcdc::metrics::{misclassification_distance, nmi};
use jcdc::{generate_dcsbm, SbmConfig};

fn main() -> jcdc::Result<()> {
    let mut args = std::env::args().skip(1);
    let r: f64 = args.next().map_or(0.3, |s| s.parse().expect("r must be a number"));
    let mu: f64 = args.next().map_or(1.0, |s| s.parse().expect("mu must be a number"));
    let seed: u64 = args.next().map_or(2, |s| s.parse().expect("seed must be an integer"));

    let (graph, truth) = generate_dcsbm(&SbmConfig::simulation(r, seed))?;
    let features = generate_features(&truth, &FeatureGenConfig { mu, n_noise: 1, seed: seed + 1 })?;
    let sc = spectral_clustering(&graph, &SpectralConfig { seed, ..SpectralConfig::default() })?;
    let km = kmeans(&features, 2, 10, seed)?;
    for (name, p) in [("spectral", &sc), ("k-means", &km)] {
        println!("{name:<9} NMI {:.3}  misclassified {:.3}", nmi(p, &truth)?, misclassification_distance(p, &truth)?);
    }
    Ok(())
}
