//! Draw a degree-corrected block model graph and report its degree profile.
//!
//! `cargo run --example generate_dcsbm -- [r] [seed]`

use jcdc::graph::{expected_degree, generate_dcsbm, SbmConfig};

fn main() -> jcdc::Result<()> {
    let mut args = std::env::args().skip(1);
    let r: f64 = args.next().map_or(0.3, |s| s.parse().expect("r must be a number"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed must be an integer"));

    let config = SbmConfig::simulation(r, seed);
    let (graph, truth) = generate_dcsbm(&config)?;
    let expected = expected_degree(&config)?;
    let degrees = graph.degrees();
    println!("n = {}, edges = {}, community sizes = {:?}", graph.n(), graph.edge_count(), truth.sizes());
    println!(
        "mean degree: observed {:.2}, expected {:.2}",
        degrees.iter().sum::<f64>() / graph.n() as f64,
        expected.iter().sum::<f64>() / graph.n() as f64
    );
    let within = graph.edges().filter(|&(i, j, _)| truth.label(i) == truth.label(j)).count();
    println!("within-community edges: {within} of {}", graph.edge_count());
    Ok(())
}
