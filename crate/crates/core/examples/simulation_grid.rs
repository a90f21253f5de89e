//! Run the desk-scale simulation grid and write one heatmap CSV per method
//! plus a JSON summary.
//!
//! `cargo run --release --example simulation_grid -- [out_dir] [seed]`

use jcdc::harness::{emit_heatmap_data, run_grid, GridSpec};

fn main() -> jcdc::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = std::path::PathBuf::from(args.next().unwrap_or_else(|| "grid_out".into()));
    let seed = args.next().map_or(7, |s| s.parse().expect("seed must be an integer"));

    let result = run_grid(&GridSpec::desk(seed))?;
    for &method in &result.spec.methods {
        println!("{method}");
        print!("  mu\\r");
        for r in &result.spec.r_values {
            print!("  {r:>6}");
        }
        println!();
        for (mu, row) in result.spec.mu_values.iter().zip(result.mean_matrix(method).unwrap()) {
            print!("  {mu:<4}");
            for v in row {
                print!("  {:>6}", v.map_or("NA".into(), |v| format!("{v:.3}")));
            }
            println!();
        }
    }
    for path in emit_heatmap_data(&result, &out)? {
        println!("wrote {}", path.display());
    }
    let summary = out.join("summary.json");
    std::fs::write(&summary, serde_json::to_string_pretty(&result)?)?;
    println!("wrote {} ({:.1}s)", summary.display(), result.timing.wall_secs);
    Ok(())
}
