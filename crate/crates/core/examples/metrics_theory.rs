//! Population-level quantities on a two-block model: the condition checks,
//! the G functional over a few confusion matrices, and the verification suite.
//!
//! `cargo run --release --example metrics_theory`

use jcdc::metrics::{check_conditions, g_functional, sample_feasible_confusion, BlockModelSpec, ConfusionMatrix};
use jcdc::verify::{run_verify, VerifyConfig};

fn main() -> jcdc::Result<()> {
    let spec = BlockModelSpec::two_block(0.1, 0.25, [2.0 / 3.0, 1.0 / 3.0]);
    let report = check_conditions(&spec, 1.0, 1.5, 5.0, 1.0);
    for c in &report.checks {
        println!("{:<22} {:?}  {}", c.name, c.status, c.detail);
    }

    let truth = ConfusionMatrix::diagonal(&spec.pi);
    println!("G at the truth: {:.5}", g_functional(&truth, &spec.p, 1.0));
    let mut rng = jcdc::rng::seeded(1);
    for _ in 0..3 {
        let u = sample_feasible_confusion(&spec.pi, &mut rng);
        println!("G at a random confusion (l1 to nearest alignment {:.3}): {:.5}", u.min_l1_to_permuted_diagonal(), g_functional(&u, &spec.p, 1.0));
    }

    let verify = run_verify(&VerifyConfig::default())?;
    for item in &verify.items {
        println!("{} {}: {}", if item.passed { "PASS" } else { "FAIL" }, item.name, item.detail);
    }
    Ok(())
}
