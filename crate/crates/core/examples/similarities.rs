//! Turn a mixed-type feature table into standardized pairwise similarities.
//!
//! `cargo run --example similarities`

use jcdc::features::{build_similarities, default_measures, parse_feature_csv, parse_kinds};

const CSV: &str = "node_id,office,years,age\n0,Boston,3,31\n1,Boston,12,45\n2,Hartford,5,38\n3,Providence,20,57\n";

fn main() -> jcdc::Result<()> {
    let kinds = parse_kinds("cat,ord,cont")?;
    let table = parse_feature_csv(CSV.as_bytes(), Some(&kinds))?.expand_categorical();
    let measures = default_measures(&table);
    let sims = build_similarities(&table, &measures)?;
    println!("columns: {:?}", sims.names());
    println!("measures: {:?}", sims.measures());
    println!("M_phi = {:.3}", sims.m_phi());
    for i in 0..sims.n() {
        for j in i + 1..sims.n() {
            let phi: Vec<String> = sims.phi(i, j).iter().map(|v| format!("{v:+.2}")).collect();
            println!("phi({i},{j}) = [{}]", phi.join(", "));
        }
    }
    Ok(())
}
