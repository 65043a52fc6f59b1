//! Empirical densities of `M_n = 0 mod p` against the structural forms.
//!
//! `cargo run --release --example density_scan -- 1000000`

use motzkin::analysis::{empirical_density, table1_forms, total_density};
use motzkin::{Automaton, Prime};

fn main() {
    let limit: u64 = std::env::args().nth(1).map_or(1_000_000, |a| a.parse().expect("limit"));
    println!("{:>4} {:>10} {:>10} {:>12}  forms", "p", "count", "density", "reference");
    for v in [5, 7, 11, 13, 17, 19, 23, 29] {
        let p = Prime::new(v).expect("prime");
        let m = Automaton::build(p);
        let r = empirical_density(&m, 0, limit);
        let forms = table1_forms(p);
        println!(
            "{v:>4} {:>10} {:>10.6} {:>12.6}  {} ({}, total {})",
            r.count,
            r.density_f64(),
            r.reference_f64().unwrap_or(f64::NAN),
            r.kind,
            forms.len(),
            total_density(&forms)
        );
    }
}
