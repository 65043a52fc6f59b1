//! Tabulates `c(p, d)`, the density-one digit and the forbidden residues
//! for a range of primes.
//!
//! `cargo run --example criterion_scan -- 100`

use motzkin::analysis::{density_one_criterion, forbidden_residues};
use motzkin::field::is_prime;
use motzkin::{Automaton, Binomials, Prime};

fn main() {
    let max: u64 = std::env::args().nth(1).map_or(100, |a| a.parse().expect("max prime"));
    println!("{:>5} {:>6} {:>6} {:>10} {:>10}", "p", "class", "digit", "forbidden", "generated");
    for v in (5..=max).filter(|&v| is_prime(v)) {
        let p = Prime::new(v).expect("prime");
        let b = Binomials::new(p);
        let m = Automaton::build(p);
        let rep = forbidden_residues(&m, &b);
        let digit = density_one_criterion(&b).map_or("-".into(), |d| d.to_string());
        println!("{v:>5} {:>6} {digit:>6} {:>10} {:>10}", p.class6().to_string(), rep.forbidden.len(), format!("{}/{}", rep.generated_order, v - 1));
    }
}
