//! The sums a_n, b_n, c_n by recurrence, closed form and definition, and
//! the identities near n = p.
//!
//! `cargo run --example series_identities -- 13`

use motzkin::series::{check_identities, series_closed, series_def_bruteforce, series_recurrence};
use motzkin::Prime;

fn main() {
    let p = Prime::new(std::env::args().nth(1).map_or(13, |a| a.parse().expect("prime"))).expect("valid prime");
    println!("{:>4} {:>4} {:>6} {:>8}", "n", "a", "b", "c");
    for s in series_recurrence(18) {
        assert_eq!(s, series_closed(s.n));
        assert_eq!(s, series_def_bruteforce(s.n));
        println!("{:>4} {:>4} {:>6} {:>8}", s.n, s.a, s.b, s.c);
    }
    let rep = check_identities(p);
    println!("\nidentities at p = {p} (class {}):", rep.class6);
    for c in &rep.checks {
        println!("  {:<60} {:>8} vs {:>8}  {}", c.name, c.value.to_string(), c.expected.to_string(), if c.holds() { "ok" } else { "FALSIFIED" });
    }
}
