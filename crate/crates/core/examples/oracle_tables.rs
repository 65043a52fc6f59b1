//! Brute-force residue tables: the convolution recurrence against the
//! binomial sum, plus a residue histogram.
//!
//! `cargo run --example oracle_tables -- 13 5000`

use motzkin::oracle::motzkin_binomial;
use motzkin::{Binomials, MotzkinTable, Prime};

fn main() {
    let mut args = std::env::args().skip(1);
    let p = Prime::new(args.next().map_or(13, |a| a.parse().expect("prime"))).expect("valid prime");
    let n_max: u64 = args.next().map_or(5000, |a| a.parse().expect("limit"));
    let table = MotzkinTable::convolution(p, n_max);
    let binoms = Binomials::new(p);
    let disagreements = (0..=n_max).filter(|&n| motzkin_binomial(&binoms, n).residue() != table.values()[n as usize]).count();
    println!("p = {p}, n <= {n_max}: {disagreements} disagreements between the two oracles");
    for (r, c) in table.counts().iter().enumerate() {
        println!("residue {r:>3}: {c}");
    }
}
