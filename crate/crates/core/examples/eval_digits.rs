//! Walks the automaton digit by digit and compares with the brute-force
//! table.
//!
//! `cargo run --example eval_digits -- 7 15`

use motzkin::{Automaton, DigitString, MotzkinTable, Prime};

fn main() {
    let mut args = std::env::args().skip(1);
    let p = Prime::new(args.next().map_or(7, |a| a.parse().expect("prime"))).expect("valid prime");
    let n: u64 = args.next().map_or(15, |a| a.parse().expect("n"));
    let m = Automaton::build(p);
    let digits = DigitString::new(n, p);
    println!("n = {n}, base-{p} digits (least significant first): {:?}", digits.digits());
    let mut state = 0;
    for &d in digits.digits() {
        let next = m.transition(state, d);
        println!("  {} --{d}--> {}", m.state(state).poly.display(p), m.state(next).poly.display(p));
        state = next;
    }
    let value = m.eval(n);
    println!("M_{n} mod {p} = {value}");
    if n <= 100_000 {
        let oracle = MotzkinTable::convolution(p, n);
        println!("oracle agrees: {}", oracle.get(n) == Some(value.residue()));
    }
}
