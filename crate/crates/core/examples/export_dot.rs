//! Writes the state diagram in Graphviz format.
//!
//! `cargo run --example export_dot -- 7 collapse | dot -Tsvg > m7.svg`

use motzkin::{Automaton, DotOptions, Prime};

fn main() {
    let mut args = std::env::args().skip(1);
    let p = Prime::new(args.next().map_or(7, |a| a.parse().expect("prime"))).expect("valid prime");
    let collapse = args.next().is_some_and(|a| a == "collapse");
    let m = Automaton::build(p);
    print!("{}", m.to_dot(DotOptions { collapse_constant_states: collapse }));
}
