//! Builds the automaton for a prime and prints its states and transitions.
//!
//! `cargo run --example build_automaton -- 7`

use motzkin::{Automaton, Prime};

fn main() {
    let p: u64 = std::env::args().nth(1).map_or(7, |a| a.parse().expect("prime"));
    let p = Prime::new(p).unwrap_or_else(|e| panic!("{e}"));
    let m = Automaton::build(p);
    println!("p = {p} (class {}), {} states, {} constant", p.class6(), m.states().len(), m.constant_count());
    println!("state bound: {}", m.state_bound());
    for s in m.states() {
        let row: Vec<String> = m.delta()[s.id as usize].iter().map(u32::to_string).collect();
        let tag = if s.is_loop { " (loop)" } else { "" };
        println!("{:>3}  value {:>3}  {:<32} -> [{}]{tag}", s.id, s.value, s.poly.display(p).to_string(), row.join(" "));
    }
}
