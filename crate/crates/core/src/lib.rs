//! Finite automata computing Motzkin numbers modulo a prime `p >= 5`.
//!
//! The automaton is built by iterating Cartier operators on bivariate
//! polynomials over GF(p). Independent brute-force oracles, the auxiliary
//! `a_n, b_n, c_n` sums and structured-set density tools live alongside it.

pub mod analysis;
pub mod automaton;
pub mod bipoly;
pub mod cli;
pub mod field;
pub mod oracle;
pub mod series;

pub use automaton::{Automaton, DigitString, DotOptions};
pub use bipoly::{BiPoly, CartierKernel};
pub use field::{Binomials, Class6, FieldElement, Prime};
pub use oracle::MotzkinTable;
