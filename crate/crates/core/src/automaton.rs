//! The `p`-automaton for `M_n mod p`.
//!
//! States are polynomials over GF(p). Starting from the initial polynomial,
//! the machine is closed under `s -> Λ_{d,d}(s * K^(p-1))` for every digit
//! `d`, where `K` is [`kernel_poly`](crate::bipoly::kernel_poly). Feeding the
//! base-`p` digits of `n >= 1`, least significant first, ends in a state
//! whose constant coefficient is `M_n mod p`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipoly::{initial_poly, BiPoly, CartierKernel, Term};
use crate::field::{Class6, FieldElement, FieldError, Prime};

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("malformed automaton document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid prime in automaton document: {0}")]
    Prime(#[from] FieldError),
    #[error("automaton has no states")]
    Empty,
    #[error("initial state must be 0, found {0}")]
    Initial(u64),
    #[error("state at position {index} has id {id}")]
    StateId { index: usize, id: u64 },
    #[error("state {id} has a non-canonical polynomial")]
    NonCanonical { id: usize },
    #[error("state {id} declares value {declared} but its polynomial evaluates to {actual}")]
    Value { id: usize, declared: u64, actual: u32 },
    #[error("states {first} and {second} have the same polynomial")]
    DuplicateState { first: usize, second: usize },
    #[error("expected {expected} transition rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("transition row {state} has {found} digits but p = {p}")]
    DigitWidth { state: usize, found: usize, p: u32 },
    #[error("transition ({state}, {digit}) targets {target}, but there are only {count} states")]
    Target { state: usize, digit: usize, target: u64, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub id: u32,
    pub poly: BiPoly,
    pub value: FieldElement,
    pub is_constant: bool,
    /// Every digit maps the state to itself.
    pub is_loop: bool,
}

/// Base-`p` digits of `n`, least significant first, with no high-order
/// zeros; `n = 0` has no digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitString {
    digits: Vec<u32>,
}

impl DigitString {
    pub fn new(n: u64, p: Prime) -> Self {
        DigitString { digits: p.digits(n) }
    }

    /// Returns `None` when a digit is `>= p` or the top digit is zero.
    pub fn from_digits(digits: Vec<u32>, p: Prime) -> Option<Self> {
        let ok = digits.iter().all(|&d| d < p.value()) && digits.last() != Some(&0);
        ok.then_some(DigitString { digits })
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn value(&self, p: Prime) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * p.value() as u64 + d as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    prime: Prime,
    states: Vec<State>,
    delta: Vec<Vec<u32>>,
}

impl Automaton {
    pub fn build(prime: Prime) -> Self {
        Self::build_with(&CartierKernel::new(prime))
    }

    /// Breadth-first closure from the initial polynomial. New states get
    /// ids in `(source id, digit)` order, so the numbering is reproducible.
    pub fn build_with(kernel: &CartierKernel) -> Self {
        let prime = kernel.prime();
        let mut polys = vec![initial_poly(prime)];
        let mut index: HashMap<BiPoly, u32> = HashMap::new();
        index.insert(polys[0].clone(), 0);
        let mut delta: Vec<Vec<u32>> = Vec::new();
        let mut next = 0;
        while next < polys.len() {
            let images = kernel.images(&polys[next]);
            let row = images
                .into_iter()
                .map(|t| {
                    *index.entry(t).or_insert_with_key(|t| {
                        polys.push(t.clone());
                        polys.len() as u32 - 1
                    })
                })
                .collect();
            delta.push(row);
            next += 1;
        }
        let states = polys
            .into_iter()
            .enumerate()
            .map(|(id, poly)| {
                let is_loop = delta[id].iter().all(|&t| t as usize == id);
                State {
                    id: id as u32,
                    value: poly.eval_origin(),
                    is_constant: poly.is_constant(),
                    is_loop,
                    poly,
                }
            })
            .collect();
        Automaton {
            prime,
            states,
            delta,
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, id: u32) -> &State {
        &self.states[id as usize]
    }

    pub fn delta(&self) -> &[Vec<u32>] {
        &self.delta
    }

    #[inline]
    pub fn transition(&self, state: u32, digit: u32) -> u32 {
        self.delta[state as usize][digit as usize]
    }

    pub fn find(&self, poly: &BiPoly) -> Option<u32> {
        self.states.iter().find(|s| &s.poly == poly).map(|s| s.id)
    }

    pub fn constant_state(&self, value: FieldElement) -> Option<u32> {
        self.find(&BiPoly::constant(value))
    }

    pub fn constant_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_constant).count()
    }

    /// Maximum state count for this prime's residue class mod 6.
    pub fn state_bound(&self) -> usize {
        let p = self.prime.value() as usize;
        match self.prime.class6() {
            Class6::PlusOne => p + 4,
            Class6::MinusOne => p + 6,
        }
    }

    /// `M_n mod p`. `n = 0` has no digits and is answered directly.
    pub fn eval(&self, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement::ONE;
        }
        let p = self.prime.value() as u64;
        let mut s = 0u32;
        let mut n = n;
        while n > 0 {
            s = self.delta[s as usize][(n % p) as usize];
            n /= p;
        }
        self.states[s as usize].value
    }

    /// Runs the machine over `digits` and returns the final state id.
    pub fn run(&self, digits: &DigitString) -> u32 {
        digits
            .digits()
            .iter()
            .fold(0, |s, &d| self.delta[s as usize][d as usize])
    }

    pub fn eval_digits(&self, digits: &DigitString) -> FieldElement {
        if digits.digits().is_empty() {
            return FieldElement::ONE;
        }
        self.states[self.run(digits) as usize].value
    }

    pub fn to_document(&self) -> AutomatonDocument {
        AutomatonDocument {
            p: self.prime.value() as u64,
            initial: 0,
            states: self
                .states
                .iter()
                .map(|s| StateDocument {
                    id: s.id as u64,
                    poly: s
                        .poly
                        .terms()
                        .iter()
                        .map(|t| [t.x_deg as u64, t.y_deg as u64, t.coeff.residue() as u64])
                        .collect(),
                    value: s.value.residue() as u64,
                })
                .collect(),
            delta: self
                .delta
                .iter()
                .map(|row| row.iter().map(|&t| t as u64).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("automaton documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, AutomatonError> {
        Self::from_document(serde_json::from_str(text)?)
    }

    pub fn from_document(doc: AutomatonDocument) -> Result<Self, AutomatonError> {
        let prime = Prime::new(doc.p)?;
        let q = prime.value();
        if doc.states.is_empty() {
            return Err(AutomatonError::Empty);
        }
        if doc.initial != 0 {
            return Err(AutomatonError::Initial(doc.initial));
        }
        let count = doc.states.len();
        if doc.delta.len() != count {
            return Err(AutomatonError::RowCount {
                expected: count,
                found: doc.delta.len(),
            });
        }
        let mut states = Vec::with_capacity(count);
        let mut seen: HashMap<BiPoly, usize> = HashMap::new();
        for (index, sd) in doc.states.into_iter().enumerate() {
            if sd.id != index as u64 {
                return Err(AutomatonError::StateId { index, id: sd.id });
            }
            let mut terms = Vec::with_capacity(sd.poly.len());
            for [x, y, c] in sd.poly {
                let (Ok(x_deg), Ok(y_deg), true) = (u32::try_from(x), u32::try_from(y), c < q as u64) else {
                    return Err(AutomatonError::NonCanonical { id: index });
                };
                terms.push(Term {
                    x_deg,
                    y_deg,
                    coeff: FieldElement::from_reduced(c as u32),
                });
            }
            let poly = BiPoly::from_canonical_terms(terms, prime).ok_or(AutomatonError::NonCanonical { id: index })?;
            let value = poly.eval_origin();
            if sd.value != value.residue() as u64 {
                return Err(AutomatonError::Value {
                    id: index,
                    declared: sd.value,
                    actual: value.residue(),
                });
            }
            if let Some(&first) = seen.get(&poly) {
                return Err(AutomatonError::DuplicateState { first, second: index });
            }
            seen.insert(poly.clone(), index);
            states.push(State {
                id: index as u32,
                is_constant: poly.is_constant(),
                is_loop: false,
                value,
                poly,
            });
        }
        let mut delta = Vec::with_capacity(count);
        for (state, row) in doc.delta.into_iter().enumerate() {
            if row.len() != q as usize {
                return Err(AutomatonError::DigitWidth {
                    state,
                    found: row.len(),
                    p: q,
                });
            }
            let mut out = Vec::with_capacity(row.len());
            for (digit, target) in row.into_iter().enumerate() {
                if target >= count as u64 {
                    return Err(AutomatonError::Target {
                        state,
                        digit,
                        target,
                        count,
                    });
                }
                out.push(target as u32);
            }
            delta.push(out);
        }
        for s in &mut states {
            s.is_loop = delta[s.id as usize].iter().all(|&t| t == s.id);
        }
        Ok(Automaton {
            prime,
            states,
            delta,
        })
    }

    /// Compares the machine with the published state and transition tables
    /// for its class of `p` mod 6. Cells marked as "some constant" only
    /// require the target to be a constant state.
    pub fn verify_tables(&self) -> Vec<TableMismatch> {
        let p = self.prime;
        let q = p.value();
        let named = NamedStates::new(p);
        let mut out = Vec::new();

        let expected_nonconstant: Vec<(&str, &BiPoly)> = match p.class6() {
            Class6::PlusOne => vec![
                ("s1", &named.s1),
                ("s2", &named.s2),
                ("-xy(y+1)", &named.neg),
                ("xy(y+1)+2", &named.pos_plus2),
            ],
            Class6::MinusOne => vec![
                ("s1", &named.s1),
                ("s2", &named.s2),
                ("-xy(y+1)-1", &named.neg_minus1),
                ("xy(y+1)-1", &named.pos_minus1),
                ("-xy(y+1)", &named.neg),
                ("xy(y+1)+2", &named.pos_plus2),
            ],
        };
        for (label, poly) in &expected_nonconstant {
            if self.find(poly).is_none() {
                out.push(TableMismatch::MissingState { label: label.to_string() });
            }
        }
        for s in self.states.iter().filter(|s| !s.is_constant) {
            if !expected_nonconstant.iter().any(|(_, poly)| **poly == s.poly) {
                out.push(TableMismatch::UnexpectedState {
                    poly: s.poly.display(p).to_string(),
                });
            }
        }

        let c = |v: i64| Expect::State(BiPoly::constant(p.reduce(v)));
        let st = |poly: &BiPoly| Expect::State(poly.clone());
        let mut columns: Vec<Column> = Vec::new();
        match p.class6() {
            Class6::PlusOne => {
                let n = named.clone();
                columns.push(("s1", named.s1.clone(), Box::new(move |d| match d {
                    0 => st(&n.s2),
                    1 => c(1),
                    _ if d == q - 2 => st(&n.neg),
                    _ if d == q - 1 => st(&n.pos_plus2),
                    _ => Expect::AnyConstant,
                })));
                let n = named.clone();
                columns.push(("s2", named.s2.clone(), Box::new(move |d| match d {
                    0 => st(&n.s2),
                    1 => c(1),
                    _ => Expect::AnyConstant,
                })));
                columns.push(("1", BiPoly::one(), Box::new(move |d| match d {
                    0 | 1 => c(1),
                    _ if d == q - 1 => c(1),
                    _ => Expect::AnyConstant,
                })));
                let n = named.clone();
                columns.push(("-xy(y+1)", named.neg.clone(), Box::new(move |d| match d {
                    0 => c(0),
                    _ if d == q - 1 => st(&n.neg),
                    _ => Expect::AnyConstant,
                })));
                let n = named.clone();
                columns.push(("xy(y+1)+2", named.pos_plus2.clone(), Box::new(move |d| match d {
                    0 => c(2),
                    _ if d == q - 2 => c(0),
                    _ if d == q - 1 => st(&n.pos_plus2),
                    _ => Expect::AnyConstant,
                })));
            }
            Class6::MinusOne => {
                let n = named.clone();
                columns.push(("s1", named.s1.clone(), Box::new(move |d| match d {
                    0 => st(&n.s2),
                    1 => c(1),
                    _ if d == q - 2 => st(&n.neg_minus1),
                    _ if d == q - 1 => st(&n.pos_minus1),
                    _ => Expect::AnyConstant,
                })));
                let n = named.clone();
                columns.push(("s2", named.s2.clone(), Box::new(move |d| match d {
                    0 => st(&n.s2),
                    1 => c(1),
                    _ => Expect::AnyConstant,
                })));
                columns.push(("1", BiPoly::one(), Box::new(move |d| match d {
                    0 | 1 => c(1),
                    _ if d == q - 1 => c(-1),
                    _ => Expect::AnyConstant,
                })));
                let n = named.clone();
                columns.push(("-xy(y+1)-1", named.neg_minus1.clone(), Box::new(move |d| match d {
                    0 => c(-1),
                    _ if d == q - 3 => c(0),
                    _ if d == q - 1 => st(&n.neg),
                    _ => Expect::AnyConstant,
                })));
                let n = named.clone();
                columns.push(("xy(y+1)-1", named.pos_minus1.clone(), Box::new(move |d| match d {
                    0 => c(-1),
                    // Partial state diagram: digit 1 leads to the zero state.
                    1 => c(0),
                    _ if d == q - 1 => st(&n.pos_plus2),
                    _ => Expect::AnyConstant,
                })));
                let n = named.clone();
                columns.push(("-xy(y+1)", named.neg.clone(), Box::new(move |d| match d {
                    0 => c(0),
                    _ if d == q - 1 => st(&n.neg_minus1),
                    _ => Expect::AnyConstant,
                })));
                let n = named.clone();
                columns.push(("xy(y+1)+2", named.pos_plus2.clone(), Box::new(move |d| match d {
                    0 => c(2),
                    _ if d == q - 2 => c(0),
                    _ if d == q - 1 => st(&n.pos_minus1),
                    _ => Expect::AnyConstant,
                })));
            }
        }
        // The zero state absorbs every digit.
        columns.push(("0", BiPoly::zero(), Box::new(move |_| c(0))));

        for (label, poly, expect) in &columns {
            let Some(from) = self.find(poly) else {
                if !out.iter().any(|m| matches!(m, TableMismatch::MissingState { label: l } if l == label)) {
                    out.push(TableMismatch::MissingState { label: label.to_string() });
                }
                continue;
            };
            for d in 0..q {
                let target = &self.state(self.transition(from, d)).poly;
                let ok = match expect(d) {
                    Expect::AnyConstant => target.is_constant(),
                    Expect::State(ref want) => want == target,
                };
                if !ok {
                    out.push(TableMismatch::Transition {
                        from: label.to_string(),
                        digit: d,
                        expected: match expect(d) {
                            Expect::AnyConstant => "a constant".to_string(),
                            Expect::State(want) => want.display(p).to_string(),
                        },
                        found: target.display(p).to_string(),
                    });
                }
            }
        }
        if let Some(z) = self.constant_state(FieldElement::ZERO) {
            if !self.state(z).is_loop {
                out.push(TableMismatch::NotLoop { label: "0".into() });
            }
        }
        out
    }

    /// Graphviz rendering. Parallel edges are merged into one edge labelled
    /// with its digits (`all` when every digit is present).
    pub fn to_dot(&self, options: DotOptions) -> String {
        let p = self.prime;
        let q = p.value();
        // Collapsing keeps every polynomial state plus the constants 0 and 1,
        // and routes every other constant into a single node `c`.
        let kept = |s: &State| !options.collapse_constant_states || !s.is_constant || s.value.residue() <= 1;
        let node_of = |id: u32| -> Option<String> {
            let s = self.state(id);
            if kept(s) {
                Some(format!("s{id}"))
            } else {
                Some("c".to_string())
            }
        };

        let mut out = String::new();
        writeln!(out, "digraph motzkin_mod_{q} {{").unwrap();
        writeln!(out, "    rankdir=LR;").unwrap();
        writeln!(out, "    node [shape=ellipse];").unwrap();
        let mut has_cloud = false;
        for s in &self.states {
            if !kept(s) {
                has_cloud = true;
                continue;
            }
            let label = s.poly.display(p).to_string();
            let extra = if s.id == 0 { ", style=bold, peripheries=2" } else { "" };
            writeln!(out, "    s{} [label=\"{}\"{}];", s.id, label, extra).unwrap();
        }
        if has_cloud {
            writeln!(out, "    c [label=\"c\", shape=box, style=dashed];").unwrap();
        }

        let mut edges: BTreeMap<(u32, String), (String, Vec<u32>)> = BTreeMap::new();
        for s in &self.states {
            if !kept(s) {
                continue;
            }
            for d in 0..q {
                let to = self.transition(s.id, d);
                let to_node = node_of(to).unwrap();
                let key_rank = if to_node == "c" { u32::MAX } else { to };
                edges
                    .entry((s.id, format!("{key_rank:010}")))
                    .or_insert_with(|| (to_node, Vec::new()))
                    .1
                    .push(d);
            }
        }
        for ((from, _), (to, digits)) in &edges {
            writeln!(out, "    s{from} -> {to} [label=\"{}\"];", digit_label(digits, q)).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DotOptions {
    pub collapse_constant_states: bool,
}

fn digit_label(digits: &[u32], q: u32) -> String {
    if digits.len() == q as usize {
        return "all".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < digits.len() {
        let mut j = i;
        while j + 1 < digits.len() && digits[j + 1] == digits[j] + 1 {
            j += 1;
        }
        if j - i >= 2 {
            parts.push(format!("{}-{}", digits[i], digits[j]));
        } else {
            parts.extend(digits[i..=j].iter().map(u32::to_string));
        }
        i = j + 1;
    }
    parts.join(",")
}

type Column<'a> = (&'static str, BiPoly, Box<dyn Fn(u32) -> Expect + 'a>);

enum Expect {
    State(BiPoly),
    AnyConstant,
}

/// The non-constant states that appear in the published tables.
#[derive(Debug, Clone)]
pub struct NamedStates {
    pub s1: BiPoly,
    /// `2x^2y^2(y+1) + xy`
    pub s2: BiPoly,
    /// `-xy(y+1)`
    pub neg: BiPoly,
    /// `-xy(y+1) - 1`
    pub neg_minus1: BiPoly,
    /// `xy(y+1) - 1`
    pub pos_minus1: BiPoly,
    /// `xy(y+1) + 2`
    pub pos_plus2: BiPoly,
}

impl NamedStates {
    pub fn new(p: Prime) -> Self {
        let xy_y1 = |scale: i64, constant: i64| BiPoly::from_terms(p, [(1, 2, scale), (1, 1, scale), (0, 0, constant)]);
        NamedStates {
            s1: initial_poly(p),
            s2: BiPoly::from_terms(p, [(2, 2, 2), (2, 3, 2), (1, 1, 1)]),
            neg: xy_y1(-1, 0),
            neg_minus1: xy_y1(-1, -1),
            pos_minus1: xy_y1(1, -1),
            pos_plus2: xy_y1(1, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableMismatch {
    MissingState { label: String },
    UnexpectedState { poly: String },
    Transition { from: String, digit: u32, expected: String, found: String },
    NotLoop { label: String },
}

impl fmt::Display for TableMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableMismatch::MissingState { label } => write!(f, "state {label} is missing"),
            TableMismatch::UnexpectedState { poly } => write!(f, "unexpected polynomial state {poly}"),
            TableMismatch::Transition { from, digit, expected, found } => {
                write!(f, "({from}, {digit}) -> {found}, expected {expected}")
            }
            TableMismatch::NotLoop { label } => write!(f, "state {label} is not a loop state"),
        }
    }
}

/// Wire form of an automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonDocument {
    pub p: u64,
    pub initial: u64,
    pub states: Vec<StateDocument>,
    pub delta: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDocument {
    pub id: u64,
    /// `[x_deg, y_deg, coeff]` triples sorted by `(x_deg, y_deg)`.
    pub poly: Vec<[u64; 3]>,
    pub value: u64,
}
