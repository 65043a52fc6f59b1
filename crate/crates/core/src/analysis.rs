//! Structural divisibility forms, asymptotic and empirical densities, the
//! `c(p, d)` criterion, forbidden residues and the classical mod 2, 3, 5
//! characterizations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::automaton::Automaton;
use crate::field::{Binomials, Class6, FieldElement, Prime};
use crate::oracle::MotzkinTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("unsupported modulus {0}; expected 2, 3 or 5")]
    UnsupportedModulus(u32),
}

/// `{ (q i + r) q^(s j + t) - shift : i >= 0, j >= j_min }`, restricted to
/// nonnegative integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructuredSet {
    pub q: u64,
    pub r: u64,
    pub s: u32,
    pub t: u32,
    pub j_min: u32,
    pub shift: u64,
}

impl StructuredSet {
    pub fn new(q: u64, r: u64, s: u32, t: u32, j_min: u32, shift: u64) -> Self {
        assert!(q >= 2 && r < q && s > 0 && j_min <= 1, "invalid structured set");
        StructuredSet { q, r, s, t, j_min, shift }
    }

    fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        (self.j_min..).map(|j| self.s * j + self.t)
    }

    pub fn contains(&self, n: u64) -> bool {
        let m = n as u128 + self.shift as u128;
        if m == 0 {
            return self.r == 0;
        }
        let q = self.q as u128;
        for e in self.exponents() {
            let Some(qe) = q.checked_pow(e) else { break };
            if qe > m {
                break;
            }
            if m.is_multiple_of(qe) && (m / qe) % q == self.r as u128 {
                return true;
            }
        }
        false
    }

    /// Sorted members in `[0, limit]`.
    pub fn members(&self, limit: u64) -> Vec<u64> {
        let top = limit as u128 + self.shift as u128;
        let q = self.q as u128;
        let mut out = Vec::new();
        if self.r == 0 && self.shift == 0 {
            out.push(0);
        }
        for e in self.exponents() {
            let Some(qe) = q.checked_pow(e) else { break };
            if qe > top {
                break;
            }
            let mut base = if self.r == 0 { q } else { self.r as u128 };
            while base * qe <= top {
                let m = base * qe;
                if m >= self.shift as u128 {
                    out.push((m - self.shift as u128) as u64);
                }
                base += q;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Members in `[1, limit]`.
    pub fn count(&self, limit: u64) -> u64 {
        self.members(limit).iter().filter(|&&n| n >= 1).count() as u64
    }

    /// Asymptotic density; the shift does not affect it.
    pub fn density_formula(&self) -> BigRational {
        let q = BigInt::from(self.q);
        let qs_minus_1 = num_traits::pow(q.clone(), self.s as usize) - 1;
        let den_base = qs_minus_1 * num_traits::pow(q.clone(), self.t as usize + 1);
        match self.j_min {
            0 => BigRational::new(num_traits::pow(q, self.s as usize), den_base),
            _ => BigRational::new(BigInt::one(), den_base),
        }
    }
}

impl fmt::Display for StructuredSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}i+{})*{}^({}j+{}) - {}, j>={}", self.q, self.r, self.q, self.s, self.t, self.shift, self.j_min)
    }
}

/// The families of `n` with `M_n = 0 mod p` that are read off the state
/// diagrams.
pub fn table1_forms(p: Prime) -> Vec<StructuredSet> {
    let q = p.value() as u64;
    match p.class6() {
        Class6::PlusOne => vec![StructuredSet::new(q, 1, 1, 0, 1, 2), StructuredSet::new(q, q - 1, 1, 0, 1, 1)],
        Class6::MinusOne => vec![
            StructuredSet::new(q, 1, 2, 0, 1, 2),
            StructuredSet::new(q, q - 2, 2, 1, 0, 2),
            StructuredSet::new(q, 2, 2, 1, 0, 1),
            StructuredSet::new(q, q - 1, 2, 0, 1, 1),
        ],
    }
}

/// `2 / (p (p - 1))`.
pub fn table1_lower_bound(p: Prime) -> BigRational {
    let q = p.value() as i64;
    BigRational::new(BigInt::from(2), BigInt::from(q * (q - 1)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormViolation {
    pub form: usize,
    pub n: u64,
    pub automaton: FieldElement,
    pub oracle: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormsReport {
    pub p: u32,
    pub limit: u64,
    pub checked: u64,
    pub oracle_checked: u64,
    pub violations: Vec<FormViolation>,
}

/// Every member `n <= limit` of every form must have `M_n = 0 mod p`; members
/// within the oracle table's range are checked there as well.
pub fn verify_forms(m: &Automaton, limit: u64, oracle: Option<&MotzkinTable>) -> FormsReport {
    let p = m.prime();
    let mut report = FormsReport {
        p: p.value(),
        limit,
        checked: 0,
        oracle_checked: 0,
        violations: Vec::new(),
    };
    for (form, set) in table1_forms(p).iter().enumerate() {
        for n in set.members(limit) {
            let a = m.eval(n);
            let o = oracle.and_then(|t| t.get(n));
            report.checked += 1;
            if o.is_some() {
                report.oracle_checked += 1;
            }
            if !a.is_zero() || o.is_some_and(|v| v != 0) {
                report.violations.push(FormViolation {
                    form,
                    n,
                    automaton: a,
                    oracle: o,
                });
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Exact,
    LowerBound,
    None,
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceKind::Exact => "exact",
            ReferenceKind::LowerBound => "lower-bound",
            ReferenceKind::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub p: u32,
    pub residue: u32,
    pub limit: u64,
    pub count: u64,
    pub density: Ratio<u64>,
    pub reference: Option<BigRational>,
    pub kind: ReferenceKind,
}

impl DensityReport {
    pub fn density_f64(&self) -> f64 {
        *self.density.numer() as f64 / *self.density.denom() as f64
    }

    pub fn reference_f64(&self) -> Option<f64> {
        self.reference.as_ref().map(ratio_to_f64)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

const SWEEP_CHUNK: u64 = 1 << 15;

/// Histogram of `M_n mod p` over `1 <= n <= limit`.
pub fn residue_counts(m: &Automaton, limit: u64) -> Vec<u64> {
    let q = m.prime().value() as usize;
    let chunks = limit.div_ceil(SWEEP_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; q];
            let lo = c * SWEEP_CHUNK + 1;
            let hi = ((c + 1) * SWEEP_CHUNK).min(limit);
            for n in lo..=hi {
                counts[m.eval(n).residue() as usize] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; q],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Primes whose residue-0 density is known exactly to be `2 / (p (p - 1))`.
pub const EXACT_DENSITY_PRIMES: [u32; 4] = [5, 11, 13, 23];

pub fn empirical_density(m: &Automaton, residue: u32, limit: u64) -> DensityReport {
    assert!(limit >= 1, "limit must be positive");
    let p = m.prime();
    let count = residue_counts(m, limit).get(residue as usize).copied().unwrap_or(0);
    let (reference, kind) = if residue != 0 {
        (None, ReferenceKind::None)
    } else if EXACT_DENSITY_PRIMES.contains(&p.value()) {
        (Some(table1_lower_bound(p)), ReferenceKind::Exact)
    } else {
        (Some(table1_lower_bound(p)), ReferenceKind::LowerBound)
    };
    DensityReport {
        p: p.value(),
        residue,
        limit,
        count,
        density: Ratio::new(count, limit),
        reference,
        kind,
    }
}

/// `c(p, d) = Σ_k C(p-1-k, d-2k) C(d, k) (-1)^d mod p`, the constant that
/// digit `d` multiplies a constant state by.
pub fn cpd(binoms: &Binomials, d: u32) -> FieldElement {
    let p = binoms.prime();
    assert!(d < p.value(), "digit {d} out of range");
    let (q, d) = (p.value() as i64, d as i64);
    let mut acc = FieldElement::ZERO;
    for k in 0..=d / 2 {
        let term = p.mul(binoms.binom(q - 1 - k, d - 2 * k), binoms.binom(d, k));
        acc = p.add(acc, term);
    }
    if d % 2 == 1 {
        p.neg(acc)
    } else {
        acc
    }
}

pub fn cpd_table(binoms: &Binomials) -> Vec<FieldElement> {
    (0..binoms.prime().value()).map(|d| cpd(binoms, d)).collect()
}

/// Smallest `d` in `2..=p-2` with `c(p, d) = 0`.
pub fn density_one_criterion(binoms: &Binomials) -> Option<u32> {
    let q = binoms.prime().value();
    (2..=q - 2).find(|&d| cpd(binoms, d).is_zero())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenReport {
    pub p: u32,
    /// Residues that are never `M_n mod p`.
    pub forbidden: Vec<u32>,
    pub attainable: Vec<u32>,
    pub cpd: Vec<FieldElement>,
    /// Order of the subgroup of units generated by the nonzero `c(p, d)`.
    pub generated_order: u64,
}

impl ForbiddenReport {
    /// Sufficient condition for every nonzero residue to occur.
    pub fn generates_units(&self) -> bool {
        self.generated_order == self.p as u64 - 1
    }

    /// Residues attained by the oracle table but classified as forbidden.
    pub fn conflicts_with(&self, table: &MotzkinTable) -> Vec<u32> {
        let mut seen = vec![false; self.p as usize];
        for &v in table.values() {
            seen[v as usize] = true;
        }
        self.forbidden.iter().copied().filter(|&r| seen[r as usize]).collect()
    }
}

/// A canonical digit string ends with a nonzero digit, so `M_n mod p` for
/// `n >= 1` is the value of a target of some nonzero-digit transition;
/// `M_0 = 1` is added separately.
pub fn forbidden_residues(m: &Automaton, binoms: &Binomials) -> ForbiddenReport {
    let p = m.prime();
    let q = p.value();
    let mut attained = vec![false; q as usize];
    attained[1] = true;
    for row in m.delta() {
        for &t in &row[1..] {
            attained[m.state(t).value.residue() as usize] = true;
        }
    }
    let attainable: Vec<u32> = (0..q).filter(|&r| attained[r as usize]).collect();
    let forbidden: Vec<u32> = (0..q).filter(|&r| !attained[r as usize]).collect();
    let cpd = cpd_table(binoms);
    let group_order = q as u64 - 1;
    let factors = prime_factors(group_order);
    let generated_order = cpd
        .iter()
        .filter(|c| !c.is_zero())
        .map(|&c| multiplicative_order(p, c, group_order, &factors))
        .fold(1u64, |acc, o| acc.lcm(&o));
    ForbiddenReport {
        p: q,
        forbidden,
        attainable,
        cpd,
        generated_order,
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn multiplicative_order(p: Prime, a: FieldElement, group_order: u64, factors: &[u64]) -> u64 {
    let mut order = group_order;
    for &f in factors {
        while order.is_multiple_of(f) && p.pow(a, order / f) == FieldElement::ONE {
            order /= f;
        }
    }
    order
}

/// Outcome of a classical characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classical {
    /// `M_n = 0 mod m`.
    Divisible(bool),
    /// `M_n mod 3` as one of `-1, 0, 1`.
    Residue(i8),
}

impl Classical {
    /// Agreement with an actual residue of `M_n` modulo `modulus`.
    pub fn matches(self, modulus: u32, residue: u32) -> bool {
        match self {
            Classical::Divisible(d) => d == (residue == 0),
            Classical::Residue(r) => (r as i64).rem_euclid(modulus as i64) as u32 == residue,
        }
    }
}

/// Even-ness forms `(4i + e) 4^(j+1) - δ`, `e ∈ {1, 3}`, `δ ∈ {1, 2}`.
pub fn mod2_forms() -> Vec<StructuredSet> {
    let mut out = Vec::new();
    for r in [1, 3] {
        for shift in [1, 2] {
            out.push(StructuredSet::new(4, r, 1, 1, 0, shift));
        }
    }
    out
}

/// The four forms for divisibility by 5.
pub fn mod5_forms() -> Vec<StructuredSet> {
    table1_forms(Prime::new(5).expect("5 is prime"))
}

fn only_digits_01_base3(mut u: u64) -> bool {
    while u > 0 {
        if u % 3 == 2 {
            return false;
        }
        u /= 3;
    }
    true
}

pub fn classical_predicate(modulus: u32, n: u64) -> Result<Classical, AnalysisError> {
    match modulus {
        2 => Ok(Classical::Divisible(mod2_forms().iter().any(|s| s.contains(n)))),
        3 => {
            // n lies in exactly one of 3T, 3T - 1, 3T - 2 according to n mod 3.
            let (u, value) = match n % 3 {
                0 => (n / 3, 1),
                1 => (n.div_ceil(3), 1),
                _ => ((n + 1) / 3, -1),
            };
            Ok(Classical::Residue(if only_digits_01_base3(u) { value } else { 0 }))
        }
        5 => Ok(Classical::Divisible(mod5_forms().iter().any(|s| s.contains(n)))),
        other => Err(AnalysisError::UnsupportedModulus(other)),
    }
}

/// Sum of the densities of the given sets.
pub fn total_density(sets: &[StructuredSet]) -> BigRational {
    sets.iter().map(StructuredSet::density_formula).fold(BigRational::zero(), |a, b| a + b)
}
