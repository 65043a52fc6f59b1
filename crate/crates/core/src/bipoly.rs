//! Sparse bivariate polynomials over GF(p) and the Cartier operators
//! `Λ_{d1,d2}`.
//!
//! A [`BiPoly`] stores only nonzero coefficients in a term list sorted by
//! `(x_deg, y_deg)`, so structural equality and hashing coincide with
//! equality of polynomials mod `p`. The prime is passed to every operation
//! rather than stored per polynomial.

use std::collections::HashMap;
use std::fmt;

use crate::field::{Binomials, FieldElement, Prime};

/// One nonzero monomial `coeff * x^x_deg * y^y_deg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub x_deg: u32,
    pub y_deg: u32,
    pub coeff: FieldElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: Vec<Term>,
}

// Products whose dense bounding box stays below this many cells are
// accumulated in a flat array; larger ones go through a hash map.
const DENSE_LIMIT: usize = 1 << 24;

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FieldElement::ONE)
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(x_deg: u32, y_deg: u32, coeff: FieldElement) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        BiPoly {
            terms: vec![Term {
                x_deg,
                y_deg,
                coeff,
            }],
        }
    }

    /// Builds a polynomial from `(x_deg, y_deg, signed coefficient)` triples.
    /// Repeated exponents are summed; coefficients are reduced mod `p`.
    pub fn from_terms<I>(p: Prime, terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, i64)>,
    {
        let mut acc: HashMap<(u32, u32), i64> = HashMap::new();
        for (x, y, c) in terms {
            let e = acc.entry((x, y)).or_insert(0);
            *e = (*e + c).rem_euclid(p.value() as i64);
        }
        Self::from_residue_map(acc.into_iter().map(|(k, v)| (k, v as u64)), p)
    }

    fn from_residue_map<I>(entries: I, p: Prime) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), u64)>,
    {
        let m = p.value() as u64;
        let mut terms: Vec<Term> = entries
            .into_iter()
            .filter_map(|((x_deg, y_deg), c)| {
                let c = (c % m) as u32;
                (c != 0).then(|| Term {
                    x_deg,
                    y_deg,
                    coeff: FieldElement::from_reduced(c),
                })
            })
            .collect();
        terms.sort_unstable();
        BiPoly { terms }
    }

    /// Accepts a term list that is already canonical: sorted strictly by
    /// `(x_deg, y_deg)` with every coefficient in `[1, p-1]`.
    pub fn from_canonical_terms(terms: Vec<Term>, p: Prime) -> Option<Self> {
        let sorted = terms
            .windows(2)
            .all(|w| (w[0].x_deg, w[0].y_deg) < (w[1].x_deg, w[1].y_deg));
        let reduced = terms
            .iter()
            .all(|t| t.coeff.residue() != 0 && t.coeff.residue() < p.value());
        (sorted && reduced).then_some(BiPoly { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.x_deg == 0 && t.y_deg == 0)
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.x_deg).max()
    }

    pub fn y_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.y_deg).max()
    }

    pub fn coeff(&self, x_deg: u32, y_deg: u32) -> FieldElement {
        self.terms
            .binary_search_by(|t| (t.x_deg, t.y_deg).cmp(&(x_deg, y_deg)))
            .map(|i| self.terms[i].coeff)
            .unwrap_or(FieldElement::ZERO)
    }

    /// Value at `x = 0, y = 0`, i.e. the constant coefficient.
    pub fn eval_origin(&self) -> FieldElement {
        match self.terms.first() {
            Some(t) if t.x_deg == 0 && t.y_deg == 0 => t.coeff,
            _ => FieldElement::ZERO,
        }
    }

    pub fn add(&self, other: &BiPoly, p: Prime) -> BiPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            let (ka, kb) = ((a[i].x_deg, a[i].y_deg), (b[j].x_deg, b[j].y_deg));
            if ka < kb {
                out.push(a[i]);
                i += 1;
            } else if kb < ka {
                out.push(b[j]);
                j += 1;
            } else {
                let c = p.add(a[i].coeff, b[j].coeff);
                if !c.is_zero() {
                    out.push(Term { coeff: c, ..a[i] });
                }
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        BiPoly { terms: out }
    }

    pub fn neg(&self, p: Prime) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: p.neg(t.coeff),
                    ..*t
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &BiPoly, p: Prime) -> BiPoly {
        self.add(&other.neg(p), p)
    }

    pub fn scale(&self, c: FieldElement, p: Prime) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: p.mul(t.coeff, c),
                    ..*t
                })
                .collect(),
        }
    }

    /// Multiplies by the monomial `x^dx y^dy`.
    pub fn shift(&self, dx: u32, dy: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    x_deg: t.x_deg + dx,
                    y_deg: t.y_deg + dy,
                    coeff: t.coeff,
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &BiPoly, p: Prime) -> BiPoly {
        if self.is_zero() || other.is_zero() {
            return BiPoly::zero();
        }
        let m = p.value() as u64;
        let width = (self.y_degree().unwrap() + other.y_degree().unwrap() + 1) as usize;
        let height = (self.x_degree().unwrap() + other.x_degree().unwrap() + 1) as usize;
        if width.saturating_mul(height) <= DENSE_LIMIT {
            let mut acc = vec![0u64; width * height];
            for a in &self.terms {
                for b in &other.terms {
                    let idx = (a.x_deg + b.x_deg) as usize * width + (a.y_deg + b.y_deg) as usize;
                    acc[idx] = (acc[idx] + a.coeff.residue() as u64 * b.coeff.residue() as u64) % m;
                }
            }
            let terms = acc
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(idx, &c)| Term {
                    x_deg: (idx / width) as u32,
                    y_deg: (idx % width) as u32,
                    coeff: FieldElement::from_reduced(c as u32),
                })
                .collect();
            return BiPoly { terms };
        }
        let mut acc: HashMap<(u32, u32), u64> = HashMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let e = acc.entry((a.x_deg + b.x_deg, a.y_deg + b.y_deg)).or_insert(0);
                *e = (*e + a.coeff.residue() as u64 * b.coeff.residue() as u64) % m;
            }
        }
        Self::from_residue_map(acc, p)
    }

    /// `self^e` by repeated squaring; `a^0 = 1`.
    pub fn pow(&self, mut e: u64, p: Prime) -> BiPoly {
        let mut acc = BiPoly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, p);
            }
        }
        acc
    }

    /// `Λ_{d1,d2}`: keeps the terms with `x_deg ≡ d1`, `y_deg ≡ d2 (mod p)`
    /// and divides their exponents by `p`.
    pub fn cartier(&self, d1: u32, d2: u32, p: Prime) -> BiPoly {
        let q = p.value();
        assert!(d1 < q && d2 < q, "digit out of range for p = {q}");
        // Filtering preserves the (x, y) order since floor division by q is monotone.
        BiPoly {
            terms: self
                .terms
                .iter()
                .filter(|t| t.x_deg % q == d1 && t.y_deg % q == d2)
                .map(|t| Term {
                    x_deg: t.x_deg / q,
                    y_deg: t.y_deg / q,
                    coeff: t.coeff,
                })
                .collect(),
        }
    }

    /// Substitutes `x -> x^p`, `y -> y^p`.
    pub fn inflate(&self, p: Prime) -> BiPoly {
        let q = p.value();
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    x_deg: t.x_deg * q,
                    y_deg: t.y_deg * q,
                    coeff: t.coeff,
                })
                .collect(),
        }
    }

    /// Renders with signed coefficients in `(-p/2, p/2]`, highest degree first.
    pub fn display(&self, p: Prime) -> PolyDisplay<'_> {
        PolyDisplay { poly: self, p }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a BiPoly,
    p: Prime,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, t) in self.poly.terms.iter().rev().enumerate() {
            let c = self.p.symmetric(t.coeff);
            let mag = c.unsigned_abs();
            match (k, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_const = t.x_deg == 0 && t.y_deg == 0;
            if mag != 1 || is_const {
                write!(f, "{mag}")?;
            }
            for (var, deg) in [("x", t.x_deg), ("y", t.y_deg)] {
                match deg {
                    0 => {}
                    1 => f.write_str(var)?,
                    _ => write!(f, "{var}^{deg}")?,
                }
            }
        }
        Ok(())
    }
}

/// The initial state `y(1 - xy - 2x^2y^2 - 2x^2y^3)`.
pub fn initial_poly(p: Prime) -> BiPoly {
    BiPoly::from_terms(p, [(0, 1, 1), (1, 2, -1), (2, 3, -2), (2, 4, -2)])
}

/// `x^2y^3 + 2x^2y^2 + x^2y + xy + x - 1`; its `(p-1)`-th power drives
/// every transition.
pub fn kernel_poly(p: Prime) -> BiPoly {
    BiPoly::from_terms(
        p,
        [(2, 3, 1), (2, 2, 2), (2, 1, 1), (1, 1, 1), (1, 0, 1), (0, 0, -1)],
    )
}

/// `kernel_poly(p)^(p-1)` computed as the exact quotient
/// `kernel(x^p, y^p) / kernel(x, y)` (Frobenius: `K^p = K(x^p, y^p)` in
/// characteristic `p`). Linear in the number of output terms, unlike
/// repeated squaring.
pub fn kernel_power(p: Prime) -> BiPoly {
    // K = -1 + x(1+y) + x^2 y(1+y)^2, so row i of S = K^(p-1) in x satisfies
    // S_i = (1+y) S_{i-1} + y(1+y)^2 S_{i-2} - P_i with P = K(x^p, y^p).
    let q = p.value() as usize;
    let m = p.value() as u64;
    let rows = 2 * (q - 1) + 1;
    let mut s: Vec<Vec<u64>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row: Vec<u64> = Vec::new();
        let add_at = |row: &mut Vec<u64>, j: usize, v: u64| {
            if row.len() <= j {
                row.resize(j + 1, 0);
            }
            row[j] = (row[j] + v) % m;
        };
        if i >= 1 {
            // (1 + y) * S_{i-1}
            for (j, &c) in s[i - 1].iter().enumerate() {
                if c != 0 {
                    add_at(&mut row, j, c);
                    add_at(&mut row, j + 1, c);
                }
            }
        }
        if i >= 2 {
            // (y + 2y^2 + y^3) * S_{i-2}
            for (j, &c) in s[i - 2].iter().enumerate() {
                if c != 0 {
                    add_at(&mut row, j + 1, c);
                    add_at(&mut row, j + 2, 2 * c % m);
                    add_at(&mut row, j + 3, c);
                }
            }
        }
        // -P_i: P_0 = -1, P_p = 1 + y^p, higher rows lie beyond 2(p-1).
        if i == 0 {
            add_at(&mut row, 0, 1);
        } else if i == q {
            add_at(&mut row, 0, m - 1);
            add_at(&mut row, q, m - 1);
        }
        while row.last() == Some(&0) {
            row.pop();
        }
        s.push(row);
    }
    let terms = s
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(j, &c)| Term {
                x_deg: i as u32,
                y_deg: j as u32,
                coeff: FieldElement::from_reduced(c as u32),
            })
        })
        .collect();
    BiPoly { terms }
}

/// Coefficient of `x^i y^j` in `kernel_poly(p)^(p-1)` from the closed form
/// `Σ_k C(p-1-k, i-2k) C(i, j-k) (-1)^i`.
pub fn kernel_power_coeff(i: u32, j: u32, binoms: &Binomials) -> FieldElement {
    let p = binoms.prime();
    let (i, j) = (i as i64, j as i64);
    let pm1 = p.value() as i64 - 1;
    let mut acc = FieldElement::ZERO;
    for k in 0..=pm1.min(j) {
        let term = p.mul(binoms.binom(pm1 - k, i - 2 * k), binoms.binom(i, j - k));
        acc = p.add(acc, term);
    }
    if i % 2 == 1 {
        p.neg(acc)
    } else {
        acc
    }
}

/// Closed form of `Λ_{d,d}(x^r y^t K^(p-1))`, coefficient by coefficient:
/// `Σ_k C(p-1-k, pi+d-r-2k) C(pi+d-r, pj+d-t-k) (-1)^(i+d+r)` over
/// `r <= pi+d <= 2(p-1)+r` and `t <= pj+d <= 3(p-1)+t`.
///
/// Independent of [`BiPoly::mul`] and [`kernel_power`]; used to cross-check
/// the generic pipeline.
pub fn monomial_cartier(r: u32, t: u32, d: u32, binoms: &Binomials) -> Option<BiPoly> {
    let p = binoms.prime();
    let q = p.value() as i64;
    let (r, t, d) = (r as i64, t as i64, d as i64);
    if d >= q {
        return None;
    }
    let pm1 = q - 1;
    let mut entries = Vec::new();
    let mut i = 0i64;
    while q * i + d <= 2 * pm1 + r {
        let xi = q * i + d - r;
        if xi >= 0 {
            let mut j = 0i64;
            while q * j + d <= 3 * pm1 + t {
                let yj = q * j + d - t;
                if yj >= 0 {
                    let mut acc = FieldElement::ZERO;
                    for k in 0..=pm1 {
                        let term = p.mul(binoms.binom(pm1 - k, xi - 2 * k), binoms.binom(xi, yj - k));
                        acc = p.add(acc, term);
                    }
                    if (i + d + r) % 2 == 1 {
                        acc = p.neg(acc);
                    }
                    entries.push(((i as u32, j as u32), acc.residue() as u64));
                }
                j += 1;
            }
        }
        i += 1;
    }
    Some(BiPoly::from_residue_map(entries, p))
}

/// The cached `K^(p-1)` for one prime, indexed so that all `p` diagonal
/// Cartier images of `s * K^(p-1)` come out of one pass over the terms
/// that can contribute.
#[derive(Debug, Clone)]
pub struct CartierKernel {
    prime: Prime,
    power: BiPoly,
    // Terms of K^(p-1) grouped by (x_deg - y_deg) mod p.
    buckets: Vec<Vec<Term>>,
}

impl CartierKernel {
    pub fn new(prime: Prime) -> Self {
        Self::from_power(prime, kernel_power(prime))
    }

    /// Wraps an externally computed `K^(p-1)`.
    pub fn from_power(prime: Prime, power: BiPoly) -> Self {
        let q = prime.value();
        let mut buckets = vec![Vec::new(); q as usize];
        for t in power.terms() {
            let key = (t.x_deg % q + q - t.y_deg % q) % q;
            buckets[key as usize].push(*t);
        }
        CartierKernel {
            prime,
            power,
            buckets,
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// `K^(p-1)`.
    pub fn power(&self) -> &BiPoly {
        &self.power
    }

    /// `Λ_{d,d}(s * K^(p-1))` for every digit `d` in `0..p`.
    pub fn images(&self, s: &BiPoly) -> Vec<BiPoly> {
        let q = self.prime.value();
        let m = q as u64;
        let mut contributions: Vec<(u32, u32, u32, u64)> = Vec::new();
        for st in s.terms() {
            let key = (st.y_deg % q + q - st.x_deg % q) % q;
            for kt in &self.buckets[key as usize] {
                let (x, y) = (kt.x_deg + st.x_deg, kt.y_deg + st.y_deg);
                let c = st.coeff.residue() as u64 * kt.coeff.residue() as u64 % m;
                contributions.push((x % q, x / q, y / q, c));
            }
        }
        contributions.sort_unstable_by_key(|&(d, x, y, _)| (d, x, y));
        let mut out = vec![BiPoly::zero(); q as usize];
        let mut idx = 0;
        while idx < contributions.len() {
            let (d, x, y, _) = contributions[idx];
            let mut sum = 0u64;
            while idx < contributions.len() && contributions[idx].0 == d && (contributions[idx].1, contributions[idx].2) == (x, y) {
                sum = (sum + contributions[idx].3) % m;
                idx += 1;
            }
            if sum != 0 {
                out[d as usize].terms.push(Term {
                    x_deg: x,
                    y_deg: y,
                    coeff: FieldElement::from_reduced(sum as u32),
                });
            }
        }
        out
    }

    /// `Λ_{d,d}(s * K^(p-1))` through the plain multiply-then-extract route.
    pub fn image_direct(&self, s: &BiPoly, d: u32) -> BiPoly {
        s.mul(&self.power, self.prime).cartier(d, d, self.prime)
    }
}
