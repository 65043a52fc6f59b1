//! Shared oracles and property bodies for the integration tests.

#![allow(dead_code)]

use std::ops::RangeInclusive;

use motzkin::bipoly::monomial_cartier;
use motzkin::series::series_recurrence;
use motzkin::{BiPoly, Binomials, CartierKernel, FieldElement, Prime};

pub fn prime(v: u64) -> Prime {
    Prime::new(v).unwrap()
}

/// Series constants near `n = p`, reduced mod `p`.
pub struct Constants {
    pub a_pm1: FieldElement,
    pub a_p: FieldElement,
    pub a_p1: FieldElement,
    pub b_p: FieldElement,
    pub b_p1: FieldElement,
    pub c_p1: FieldElement,
    pub half: FieldElement,
}

impl Constants {
    pub fn new(p: Prime) -> Self {
        let q = p.value() as usize;
        let s = series_recurrence(q as u64 + 1);
        let r = |v: i128| p.reduce_i128(v);
        Constants {
            a_pm1: r(s[q - 1].a),
            a_p: r(s[q].a),
            a_p1: r(s[q + 1].a),
            b_p: r(s[q].b),
            b_p1: r(s[q + 1].b),
            c_p1: r(s[q + 1].c),
            half: p.inv(FieldElement::from_reduced(2)).unwrap(),
        }
    }
}

type Expected = Box<dyn Fn(u32) -> BiPoly>;

struct Row {
    state: &'static str,
    r: u32,
    t: u32,
    digits: RangeInclusive<i64>,
    forms: Vec<(&'static str, Expected)>,
}

/// Every closed-form entry of the tables of `Λ_{d,d}(s Q^(p-1))` for the
/// monomials `1, y, x^2y^2, xy^2, xy, x^2y^3, x^2y^4`. Entries given both as
/// a binomial sum and as a series expression contribute one form each.
fn rows(p: Prime) -> Vec<Row> {
    let q = p.value() as i64;
    let k = Constants::new(p);
    // Leaked so the per-cell closures can copy the reference.
    let b: &'static Binomials = Box::leak(Box::new(Binomials::new(p)));
    let sum = move |f: &dyn Fn(i64) -> FieldElement| (0..=q).fold(FieldElement::ZERO, |acc, kk| p.add(acc, f(kk)));
    let sign = move |e: i64| if e.rem_euclid(2) == 0 { FieldElement::ONE } else { p.reduce(-1) };
    let c = move |v: FieldElement| BiPoly::constant(v);
    // v + xy + xy^2 scaled by `lin`
    let with_xy = move |v: FieldElement, lin: i64| BiPoly::constant(v).add(&BiPoly::from_terms(p, [(1, 1, lin), (1, 2, lin)]), p);
    let xy = move |v: FieldElement| BiPoly::monomial(1, 1, v);

    macro_rules! e {
        ($name:expr, $body:expr) => {
            ($name, Box::new($body) as Expected)
        };
    }
    let bb = move |n: i64, m: i64| b.binom(n, m);
    let neg = move |v: FieldElement| p.neg(v);
    let (add, sub, mul) = (move |x, y| p.add(x, y), move |x, y| p.sub(x, y), move |x, y| p.mul(x, y));
    let one = FieldElement::ONE;
    let Constants { a_pm1, a_p, a_p1, b_p, b_p1, c_p1, half } = k;
    let two = p.reduce(2);
    let three = p.reduce(3);

    vec![
        Row { state: "1", r: 0, t: 0, digits: 0..=1, forms: vec![e!("1", move |_: u32| c(one))] },
        Row {
            state: "1",
            r: 0,
            t: 0,
            digits: 2..=q - 3,
            forms: vec![e!("sum", move |d: u32| {
                let d = d as i64;
                c(mul(sum(&|k| mul(bb(q - 1 - k, d - 2 * k), bb(d, k))), sign(d)))
            })],
        },
        Row { state: "1", r: 0, t: 0, digits: q - 2..=q - 2, forms: vec![e!("b_p", move |_: u32| c(b_p))] },
        Row { state: "1", r: 0, t: 0, digits: q - 1..=q - 1, forms: vec![e!("a_{p-1}", move |_: u32| c(a_pm1))] },
        Row { state: "y", r: 0, t: 1, digits: 0..=0, forms: vec![e!("0", move |_: u32| BiPoly::zero())] },
        Row { state: "y", r: 0, t: 1, digits: 1..=1, forms: vec![e!("1", move |_: u32| c(one))] },
        Row {
            state: "y",
            r: 0,
            t: 1,
            digits: 2..=q - 3,
            forms: vec![e!("sum", move |d: u32| {
                let d = d as i64;
                c(mul(sum(&|k| mul(bb(q - 1 - k, d - 2 * k), bb(d, k + 1))), sign(d)))
            })],
        },
        Row {
            state: "y",
            r: 0,
            t: 1,
            digits: q - 2..=q - 2,
            forms: vec![
                e!("sum", move |_: u32| with_xy(neg(sum(&|k| mul(bb(q - 1 - k, k + 1), bb(q - 2, k + 1)))), 1)),
                e!("-a_p - b_p + 1", move |_: u32| with_xy(add(neg(add(a_p, b_p)), one), 1)),
            ],
        },
        Row {
            state: "y",
            r: 0,
            t: 1,
            digits: q - 1..=q - 1,
            forms: vec![
                e!("sum", move |_: u32| c(sum(&|k| mul(bb(q - 1 - k, k), bb(q - 1, k + 1))))),
                e!("-a_{p-1}", move |_: u32| c(neg(a_pm1))),
            ],
        },
        Row {
            state: "x^2y^2",
            r: 2,
            t: 2,
            digits: 0..=0,
            forms: vec![
                e!("sum", move |_: u32| xy(neg(sum(&|k| mul(bb(q - 1 - k, k + 1), bb(q - 2, k)))))),
                e!("b_p xy", move |_: u32| xy(b_p)),
            ],
        },
        Row {
            state: "x^2y^2",
            r: 2,
            t: 2,
            digits: 1..=1,
            forms: vec![
                e!("sum", move |_: u32| xy(sum(&|k| mul(bb(q - 1 - k, k), bb(q - 1, k))))),
                e!("a_{p-1} xy", move |_: u32| xy(a_pm1)),
            ],
        },
        Row {
            state: "x^2y^2",
            r: 2,
            t: 2,
            digits: 2..=q - 1,
            forms: vec![e!("sum", move |d: u32| {
                let d = d as i64;
                c(mul(sum(&|k| mul(bb(q - 1 - k, d - 2 - 2 * k), bb(d - 2, k))), sign(d)))
            })],
        },
        Row {
            state: "xy^2",
            r: 1,
            t: 2,
            digits: 0..=0,
            forms: vec![
                e!("sum", move |_: u32| xy(sum(&|k| mul(bb(q - 1 - k, k), bb(q - 1, k + 1))))),
                e!("-a_{p-1} xy", move |_: u32| xy(neg(a_pm1))),
            ],
        },
        Row { state: "xy^2", r: 1, t: 2, digits: 1..=1, forms: vec![e!("0", move |_: u32| BiPoly::zero())] },
        Row {
            state: "xy^2",
            r: 1,
            t: 2,
            digits: 2..=q - 3,
            forms: vec![e!("sum", move |d: u32| {
                let d = d as i64;
                c(mul(sum(&|k| mul(bb(q - 1 - k, d - 1 - 2 * k), bb(d - 1, k + 1))), sign(d + 1)))
            })],
        },
        Row {
            state: "xy^2",
            r: 1,
            t: 2,
            digits: q - 2..=q - 2,
            forms: vec![e!("-(c_{p+1} + b_{p+1})/2", move |_: u32| c(neg(mul(half, add(c_p1, b_p1)))))],
        },
        Row {
            state: "xy^2",
            r: 1,
            t: 2,
            digits: q - 1..=q - 1,
            forms: vec![
                e!("sum", move |_: u32| with_xy(neg(sum(&|k| mul(bb(q - 1 - k, k + 1), bb(q - 2, k + 1)))), 1)),
                e!("-a_p - b_p + 1", move |_: u32| with_xy(add(neg(add(a_p, b_p)), one), 1)),
            ],
        },
        Row { state: "xy", r: 1, t: 1, digits: 0..=0, forms: vec![e!("a_{p-1} xy", move |_: u32| xy(a_pm1))] },
        Row { state: "xy", r: 1, t: 1, digits: 1..=1, forms: vec![e!("1", move |_: u32| c(one))] },
        Row {
            state: "xy",
            r: 1,
            t: 1,
            digits: 2..=q - 3,
            forms: vec![e!("sum", move |d: u32| {
                let d = d as i64;
                c(mul(sum(&|k| mul(bb(q - 1 - k, d - 1 - 2 * k), bb(d - 1, k))), sign(d + 1)))
            })],
        },
        Row {
            state: "xy",
            r: 1,
            t: 1,
            digits: q - 2..=q - 2,
            forms: vec![e!("(c_{p+1} - b_{p+1})/2", move |_: u32| c(mul(half, sub(c_p1, b_p1))))],
        },
        Row { state: "xy", r: 1, t: 1, digits: q - 1..=q - 1, forms: vec![e!("b_p", move |_: u32| c(b_p))] },
        Row {
            state: "x^2y^3",
            r: 2,
            t: 3,
            digits: 0..=0,
            forms: vec![
                e!("sum", move |_: u32| {
                    xy(neg(sum(&|k| mul(bb(q - 1 - k, k + 1), bb(q - 2, k + 1)))))
                        .add(&BiPoly::from_terms(p, [(2, 2, 1), (2, 3, 1)]), p)
                }),
                e!("(-a_p - b_p + 1) xy + ...", move |_: u32| {
                    xy(add(neg(add(a_p, b_p)), one)).add(&BiPoly::from_terms(p, [(2, 2, 1), (2, 3, 1)]), p)
                }),
            ],
        },
        Row {
            state: "x^2y^3",
            r: 2,
            t: 3,
            digits: 1..=1,
            forms: vec![
                e!("sum", move |_: u32| xy(sum(&|k| mul(bb(q - 1 - k, k), bb(q - 1, k + 1))))),
                e!("-a_{p-1} xy", move |_: u32| xy(neg(a_pm1))),
            ],
        },
        Row { state: "x^2y^3", r: 2, t: 3, digits: 2..=2, forms: vec![e!("0", move |_: u32| BiPoly::zero())] },
        Row {
            state: "x^2y^3",
            r: 2,
            t: 3,
            digits: 3..=q - 2,
            forms: vec![e!("sum", move |d: u32| {
                let d = d as i64;
                c(mul(sum(&|k| mul(bb(q - 1 - k, d - 2 - 2 * k), bb(d - 2, k + 1))), sign(d)))
            })],
        },
        Row {
            state: "x^2y^3",
            r: 2,
            t: 3,
            digits: q - 1..=q - 1,
            forms: vec![e!("-(c_{p+1} + b_{p+1})/2", move |_: u32| c(neg(mul(half, add(c_p1, b_p1)))))],
        },
        Row {
            state: "x^2y^4",
            r: 2,
            t: 4,
            digits: 0..=0,
            forms: vec![
                e!("sum", move |_: u32| {
                    xy(neg(sum(&|k| mul(bb(q - 1 - k, k + 1), bb(q - 2, k + 2)))))
                        .add(&BiPoly::from_terms(p, [(2, 2, -2), (2, 3, -2)]), p)
                }),
                e!("(2a_p + b_p - 2) xy + ...", move |_: u32| {
                    xy(sub(add(mul(two, a_p), b_p), two)).add(&BiPoly::from_terms(p, [(2, 2, -2), (2, 3, -2)]), p)
                }),
            ],
        },
        Row {
            state: "x^2y^4",
            r: 2,
            t: 4,
            digits: 1..=1,
            forms: vec![
                e!("sum", move |_: u32| xy(sum(&|k| mul(bb(q - 1 - k, k), bb(q - 1, k + 2))))),
                e!("a_{p-1} xy", move |_: u32| xy(a_pm1)),
            ],
        },
        // At p = 5 the digit 3 is also p - 2; the row for d = p - 2 governs it.
        Row { state: "x^2y^4", r: 2, t: 4, digits: 2..=3.min(q - 3), forms: vec![e!("0", move |_: u32| BiPoly::zero())] },
        Row {
            state: "x^2y^4",
            r: 2,
            t: 4,
            digits: 4..=q - 3,
            forms: vec![e!("sum", move |d: u32| {
                let d = d as i64;
                c(mul(sum(&|k| mul(bb(q - 1 - k, d - 2 - 2 * k), bb(d - 2, k + 2))), sign(d)))
            })],
        },
        Row {
            state: "x^2y^4",
            r: 2,
            t: 4,
            digits: q - 2..=q - 2,
            forms: vec![e!("sum", move |_: u32| with_xy(neg(sum(&|k| mul(bb(q - 1 - k, k + 3), bb(q - 4, k + 2)))), 1))],
        },
        Row {
            state: "x^2y^4",
            r: 2,
            t: 4,
            digits: q - 1..=q - 1,
            forms: vec![
                e!("sum", move |_: u32| with_xy(sum(&|k| mul(bb(q - 1 - k, k + 2), bb(q - 3, k + 2))), -1)),
                e!("(c_{p+1} + 3b_{p+1} + 2a_{p+1} - 2)/2", move |_: u32| {
                    let inner = sub(add(add(c_p1, mul(three, b_p1)), mul(two, a_p1)), two);
                    with_xy(mul(half, inner), -1)
                }),
            ],
        },
    ]
}

/// A table cell that disagrees with the generic Cartier pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMismatch {
    pub state: &'static str,
    pub digit: u32,
    pub form: &'static str,
    pub expected: String,
    pub found: String,
}

pub fn table23_mismatches(p: Prime) -> Vec<CellMismatch> {
    let kernel = CartierKernel::new(p);
    let mut out = Vec::new();
    for row in rows(p) {
        let s = BiPoly::monomial(row.r, row.t, FieldElement::ONE);
        let images = kernel.images(&s);
        for d in row.digits.clone() {
            if d < 0 || d >= p.value() as i64 {
                continue;
            }
            let found = &images[d as usize];
            for (form, f) in &row.forms {
                let want = f(d as u32);
                if &want != found {
                    out.push(CellMismatch {
                        state: row.state,
                        digit: d as u32,
                        form,
                        expected: want.display(p).to_string(),
                        found: found.display(p).to_string(),
                    });
                }
            }
        }
    }
    out
}

/// Number of cells checked by [`table23_mismatches`].
pub fn table23_cells(p: Prime) -> usize {
    let q = p.value() as i64;
    rows(p)
        .iter()
        .map(|r| r.forms.len() * r.digits.clone().filter(|&d| d >= 0 && d < q).count())
        .sum()
}

/// Closed monomial formula against the generic pipeline for all `r <= 2`,
/// `t <= 4` and every digit.
pub fn monomial_formula_mismatches(p: Prime) -> Vec<(u32, u32, u32)> {
    let kernel = CartierKernel::new(p);
    let binoms = Binomials::new(p);
    let mut out = Vec::new();
    for r in 0..=2 {
        for t in 0..=4 {
            let images = kernel.images(&BiPoly::monomial(r, t, FieldElement::ONE));
            for d in 0..p.value() {
                if monomial_cartier(r, t, d, &binoms).as_ref() != Some(&images[d as usize]) {
                    out.push((r, t, d));
                }
            }
        }
    }
    out
}

/// `Σ_{d1,d2} x^d1 y^d2 Λ_{d1,d2}(a)(x^p, y^p)`.
pub fn reconstruct(a: &BiPoly, p: Prime) -> BiPoly {
    let q = p.value();
    let mut acc = BiPoly::zero();
    for d1 in 0..q {
        for d2 in 0..q {
            acc = acc.add(&a.cartier(d1, d2, p).inflate(p).shift(d1, d2), p);
        }
    }
    acc
}

/// Pascal triangle mod `p`, rows `0..=n_max`.
pub fn pascal_mod(p: u32, n_max: usize) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = vec![vec![1]];
    for n in 1..=n_max {
        let prev = &rows[n - 1];
        let mut row = vec![1u32; n + 1];
        for m in 1..n {
            row[m] = (prev[m - 1] + prev[m]) % p;
        }
        rows.push(row);
    }
    rows
}

/// Lucas binomials against Pascal's triangle for `n, m <= 500`.
pub fn lucas_mismatches(p: Prime) -> usize {
    let b = Binomials::new(p);
    let tri = pascal_mod(p.value(), 500);
    let mut bad = 0;
    for n in 0..=500usize {
        for m in 0..=500usize {
            let want = if m <= n { tri[n][m] } else { 0 };
            if b.binom(n as i64, m as i64).residue() != want {
                bad += 1;
            }
        }
    }
    bad
}

/// `C(p-1-k, l) = (-1)^l C(k+l, k) mod p` for `k + l <= p - 1`.
pub fn reflection_mismatches(p: Prime) -> usize {
    let b = Binomials::new(p);
    let q = p.value() as i64;
    let mut bad = 0;
    for k in 0..q {
        for l in 0..q - k {
            let lhs = b.binom(q - 1 - k, l);
            let mut rhs = b.binom(k + l, k);
            if l % 2 == 1 {
                rhs = p.neg(rhs);
            }
            if lhs != rhs {
                bad += 1;
            }
        }
    }
    bad
}

/// Integers `1 <= n <= limit` whose base-`p` digits are all 0 or 1.
pub fn zero_one_digit_numbers(p: u64, limit: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut frontier = vec![1u64];
    while let Some(n) = frontier.pop() {
        if n > limit {
            continue;
        }
        out.push(n);
        frontier.push(n * p);
        frontier.push(n * p + 1);
    }
    out.sort_unstable();
    out
}
