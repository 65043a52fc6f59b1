//! The auxiliary sums
//!
//! ```text
//! a_n = Σ_k (-1)^k C(n-k, k)
//! b_n = Σ_k (-1)^k C(n-k, k) k
//! c_n = Σ_k (-1)^k C(n-k, k) k^2
//! ```
//!
//! computed three ways (difference equations, period-6 closed forms, and
//! the defining sums over exact big integers), together with the integer
//! identities on `a_p, b_p, c_p, ...` that the automaton derivations use.

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::field::{Class6, Prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeriesValue {
    pub n: u64,
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

/// Terms `0..=n_max` from `a_{n+1} = a_n - a_{n-1}`,
/// `b_{n+1} = b_n - b_{n-1} - a_{n-1}`,
/// `c_{n+1} = c_n - c_{n-1} - a_{n-1} - 2 b_{n-1}`.
pub fn series_recurrence(n_max: u64) -> Vec<SeriesValue> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(SeriesValue { n: 0, a: 1, b: 0, c: 0 });
    if n_max == 0 {
        return out;
    }
    out.push(SeriesValue { n: 1, a: 1, b: 0, c: 0 });
    for n in 1..n_max {
        let (cur, prev) = (out[n as usize], out[n as usize - 1]);
        out.push(SeriesValue {
            n: n + 1,
            a: cur.a - prev.a,
            b: cur.b - prev.b - prev.a,
            c: cur.c - prev.c - prev.a - 2 * prev.b,
        });
    }
    out
}

fn exact_div(num: i128, den: i128) -> i128 {
    assert!(num % den == 0, "{num} is not divisible by {den}");
    num / den
}

/// Closed forms, one case per residue of `n` mod 6.
pub fn series_closed(n: u64) -> SeriesValue {
    let m = n as i128;
    let (a, b, c) = match n % 6 {
        0 => (1, exact_div(2 * m, 3), exact_div(m * (m - 1), 3)),
        1 => (1, exact_div(m - 1, 3), -exact_div(m - 1, 3)),
        2 => (0, -exact_div(m + 1, 3), -exact_div(m * m - 1, 3)),
        3 => (-1, -exact_div(2 * m, 3), -exact_div(m * (m - 1), 3)),
        4 => (-1, -exact_div(m - 1, 3), exact_div(m - 1, 3)),
        _ => (0, exact_div(m + 1, 3), exact_div(m * m - 1, 3)),
    };
    SeriesValue { n, a, b, c }
}

fn signed_sums_to_value(n: u64, a: BigInt, b: BigInt, c: BigInt) -> SeriesValue {
    let fit = |v: BigInt| v.to_i128().unwrap_or_else(|| panic!("series value at n = {n} exceeds i128"));
    SeriesValue {
        n,
        a: fit(a),
        b: fit(b),
        c: fit(c),
    }
}

/// The defining sums for a single `n`, with exact binomials.
pub fn series_def_bruteforce(n: u64) -> SeriesValue {
    let (mut a, mut b, mut c) = (BigInt::zero(), BigInt::zero(), BigInt::zero());
    // binom = C(n-k, k)
    let mut binom = BigUint::one();
    let mut k = 0u64;
    while 2 * k <= n {
        let term = BigInt::from(binom.clone());
        let (tk, tk2) = (&term * k, &term * (k * k));
        if k.is_multiple_of(2) {
            a += term;
            b += tk;
            c += tk2;
        } else {
            a -= term;
            b -= tk;
            c -= tk2;
        }
        if 2 * k + 2 > n {
            break;
        }
        binom *= (n - 2 * k) * (n - 2 * k - 1);
        binom /= (k + 1) * (n - k);
        k += 1;
    }
    signed_sums_to_value(n, a, b, c)
}

/// The defining sums for every `n <= n_max`, building `C(n-k, k)` row by
/// row from `C(n-k, k) = C(n-1-k, k) + C(n-2-(k-1), k-1)`.
///
/// Writing `k = 64 q + j`, each block of 64 consecutive `k` contributes
/// `X_q = Σ x_k`, `Y_q = Σ j x_k` and `Z_q = Σ j^2 x_k` with
/// `x_k = (-1)^k C(n-k, k)`. Then `Σ k x_k = 64 Σ q X_q + Σ Y_q` and
/// `Σ k^2 x_k = 4096 Σ q^2 X_q + 128 Σ q Y_q + Σ Z_q`, where the sums over
/// `q` come from suffix sums: with `T_q = Σ_{q'>=q} X_q'`,
/// `U = Σ_{q>=1} T_q` and `W = Σ_{q>=1} Σ_{q'>=q} T_q'`, one has
/// `Σ q X_q = U` and `Σ q^2 X_q = 2 W - U`.
pub fn series_def_bruteforce_upto(n_max: u64) -> Vec<SeriesValue> {
    assert!(n_max < 1 << 20, "n_max must stay below 2^20");
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut prev2 = LimbRow::default();
    let mut prev1 = LimbRow::default();
    let mut row = LimbRow::default();
    let mut sums = MomentSums::default();
    for n in 0..=n_max {
        let len = n as usize / 2 + 1;
        row.reset(len, prev1.widest() + 1);
        sums.clear();
        for k in (0..len).rev() {
            if n < 2 {
                row.set_one(k);
            } else {
                let a = if k < prev1.len() { prev1.get(k) } else { &[][..] };
                let b = if k >= 1 { prev2.get(k - 1) } else { &[][..] };
                row.set_sum(k, a, b);
            }
            sums.push(k, row.get(k));
        }
        let (a, b, c) = sums.finish(n);
        out.push(SeriesValue { n, a, b, c });
        std::mem::swap(&mut prev2, &mut prev1);
        std::mem::swap(&mut prev1, &mut row);
    }
    out
}

#[derive(Default)]
struct LimbRow {
    stride: usize,
    limbs: Vec<u64>,
    lens: Vec<usize>,
}

impl LimbRow {
    fn reset(&mut self, len: usize, stride: usize) {
        self.stride = stride;
        self.limbs.resize(len * stride, 0);
        self.lens.clear();
        self.lens.resize(len, 0);
    }

    fn len(&self) -> usize {
        self.lens.len()
    }

    fn widest(&self) -> usize {
        self.lens.iter().copied().max().unwrap_or(0)
    }

    fn get(&self, k: usize) -> &[u64] {
        &self.limbs[k * self.stride..k * self.stride + self.lens[k]]
    }

    fn set_one(&mut self, k: usize) {
        self.limbs[k * self.stride] = 1;
        self.lens[k] = 1;
    }

    fn set_sum(&mut self, k: usize, a: &[u64], b: &[u64]) {
        let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let dst = &mut self.limbs[k * self.stride..(k + 1) * self.stride];
        let mut carry = false;
        for ((d, &x), &y) in dst.iter_mut().zip(long).zip(short) {
            (*d, carry) = adc(x, y, carry);
        }
        for (d, &x) in dst[short.len()..].iter_mut().zip(&long[short.len()..]) {
            (*d, carry) = adc(x, 0, carry);
        }
        let mut n = long.len();
        if carry {
            dst[n] = 1;
            n += 1;
        }
        self.lens[k] = n;
    }
}

#[inline(always)]
fn adc(a: u64, b: u64, carry: bool) -> (u64, bool) {
    let (s, c1) = a.overflowing_add(b);
    let (s, c2) = s.overflowing_add(carry as u64);
    (s, c1 | c2)
}

const BLOCK: usize = 64;
const DIGIT_BITS: u32 = 32;
const DIGIT_MASK: i64 = (1 << DIGIT_BITS) - 1;

// Little-endian base-2^32 digits held in 64-bit words with deferred carries.
// Block sums are split by the parity of k so the weights stay unsigned; their
// digits stay below 2^38, 2^44 and 2^50 within a block.
#[derive(Default)]
struct MomentSums {
    block: Option<usize>,
    even: [Vec<u64>; 3],
    odd: [Vec<u64>; 3],
    tx: Vec<i64>,
    ux: Vec<i64>,
    wx: Vec<i64>,
    ty: Vec<i64>,
    uy: Vec<i64>,
    tz: Vec<i64>,
}

impl MomentSums {
    fn clear(&mut self) {
        self.block = None;
        for acc in self.even.iter_mut().chain(self.odd.iter_mut()) {
            acc.clear();
        }
        for acc in self.chains() {
            acc.clear();
        }
    }

    fn chains(&mut self) -> [&mut Vec<i64>; 6] {
        [&mut self.tx, &mut self.ux, &mut self.wx, &mut self.ty, &mut self.uy, &mut self.tz]
    }

    // Entries arrive with k descending.
    fn push(&mut self, k: usize, v: &[u64]) {
        let q = k / BLOCK;
        if self.block != Some(q) {
            if let Some(prev) = self.block {
                self.flush(prev);
            }
            self.block = Some(q);
        }
        let d = digits(v);
        if d.len() + 2 > self.tx.len() {
            let width = d.len() + 2;
            for acc in self.even.iter_mut().chain(self.odd.iter_mut()) {
                acc.resize(width, 0);
            }
            for acc in self.chains() {
                acc.resize(width, 0);
            }
        }
        let j = (k % BLOCK) as u32;
        let [x, y, z] = if k % 2 == 1 { &mut self.odd } else { &mut self.even };
        weighted_add(&mut x[..d.len()], &mut y[..d.len()], &mut z[..d.len()], d, j);
    }

    fn flush(&mut self, q: usize) {
        let width = self.tx.len();
        let mut block = [vec![0i64; width], vec![0i64; width], vec![0i64; width]];
        for (acc, (e, o)) in block.iter_mut().zip(self.even.iter_mut().zip(self.odd.iter_mut())) {
            for ((a, e), o) in acc.iter_mut().zip(e.iter_mut()).zip(o.iter_mut()) {
                *a = *e as i64 - *o as i64;
                *e = 0;
                *o = 0;
            }
            normalise(acc);
        }
        let [x, y, z] = &block;
        add_into(&mut self.tx, x);
        add_into(&mut self.ty, y);
        add_into(&mut self.tz, z);
        if q >= 1 {
            add_into(&mut self.ux, &self.tx);
            add_into(&mut self.wx, &self.ux);
            add_into(&mut self.uy, &self.ty);
        }
        for acc in self.chains() {
            normalise(acc);
        }
    }

    fn finish(&mut self, n: u64) -> (i128, i128, i128) {
        if let Some(q) = self.block.take() {
            self.flush(q);
        }
        let mut b: Vec<i64> = self.ux.iter().zip(&self.ty).map(|(&u, &t)| 64 * u + t).collect();
        let mut c: Vec<i64> = (0..self.tz.len())
            .map(|i| 4096 * (2 * self.wx[i] - self.ux[i]) + 128 * self.uy[i] + self.tz[i])
            .collect();
        let a = digits_to_i128(&mut self.tx, n);
        (a, digits_to_i128(&mut b, n), digits_to_i128(&mut c, n))
    }
}

fn digits(limbs: &[u64]) -> &[u32] {
    // SAFETY: u32 has no invalid bit patterns and a u64 slice is u32-aligned.
    let (head, body, tail) = unsafe { limbs.align_to::<u32>() };
    debug_assert!(head.is_empty() && tail.is_empty());
    body
}

#[cfg(not(target_endian = "little"))]
compile_error!("the limb-to-digit view assumes a little-endian target");

// x += d, y += j d, z += j^2 d, digit by digit.
fn weighted_add(x: &mut [u64], y: &mut [u64], z: &mut [u64], d: &[u32], j: u32) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the CPU supports AVX2.
        return unsafe { weighted_add_avx2(x, y, z, d, j) };
    }
    weighted_add_portable(x, y, z, d, j)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn weighted_add_avx2(x: &mut [u64], y: &mut [u64], z: &mut [u64], d: &[u32], j: u32) {
    weighted_add_portable(x, y, z, d, j)
}

#[inline(always)]
fn weighted_add_portable(x: &mut [u64], y: &mut [u64], z: &mut [u64], d: &[u32], j: u32) {
    let (w1, w2) = (j as u64, (j * j) as u64);
    for (((x, y), z), &d) in x.iter_mut().zip(y.iter_mut()).zip(z.iter_mut()).zip(d) {
        // Digits are bounded per block, so these never wrap.
        let d = d as u64;
        *x = x.wrapping_add(d);
        *y = y.wrapping_add(w1.wrapping_mul(d));
        *z = z.wrapping_add(w2.wrapping_mul(d));
    }
}

fn add_into(acc: &mut [i64], v: &[i64]) {
    for (a, &x) in acc.iter_mut().zip(v) {
        *a += x;
    }
}

fn digits_to_i128(digits: &mut [i64], n: u64) -> i128 {
    normalise(digits);
    digits
        .iter()
        .rev()
        .try_fold(0i128, |x, &d| x.checked_mul(1 << DIGIT_BITS)?.checked_add(d as i128))
        .unwrap_or_else(|| panic!("series value at n = {n} exceeds i128"))
}

// Every digit but the last into [0, 2^32), the last keeping the sign.
fn normalise(acc: &mut [i64]) {
    let Some((last, rest)) = acc.split_last_mut() else { return };
    let mut carry = 0i64;
    for d in rest {
        let x = *d + carry;
        *d = x & DIGIT_MASK;
        carry = x >> DIGIT_BITS;
    }
    *last += carry;
}

/// One of the integer identities checked by [`check_identities`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub value: Ratio<i128>,
    pub expected: Ratio<i128>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.value == self.expected
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub p: u32,
    pub class6: Class6,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn falsified(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(IdentityCheck::holds)
    }
}

/// Evaluates the four identities on `a, b, c` near `n = p` over the
/// rationals and compares each with its class-dependent right-hand side.
pub fn check_identities(p: Prime) -> IdentityReport {
    let q = p.value() as u64;
    let s = series_recurrence(q + 2);
    let r = |v: i128| Ratio::from_integer(v);
    let half = Ratio::new(1i128, 2);
    let (am1, a0, a1) = (s[q as usize - 1].a, s[q as usize].a, s[q as usize + 1].a);
    let (b0, b1, b2) = (s[q as usize].b, s[q as usize + 1].b, s[q as usize + 2].b);
    let (c0, c1, c2) = (s[q as usize].c, s[q as usize + 1].c, s[q as usize + 2].c);
    let pi = q as i128;
    let plus = p.class6() == Class6::PlusOne;

    let checks = vec![
        IdentityCheck {
            name: "a[p-1] - 2 a[p] + 1",
            value: r(am1 - 2 * a0 + 1),
            expected: r(0),
        },
        IdentityCheck {
            name: "b[p] + c[p]",
            value: r(b0 + c0),
            expected: if plus { r(0) } else { Ratio::new(pi * (pi + 1), 3) },
        },
        IdentityCheck {
            name: "a[p] - b[p] - 1 + (b[p+1] + c[p+1])/2 - b[p+2] - c[p+2]",
            value: r(a0 - b0 - 1) + half * r(b1 + c1) - r(b2 + c2),
            expected: if plus {
                Ratio::new(pi * (pi + 5), 6)
            } else {
                Ratio::new(pi * (pi + 1), 6) - r(1)
            },
        },
        IdentityCheck {
            name: "-a[p-1] + a[p] + b[p] - 2 b[p+1] - 2 a[p+1] + 1",
            value: r(-am1 + a0 + b0 - 2 * b1 - 2 * a1 + 1),
            expected: if plus { r(pi + 2) } else { r(-pi - 1) },
        },
    ];
    IdentityReport {
        p: p.value(),
        class6: p.class6(),
        checks,
    }
}
