//! Arithmetic in GF(p) for primes `5 <= p < 2^20`, plus binomial
//! coefficients modulo `p` via Lucas's theorem.

use std::fmt;

use thiserror::Error;

/// Exclusive upper bound on supported primes.
pub const MAX_PRIME: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is not supported; p must be at least 5")]
    TooSmall(u64),
    #[error("prime {0} is not supported; p must be below {MAX_PRIME}")]
    TooLarge(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// Residue of `p` modulo 6. Every prime `p >= 5` is `+1` or `-1` mod 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class6 {
    PlusOne,
    MinusOne,
}

impl Class6 {
    pub fn sign(self) -> i64 {
        match self {
            Class6::PlusOne => 1,
            Class6::MinusOne => -1,
        }
    }
}

impl fmt::Display for Class6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class6::PlusOne => f.write_str("+1"),
            Class6::MinusOne => f.write_str("-1"),
        }
    }
}

/// Trial division; adequate for everything below [`MAX_PRIME`] and the
/// small moduli used by the classical checks.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A validated prime `p` with `5 <= p < 2^20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime {
    value: u32,
    class6: Class6,
}

impl Prime {
    pub fn new(value: u64) -> Result<Self, FieldError> {
        if !is_prime(value) {
            return Err(FieldError::NotPrime(value));
        }
        if value < 5 {
            return Err(FieldError::TooSmall(value));
        }
        if value >= MAX_PRIME {
            return Err(FieldError::TooLarge(value));
        }
        let class6 = if value % 6 == 1 {
            Class6::PlusOne
        } else {
            Class6::MinusOne
        };
        Ok(Prime {
            value: value as u32,
            class6,
        })
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn class6(self) -> Class6 {
        self.class6
    }

    #[inline]
    fn m(self) -> u64 {
        self.value as u64
    }

    /// Reduces any signed integer into `[0, p-1]`.
    #[inline]
    pub fn reduce(self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.value as i64) as u32)
    }

    #[inline]
    pub fn reduce_i128(self, v: i128) -> FieldElement {
        FieldElement(v.rem_euclid(self.value as i128) as u32)
    }

    #[inline]
    pub fn add(self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 as u64 + b.0 as u64;
        FieldElement((s % self.m()) as u32)
    }

    #[inline]
    pub fn sub(self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 as u64 + self.m() - b.0 as u64;
        FieldElement((s % self.m()) as u32)
    }

    #[inline]
    pub fn mul(self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement((a.0 as u64 * b.0 as u64 % self.m()) as u32)
    }

    #[inline]
    pub fn neg(self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.value - a.0)
        }
    }

    pub fn pow(self, a: FieldElement, mut e: u64) -> FieldElement {
        let m = self.m();
        let mut base = a.0 as u64 % m;
        let mut acc = 1u64 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        FieldElement(acc as u32)
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.value as i64, a.0 as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(t0))
    }

    /// Base-`p` digits of `n`, least significant first. Zero has no digits.
    pub fn digits(self, mut n: u64) -> Vec<u32> {
        let mut out = Vec::new();
        while n > 0 {
            out.push((n % self.m()) as u32);
            n /= self.m();
        }
        out
    }

    /// Representative in `(-p/2, p/2]`, for printing.
    pub fn symmetric(self, a: FieldElement) -> i64 {
        let v = a.0 as i64;
        if v > self.value as i64 / 2 {
            v - self.value as i64
        } else {
            v
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A residue in `[0, p-1]`. The modulus is carried by context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a residue that is already reduced. Callers must guarantee
    /// `residue < p`; use [`Prime::reduce`] otherwise.
    #[inline]
    pub const fn from_reduced(residue: u32) -> Self {
        FieldElement(residue)
    }

    #[inline]
    pub fn residue(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Factorial tables for one prime, answering `C(n, m) mod p` digit-wise.
#[derive(Debug, Clone)]
pub struct Binomials {
    prime: Prime,
    fact: Vec<u32>,
    inv_fact: Vec<u32>,
}

impl Binomials {
    pub fn new(prime: Prime) -> Self {
        let p = prime.value() as usize;
        let mut fact = vec![1u32; p];
        for i in 1..p {
            fact[i] = prime
                .mul(FieldElement(fact[i - 1]), FieldElement(i as u32))
                .0;
        }
        let mut inv_fact = vec![1u32; p];
        inv_fact[p - 1] = prime
            .inv(FieldElement(fact[p - 1]))
            .expect("(p-1)! is a unit")
            .0;
        for i in (1..p).rev() {
            inv_fact[i - 1] = prime
                .mul(FieldElement(inv_fact[i]), FieldElement(i as u32))
                .0;
        }
        Binomials {
            prime,
            fact,
            inv_fact,
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    #[inline]
    fn small(&self, n: u64, m: u64) -> u64 {
        if m > n {
            return 0;
        }
        let p = self.prime.m();
        self.fact[n as usize] as u64 * self.inv_fact[m as usize] as u64 % p
            * self.inv_fact[(n - m) as usize] as u64
            % p
    }

    /// `C(n, m) mod p`, zero whenever `m < 0`, `n < 0` or `m > n`.
    pub fn binom(&self, n: i64, m: i64) -> FieldElement {
        if n < 0 || m < 0 || m > n {
            return FieldElement::ZERO;
        }
        let p = self.prime.m();
        let (mut n, mut m) = (n as u64, m as u64);
        let mut acc = 1u64;
        while m > 0 {
            let c = self.small(n % p, m % p);
            if c == 0 {
                return FieldElement::ZERO;
            }
            acc = acc * c % p;
            n /= p;
            m /= p;
        }
        FieldElement(acc as u32)
    }
}
