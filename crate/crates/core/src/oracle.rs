//! Brute-force Motzkin residues, independent of the automaton.
//!
//! Two unrelated routes: the division-free convolution
//! `M_{n+1} = M_n + Σ_{k<n} M_k M_{n-1-k}` (primary, sequential in `n`), and
//! the defining sum `M_n = Σ_k C(n, 2k) C_k` with `C_k = C(2k,k) - C(2k,k+1)`
//! evaluated by Lucas's theorem (cross-check, independent per `n`).

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::field::{Binomials, FieldElement, Prime};

const MAGIC: &[u8; 4] = b"MOTZ";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a Motzkin table (bad magic)")]
    BadMagic,
    #[error("unsupported table version {0}")]
    BadVersion(u32),
    #[error("table is truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("table residue {value} at index {index} is not reduced mod {modulus}")]
    Unreduced { index: usize, value: u32, modulus: u32 },
    #[error("table modulus {found} does not match requested {expected}")]
    ModulusMismatch { expected: u32, found: u32 },
}

/// `values[n] = M_n mod modulus` for `0 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotzkinTable {
    modulus: u32,
    values: Vec<u32>,
}

impl MotzkinTable {
    pub fn convolution(p: Prime, n_max: u64) -> Self {
        Self::convolution_mod(p.value(), n_max)
    }

    /// Same recurrence for an arbitrary modulus `>= 2`; it never divides,
    /// so it is also valid for 2, 3 and composite moduli.
    pub fn convolution_mod(modulus: u32, n_max: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        let len = n_max as usize + 1;
        let m = modulus as u64;
        let mut values: Vec<u32> = Vec::with_capacity(len);
        values.push(1 % modulus);
        // Narrow accumulation is exact as long as the full sum fits in u32.
        let sq = (m - 1) * (m - 1);
        let narrow = sq.saturating_mul(len as u64) < u32::MAX as u64;
        for n in 0..len - 1 {
            // Σ_{k=0}^{n-1} M_k M_{n-1-k}, folded by symmetry.
            let half = n / 2;
            let lo = &values[..half];
            let hi = &values[n - half..n];
            let mut s = if narrow {
                2 * dot_rev_u32(lo, hi) as u64
            } else {
                2 * dot_rev_u64(lo, hi, m) % m
            };
            if n % 2 == 1 {
                let mid = values[half] as u64;
                s += mid * mid;
            }
            values.push(((values[n] as u64 + s) % m) as u32);
        }
        MotzkinTable { modulus, values }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<u32> {
        self.values.get(n as usize).copied()
    }

    /// Indices grouped by residue: `classes[x]` lists every `n <= n_max`
    /// with `M_n ≡ x`.
    pub fn classify(&self) -> Vec<Vec<u64>> {
        let mut classes = vec![Vec::new(); self.modulus as usize];
        for (n, &v) in self.values.iter().enumerate() {
            classes[v as usize].push(n as u64);
        }
        classes
    }

    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.modulus as usize];
        for &v in &self.values {
            counts[v as usize] += 1;
        }
        counts
    }

    /// Little-endian: `"MOTZ"`, version, modulus, `n_max`, then one u32
    /// residue per index.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n_max = u32::try_from(self.n_max())
            .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "n_max exceeds u32"))?;
        let mut buf = Vec::with_capacity(HEADER_LEN + 4 * self.values.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&self.modulus.to_le_bytes());
        buf.extend_from_slice(&n_max.to_le_bytes());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, OracleError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() < HEADER_LEN {
            return Err(OracleError::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        if &bytes[..4] != MAGIC {
            return Err(OracleError::BadMagic);
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let version = word(4);
        if version != VERSION {
            return Err(OracleError::BadVersion(version));
        }
        let modulus = word(8);
        let n_max = word(12) as usize;
        let expected = HEADER_LEN + 4 * (n_max + 1);
        if bytes.len() != expected {
            return Err(OracleError::Truncated {
                expected,
                found: bytes.len(),
            });
        }
        let values: Vec<u32> = (0..=n_max).map(|i| word(HEADER_LEN + 4 * i)).collect();
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v >= modulus) {
            return Err(OracleError::Unreduced { index, value, modulus });
        }
        Ok(MotzkinTable { modulus, values })
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        self.write_to(io::BufWriter::new(fs::File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self, OracleError> {
        Self::read_from(io::BufReader::new(fs::File::open(path)?))
    }

    /// Loads `dir/motzkin-p{p}-n{n_max}.bin` if it is present and valid,
    /// otherwise computes the table and writes it there.
    pub fn cached(dir: &Path, modulus: u32, n_max: u64) -> Result<Self, OracleError> {
        let path = cache_path(dir, modulus, n_max);
        if let Ok(t) = Self::load(&path) {
            if t.modulus == modulus && t.n_max() == n_max {
                return Ok(t);
            }
        }
        let t = Self::convolution_mod(modulus, n_max);
        t.save(&path)?;
        Ok(t)
    }
}

pub fn cache_path(dir: &Path, modulus: u32, n_max: u64) -> PathBuf {
    dir.join(format!("motzkin-p{modulus}-n{n_max}.bin"))
}

// Σ lo[i] * hi[hi.len()-1-i]; caller guarantees no u32 overflow.
fn dot_rev_u32(lo: &[u32], hi: &[u32]) -> u32 {
    lo.iter().zip(hi.iter().rev()).map(|(&a, &b)| a * b).sum()
}

fn dot_rev_u64(lo: &[u32], hi: &[u32], m: u64) -> u64 {
    // Each product is below 2^40, so 2^23 of them cannot overflow.
    const CHUNK: usize = 1 << 23;
    let mut acc = 0u64;
    for (a, b) in lo.chunks(CHUNK).zip(hi.rchunks(CHUNK)) {
        let s: u64 = a.iter().zip(b.iter().rev()).map(|(&x, &y)| x as u64 * y as u64).sum();
        acc = (acc + s % m) % m;
    }
    acc
}

/// `M_n mod p` from the defining binomial sum.
pub fn motzkin_binomial(binoms: &Binomials, n: u64) -> FieldElement {
    let p = binoms.prime();
    let n = n as i64;
    let mut acc = FieldElement::ZERO;
    let mut k = 0i64;
    while 2 * k <= n {
        let catalan = p.sub(binoms.binom(2 * k, k), binoms.binom(2 * k, k + 1));
        acc = p.add(acc, p.mul(binoms.binom(n, 2 * k), catalan));
        k += 1;
    }
    acc
}
