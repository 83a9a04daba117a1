//! Segmented odd-only sieve of Eratosthenes and the ascending prime-power
//! stream that feeds the Stieltjes sums over `dJ(x)`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest exclusive upper bound the sieve accepts.
pub const MAX_SIEVE_BOUND: u64 = 1 << 32;

/// Default number of integers covered by one sieve segment.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 20;

/// Environment variable naming a directory for sieve cache files.
pub const CACHE_ENV: &str = "PRIME_SPECTRUM_CACHE";

const CACHE_MAGIC: &[u8; 5] = b"PSPC1";

/// Half-open integer range `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if hi < lo {
            return Err(Error::domain(format!("range [{lo}, {hi}) has hi < lo")));
        }
        Ok(Self { lo, hi })
    }

    /// `[2, x + 1)`, i.e. everything up to and including `x`.
    pub fn up_to(x: u64) -> Self {
        Self {
            lo: 2.min(x + 1),
            hi: x + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// One prime power `base^exponent`, carrying the jump `1/exponent` of `J(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub value: u64,
    pub base: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn weight(&self) -> Ratio<u64> {
        Ratio::new(1, u64::from(self.exponent))
    }

    #[inline]
    pub fn weight_as<T: Real>(&self) -> T {
        T::one() / T::of_u64(u64::from(self.exponent))
    }
}

/// Sieve configuration.
#[derive(Debug, Clone, Copy)]
pub struct Sieve {
    segment_len: u64,
}

impl Default for Sieve {
    fn default() -> Self {
        Self {
            segment_len: DEFAULT_SEGMENT_LEN,
        }
    }
}

impl Sieve {
    /// Segment length is rounded up to an even number of at least 64.
    pub fn with_segment_len(segment_len: u64) -> Self {
        let len = segment_len.max(64);
        Self {
            segment_len: len + (len & 1),
        }
    }

    pub fn segment_len(&self) -> u64 {
        self.segment_len
    }

    /// All primes in `range`, ascending. Segments are sieved on the current
    /// rayon pool and concatenated in order.
    pub fn primes_in(&self, range: PrimeRange) -> Result<Vec<u64>> {
        if range.hi > MAX_SIEVE_BOUND {
            return Err(Error::Capacity(format!("sieve bound {} exceeds {}", range.hi, MAX_SIEVE_BOUND)));
        }
        let lo = range.lo.max(2);
        let hi = range.hi;
        if hi <= lo {
            return Ok(Vec::new());
        }
        let base = small_odd_primes(isqrt(hi - 1));
        let seg = self.segment_len;
        let n_seg = (hi - lo).div_ceil(seg);
        let parts: Vec<Vec<u64>> = (0..n_seg)
            .into_par_iter()
            .map(|k| {
                let a = lo + k * seg;
                let b = (a + seg).min(hi);
                sieve_odd_segment(a, b, &base)
            })
            .collect();
        let mut out = Vec::with_capacity(parts.iter().map(Vec::len).sum::<usize>() + 1);
        if lo <= 2 && hi > 2 {
            out.push(2);
        }
        for p in parts {
            out.extend(p);
        }
        Ok(out)
    }
}

/// Ascending primes in `[lo, hi)` with the default segment size.
pub fn sieve_segment(range: PrimeRange) -> Result<Vec<u64>> {
    Sieve::default().primes_in(range)
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Odd primes up to and including `limit`, by a plain sieve.
fn small_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// Odd primes in `[a, b)`; `base` holds the odd primes up to `sqrt(b - 1)`.
fn sieve_odd_segment(a: u64, b: u64, base: &[u64]) -> Vec<u64> {
    // Index i represents the odd number first + 2i.
    let first = if a.is_multiple_of(2) { a + 1 } else { a };
    if first >= b {
        return Vec::new();
    }
    let count = ((b - first).div_ceil(2)) as usize;
    let mut composite = vec![false; count];
    for &p in base {
        let pp = p * p;
        if pp >= b {
            break;
        }
        let mut start = if pp >= first {
            pp
        } else {
            let m = first.div_ceil(p) * p;
            if m % 2 == 0 {
                m + p
            } else {
                m
            }
        };
        while start < b {
            composite[((start - first) / 2) as usize] = true;
            start += 2 * p;
        }
    }
    let mut out = Vec::new();
    for (i, &c) in composite.iter().enumerate() {
        let v = first + 2 * i as u64;
        if !c && v > 1 {
            out.push(v);
        }
    }
    out
}

/// Ascending stream of every prime power `p^n <= x_max`, produced by a k-way
/// merge of the per-exponent streams `{p^n : p <= x_max^(1/n)}`.
#[derive(Debug, Clone)]
pub struct PrimePowerStream {
    primes: Arc<[u64]>,
    x_max: u64,
    heap: BinaryHeap<Reverse<(u64, u32, usize)>>,
}

impl PrimePowerStream {
    /// Builds the stream from an ascending prime table that covers `x_max`.
    pub fn from_primes(primes: Arc<[u64]>, x_max: u64) -> Self {
        let mut heap = BinaryHeap::new();
        if let Some(&p) = primes.first() {
            let mut n = 1u32;
            while let Some(v) = p.checked_pow(n) {
                if v > x_max {
                    break;
                }
                heap.push(Reverse((v, n, 0)));
                n += 1;
            }
        }
        Self { primes, x_max, heap }
    }
}

impl Iterator for PrimePowerStream {
    type Item = PrimePower;

    fn next(&mut self) -> Option<PrimePower> {
        let Reverse((value, exponent, idx)) = self.heap.pop()?;
        let base = self.primes[idx];
        if let Some(&next) = self.primes.get(idx + 1) {
            if let Some(v) = next.checked_pow(exponent) {
                if v <= self.x_max {
                    self.heap.push(Reverse((v, exponent, idx + 1)));
                }
            }
        }
        Some(PrimePower { value, base, exponent })
    }
}

/// All prime powers up to `x_max`, ascending. Empty for `x_max < 2`.
pub fn prime_power_stream(x_max: u64) -> Result<PrimePowerStream> {
    let primes: Arc<[u64]> = if x_max < 2 {
        Arc::from(Vec::new())
    } else {
        sieve_segment(PrimeRange::up_to(x_max))?.into()
    };
    Ok(PrimePowerStream::from_primes(primes, x_max))
}

/// Serializes `primes` (ascending, all inside `range`) in the cache format:
/// magic `PSPC1`, then little-endian u64 `lo`, `hi`, `count`, followed by
/// `count` little-endian u64 deltas (the first taken from `lo`).
pub fn encode_cache(range: PrimeRange, primes: &[u64]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(29 + 8 * primes.len());
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&range.lo.to_le_bytes());
    buf.extend_from_slice(&range.hi.to_le_bytes());
    buf.extend_from_slice(&(primes.len() as u64).to_le_bytes());
    let mut prev = range.lo;
    for &p in primes {
        buf.extend_from_slice(&(p - prev).to_le_bytes());
        prev = p;
    }
    buf
}

pub fn decode_cache(bytes: &[u8]) -> Result<(PrimeRange, Vec<u64>)> {
    let header = 5 + 24;
    if bytes.len() < header || &bytes[..5] != CACHE_MAGIC {
        return Err(Error::Format("missing PSPC1 header".into()));
    }
    let word = |off: usize| u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    let range = PrimeRange::new(word(5), word(13)).map_err(|e| Error::Format(e.to_string()))?;
    let count = word(21) as usize;
    if bytes.len() != header + 8 * count {
        return Err(Error::Format(format!(
            "expected {} bytes for {count} primes, found {}",
            header + 8 * count,
            bytes.len()
        )));
    }
    let mut primes = Vec::with_capacity(count);
    let mut prev = range.lo;
    for i in 0..count {
        let p = prev
            .checked_add(word(header + 8 * i))
            .ok_or_else(|| Error::Format("delta overflow".into()))?;
        if p >= range.hi || (i > 0 && p <= prev) {
            return Err(Error::Format(format!("prime {p} out of order or range")));
        }
        primes.push(p);
        prev = p;
    }
    Ok((range, primes))
}

pub fn write_cache(path: &Path, range: PrimeRange, primes: &[u64]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_cache(range, primes))?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<(PrimeRange, Vec<u64>)> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_cache(&bytes)
}

fn cache_file(dir: &Path, range: PrimeRange) -> PathBuf {
    dir.join(format!("primes_{}_{}.pspc", range.lo, range.hi))
}

/// Primes in `range`, going through the cache directory named by
/// `PRIME_SPECTRUM_CACHE` when it is set. A missing or unreadable cache entry
/// falls back to sieving (and the result is written back best-effort).
pub fn cached_primes(range: PrimeRange) -> Result<Vec<u64>> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) => primes_with_cache_dir(Path::new(&dir), range),
        None => sieve_segment(range),
    }
}

pub fn primes_with_cache_dir(dir: &Path, range: PrimeRange) -> Result<Vec<u64>> {
    let path = cache_file(dir, range);
    if let Ok((r, primes)) = read_cache(&path) {
        if r == range {
            return Ok(primes);
        }
    }
    let primes = sieve_segment(range)?;
    if fs::create_dir_all(dir).is_ok() {
        let _ = write_cache(&path, range, &primes);
    }
    Ok(primes)
}
