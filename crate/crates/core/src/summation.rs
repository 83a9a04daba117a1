//! Compensated accumulation with a fixed chunk structure.
//!
//! The Euler-phase and Stieltjes sums are only conditionally convergent on
//! and left of the critical line, so the order in which terms are combined
//! is part of the result. Every sum in the crate is split into consecutive
//! chunks of [`CHUNK_LEN`] terms; each chunk is accumulated sequentially from
//! zero and the chunk results are merged strictly in ascending order. A
//! parallel evaluation, a sequential one and an incremental one all perform
//! the identical sequence of floating-point operations.

use rayon::prelude::*;

use crate::scalar::Real;

/// Number of terms per chunk.
pub const CHUNK_LEN: usize = 1 << 16;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in after everything already accumulated.
    #[inline]
    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sums `term(i)` for `i in 0..n` with the fixed chunk structure, evaluating
/// chunks on the current rayon pool.
pub fn ordered_sum<T, F>(n: usize, term: F) -> T
where
    T: Real,
    F: Fn(usize) -> T + Sync,
{
    let n_chunks = n.div_ceil(CHUNK_LEN);
    let partials: Vec<CompensatedSum<T>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK_LEN;
            let hi = (lo + CHUNK_LEN).min(n);
            (lo..hi).map(&term).collect()
        })
        .collect();
    combine(&partials)
}

/// Same as [`ordered_sum`] but on the calling thread only.
pub fn ordered_sum_sequential<T, F>(n: usize, term: F) -> T
where
    T: Real,
    F: Fn(usize) -> T,
{
    let mut acc = ChunkedAccumulator::new();
    for i in 0..n {
        acc.push(term(i));
    }
    acc.value()
}

fn combine<T: Real>(partials: &[CompensatedSum<T>]) -> T {
    let mut total = CompensatedSum::new();
    for p in partials {
        total.merge(p);
    }
    total.value()
}

/// Streaming form of the chunked sum: terms are pushed one at a time and the
/// value can be read at any point. Reading after `k` pushes gives exactly the
/// value [`ordered_sum`] would return for the first `k` terms.
#[derive(Debug, Clone, Default)]
pub struct ChunkedAccumulator<T> {
    total: CompensatedSum<T>,
    current: CompensatedSum<T>,
    in_chunk: usize,
    count: usize,
}

impl<T: Real> ChunkedAccumulator<T> {
    pub fn new() -> Self {
        Self {
            total: CompensatedSum::new(),
            current: CompensatedSum::new(),
            in_chunk: 0,
            count: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, x: T) {
        self.current.add(x);
        self.in_chunk += 1;
        self.count += 1;
        if self.in_chunk == CHUNK_LEN {
            self.total.merge(&self.current);
            self.current = CompensatedSum::new();
            self.in_chunk = 0;
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn value(&self) -> T {
        let mut t = self.total;
        if self.in_chunk > 0 {
            t.merge(&self.current);
        }
        t.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compensation_recovers_lost_bits() {
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..10_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(ordered_sum::<f64, _>(0, |_| 1.0), 0.0);
        assert_eq!(ChunkedAccumulator::<f64>::new().value(), 0.0);
    }

    proptest! {
        #[test]
        fn parallel_sequential_and_streaming_agree_bitwise(seed in 0u64..1000, n in 0usize..200_000) {
            let term = |i: usize| {
                let x = (i as f64 + seed as f64 * 0.37).sin();
                x / (1.0 + i as f64).sqrt()
            };
            let par = ordered_sum(n, term);
            let seq = ordered_sum_sequential(n, term);
            prop_assert_eq!(par.to_bits(), seq.to_bits());
        }
    }

    #[test]
    fn streaming_snapshots_match_prefix_sums() {
        let term = |i: usize| ((i * 7919) % 1000) as f64 * 1e-3 - 0.5;
        let mut acc = ChunkedAccumulator::new();
        for i in 0..(3 * CHUNK_LEN + 17) {
            acc.push(term(i));
            let k = i + 1;
            if k % 40_000 == 0 || k == CHUNK_LEN || k == 2 * CHUNK_LEN + 1 {
                assert_eq!(acc.value().to_bits(), ordered_sum(k, term).to_bits());
            }
        }
    }
}
