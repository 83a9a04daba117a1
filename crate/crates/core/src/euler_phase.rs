//! Phase of the truncated Euler product and its windowed t-difference.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::summation::ordered_sum;

/// Largest truncation order the integration-by-parts series accepts.
pub const MAX_J: usize = 8;
/// Truncation order used unless configured otherwise.
pub const DEFAULT_J: usize = 3;

/// Parameters of one windowed phase-variation evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumParams<T = f64> {
    pub t: T,
    pub eps: T,
    /// Window scale: the t-window is `[t - pi/ln p*, t + pi/ln p*]`.
    pub p_star: u64,
    /// Largest prime (or prime power) included.
    pub p_max: u64,
    pub j_max: usize,
}

impl<T: Real> SpectrumParams<T> {
    pub fn new(t: T, eps: T, p_star: u64, p_max: u64, j_max: usize) -> Result<Self> {
        let p = Self {
            t,
            eps,
            p_star,
            p_max,
            j_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eps.is_finite() || self.eps <= -T::half() {
            return Err(Error::BranchSafety { eps: self.eps.as_f64() });
        }
        if self.p_star < 11 {
            return Err(Error::domain(format!("p_star must be at least 11, got {}", self.p_star)));
        }
        if !(self.t > T::TAU()) {
            return Err(Error::domain(format!("t must exceed 2 pi, got {}", self.t)));
        }
        if !(self.half_width() < self.t) {
            return Err(Error::domain("window half-width pi/ln p* must be below t"));
        }
        if self.j_max == 0 || self.j_max > MAX_J {
            return Err(Error::TruncationValidity {
                j_max: self.j_max,
                t: self.t.as_f64(),
            });
        }
        Ok(())
    }

    pub fn sigma(&self) -> T {
        T::half() + self.eps
    }

    pub fn ln_p_star(&self) -> T {
        T::of_u64(self.p_star).ln()
    }

    /// `delta = pi / ln p*`.
    pub fn half_width(&self) -> T {
        T::PI() / self.ln_p_star()
    }

    /// Prefactor `ln p* / 2 pi = 1 / (2 delta)`.
    pub fn window_scale(&self) -> T {
        self.ln_p_star() / T::TAU()
    }

    pub fn with_t(mut self, t: T) -> Self {
        self.t = t;
        self
    }

    pub fn with_eps(mut self, eps: T) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_p_max(mut self, p_max: u64) -> Self {
        self.p_max = p_max;
        self
    }
}

fn check_branch<T: Real>(eps: T) -> Result<()> {
    if !eps.is_finite() || eps <= -T::half() {
        return Err(Error::BranchSafety { eps: eps.as_f64() });
    }
    Ok(())
}

/// `sum_p atan2(-sin(t ln p), p^(1/2+eps) - cos(t ln p))` over the ascending
/// slice `primes`, accumulated in fixed chunks.
pub fn euler_phase_sum<T: Real>(t: T, eps: T, primes: &[u64]) -> Result<T> {
    check_branch(eps)?;
    debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
    let sigma = T::half() + eps;
    Ok(ordered_sum(primes.len(), |i| {
        let lp = T::of_u64(primes[i]).ln();
        let (s, c) = (t * lp).sin_cos();
        (-s).atan2((sigma * lp).exp() - c)
    }))
}

/// Ascending primes with their logarithms, shared by every evaluation of an
/// engine.
#[derive(Debug, Clone)]
pub struct PrimeTable<T = f64> {
    primes: Arc<[u64]>,
    ln_p: Arc<[T]>,
}

impl<T: Real> PrimeTable<T> {
    pub fn new(primes: Arc<[u64]>) -> Self {
        let ln_p: Arc<[T]> = primes.iter().map(|&p| T::of_u64(p).ln()).collect();
        Self { primes, ln_p }
    }

    pub fn primes(&self) -> &Arc<[u64]> {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of primes `<= x`.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn largest(&self) -> Option<u64> {
        self.primes.last().copied()
    }
}

/// Per-prime factors of the windowed difference for fixed `eps` and `p*`:
/// `p^sigma` and the rotation by `delta ln p`. Evaluating a `t` then costs one
/// `sin_cos` and one `atan2` per prime.
#[derive(Debug, Clone)]
pub struct WindowedKernel<T = f64> {
    ln_p: Arc<[T]>,
    pow_sigma: Vec<T>,
    cos_d: Vec<T>,
    sin_d: Vec<T>,
    scale: T,
}

impl<T: Real> WindowedKernel<T> {
    /// Kernel over the first `count` primes of `table`.
    pub fn new(table: &PrimeTable<T>, eps: T, p_star: u64, count: usize) -> Result<Self> {
        check_branch(eps)?;
        let sigma = T::half() + eps;
        let ln_ps = T::of_u64(p_star).ln();
        let delta = T::PI() / ln_ps;
        let n = count.min(table.len());
        let mut pow_sigma = Vec::with_capacity(n);
        let mut cos_d = Vec::with_capacity(n);
        let mut sin_d = Vec::with_capacity(n);
        for &lp in &table.ln_p[..n] {
            pow_sigma.push((sigma * lp).exp());
            let (s, c) = (delta * lp).sin_cos();
            sin_d.push(s);
            cos_d.push(c);
        }
        Ok(Self {
            ln_p: table.ln_p.clone(),
            pow_sigma,
            cos_d,
            sin_d,
            scale: ln_ps / T::TAU(),
        })
    }

    pub fn len(&self) -> usize {
        self.pow_sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pow_sigma.is_empty()
    }

    /// Phase difference `phi_p(t + delta) - phi_p(t - delta)` of prime `i`.
    #[inline]
    pub fn term(&self, t: T, i: usize) -> T {
        let (s, c) = (t * self.ln_p[i]).sin_cos();
        let (sd, cd) = (self.sin_d[i], self.cos_d[i]);
        let q = self.pow_sigma[i];
        let s_hi = s * cd + c * sd;
        let c_hi = c * cd - s * sd;
        let s_lo = s * cd - c * sd;
        let c_lo = c * cd + s * sd;
        let (y2, x2) = (-s_hi, q - c_hi);
        let (y1, x1) = (-s_lo, q - c_lo);
        (y2 * x1 - x2 * y1).atan2(x1 * x2 + y1 * y2)
    }

    /// Windowed difference over the first `count` primes.
    pub fn sum_delta(&self, t: T, count: usize) -> T {
        let n = count.min(self.len());
        self.scale * ordered_sum(n, |i| self.term(t, i))
    }

    pub fn scale(&self) -> T {
        self.scale
    }
}

/// `(ln p* / 2 pi) [phi(t + delta) - phi(t - delta)]` with `phi` the Euler
/// phase truncated at `p_max`; the two phases are differenced prime by prime.
pub fn windowed_sum_delta<T: Real>(params: &SpectrumParams<T>, primes: &[u64]) -> Result<T> {
    params.validate()?;
    let n = primes.partition_point(|&p| p <= params.p_max);
    let table = PrimeTable::new(Arc::from(&primes[..n]));
    let kernel = WindowedKernel::new(&table, params.eps, params.p_star, n)?;
    Ok(kernel.sum_delta(params.t, n))
}
