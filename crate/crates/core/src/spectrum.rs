//! Assembly of the windowed phase variation of `zeta(s)(s - 1)`, its
//! smoothing, sampling grids, envelope diagnostics, stabilization passes and
//! critical-line zero location.

use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::euler_phase::{PrimeTable, SpectrumParams, WindowedKernel, DEFAULT_J};
use crate::li_quadrature::li_integral;
use crate::primes::{cached_primes, PrimePower, PrimePowerStream, PrimeRange};
use crate::scalar::Real;
use crate::summation::{ordered_sum, ChunkedAccumulator, CompensatedSum};
use crate::xi_eval::{gamma_factor_phase_slope, z_approx, CriticalStripPoint};

/// One `t`-point of the assembled spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample<T = f64> {
    pub t: T,
    pub eps: T,
    pub p_star: u64,
    pub p_max: u64,
    /// Windowed Euler-product phase difference.
    pub sum_part: T,
    /// Windowed `d[Li(x)]` correction.
    pub li_part: T,
    /// `sum_part + li_part`.
    pub value: T,
    pub smoothed: Option<T>,
    /// Gamma-factor slope plus `value`: the estimate of the xi phase slope.
    pub slope_estimate: Option<T>,
    /// Set when `eps <= 0` and `t` lies within `2 pi / ln p*` of a known zero,
    /// where the estimate is not expected to hold.
    pub flagged: bool,
}

impl<T: Real> SpectrumSample<T> {
    fn assemble(params: &SpectrumParams<T>, sum_part: T, li_part: T) -> Self {
        Self {
            t: params.t,
            eps: params.eps,
            p_star: params.p_star,
            p_max: params.p_max,
            sum_part,
            li_part,
            value: sum_part + li_part,
            smoothed: None,
            slope_estimate: None,
            flagged: false,
        }
    }
}

/// Per-oscillation envelope sums over `x_lo .. x_0t(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeRecord<T = f64> {
    pub k: i64,
    /// `x_0t(k)`, where `cos(t ln x)` turns positive.
    pub x_lo: T,
    /// `x'_0t(k)`, where it turns negative again.
    pub x_hi: T,
    pub o_plus_j: T,
    pub o_minus_j: T,
    pub o_plus_li: T,
    pub o_minus_li: T,
    /// Cumulative `sum(O+_J + O+_Li) / sum(O-_J + O-_Li)` up to this record.
    pub running_ratio: T,
    /// Spectrum truncated at `x_lo` (primes and integral up to `x_lo`).
    pub value_at_lo: T,
    /// Spectrum truncated at `x_hi`.
    pub value_at_hi: T,
}

/// A located sign change of `Re Z(t, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord<T = f64> {
    pub t_star: T,
    pub bracket: (T, T),
    /// `|Z(t_star, 0)|`.
    pub residual: T,
}

/// Default grid step used when locating zeros.
pub const ZERO_GRID_STEP: f64 = 0.05;
/// Width below which zero brackets stop being bisected.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Owns the prime table every evaluation draws from.
#[derive(Debug, Clone)]
pub struct SpectrumEngine<T = f64> {
    table: PrimeTable<T>,
    limit: u64,
}

impl<T: Real> SpectrumEngine<T> {
    /// Sieves (or loads from the cache directory) all primes up to `limit`.
    pub fn new(limit: u64) -> Result<Self> {
        let primes = if limit < 2 {
            Vec::new()
        } else {
            cached_primes(PrimeRange::up_to(limit))?
        };
        Ok(Self::from_primes(primes.into(), limit))
    }

    /// `primes` must be ascending and contain every prime up to `limit`.
    pub fn from_primes(primes: Arc<[u64]>, limit: u64) -> Self {
        Self {
            table: PrimeTable::new(primes),
            limit,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn table(&self) -> &PrimeTable<T> {
        &self.table
    }

    fn check(&self, params: &SpectrumParams<T>) -> Result<usize> {
        params.validate()?;
        if params.p_max > self.limit {
            return Err(Error::domain(format!(
                "p_max = {} exceeds the engine's prime limit {}",
                params.p_max, self.limit
            )));
        }
        Ok(self.table.count_up_to(params.p_max))
    }

    /// Kernel for one `(eps, p*)` pair covering primes up to `p_max`.
    pub fn kernel(&self, params: &SpectrumParams<T>) -> Result<WindowedKernel<T>> {
        let n = self.check(params)?;
        WindowedKernel::new(&self.table, params.eps, params.p_star, n)
    }

    fn li_part(params: &SpectrumParams<T>) -> Result<T> {
        if params.p_max < 2 {
            return Ok(T::zero());
        }
        li_integral(params, T::one(), T::of_u64(params.p_max))
    }

    /// Arctan (Euler-factor) form of the spectrum.
    pub fn spectrum_value(&self, params: &SpectrumParams<T>) -> Result<SpectrumSample<T>> {
        let kernel = self.kernel(params)?;
        self.value_with_kernel(&kernel, params)
    }

    /// As [`Self::spectrum_value`] with a kernel built once for many `t`.
    pub fn value_with_kernel(&self, kernel: &WindowedKernel<T>, params: &SpectrumParams<T>) -> Result<SpectrumSample<T>> {
        let n = self.check(params)?;
        if n > kernel.len() {
            return Err(Error::domain("kernel does not cover p_max"));
        }
        if params.p_max < 2 {
            return Ok(SpectrumSample::assemble(params, T::zero(), T::zero()));
        }
        let sum_part = kernel.sum_delta(params.t, n);
        Ok(SpectrumSample::assemble(params, sum_part, Self::li_part(params)?))
    }

    /// Every prime power up to `p_max`, ascending.
    pub fn prime_powers(&self, p_max: u64) -> Result<Vec<PrimePower>> {
        if p_max > self.limit {
            return Err(Error::domain(format!(
                "p_max = {p_max} exceeds the engine's prime limit {}",
                self.limit
            )));
        }
        let n = self.table.count_up_to(p_max);
        let primes: Arc<[u64]> = Arc::from(&self.table.primes()[..n]);
        Ok(PrimePowerStream::from_primes(primes, p_max).collect())
    }

    fn stieltjes(&self, params: &SpectrumParams<T>, primes_only: bool) -> Result<SpectrumSample<T>> {
        self.check(params)?;
        if params.p_max < 2 {
            return Ok(SpectrumSample::assemble(params, T::zero(), T::zero()));
        }
        let powers = self.prime_powers(params.p_max)?;
        let powers: Vec<PrimePower> = if primes_only {
            powers.into_iter().filter(|pp| pp.exponent == 1).collect()
        } else {
            powers
        };
        let g = Kernel::new(params);
        let sum = ordered_sum(powers.len(), |i| {
            let pp = &powers[i];
            pp.weight_as::<T>() * g.eval(T::of_u64(pp.value).ln())
        });
        let sum_part = -g.prefactor * sum;
        Ok(SpectrumSample::assemble(params, sum_part, Self::li_part(params)?))
    }

    /// Stieltjes form over `d[J(x) - Li(x)]`, truncated by prime-power value.
    pub fn spectrum_value_prime_powers(&self, params: &SpectrumParams<T>) -> Result<SpectrumSample<T>> {
        self.stieltjes(params, false)
    }

    /// Stieltjes form over `d[pi(x) - Li(x)]`.
    pub fn spectrum_value_primes_only(&self, params: &SpectrumParams<T>) -> Result<SpectrumSample<T>> {
        if params.eps < T::zero() {
            return Err(Error::domain("the primes-only form needs eps >= 0"));
        }
        self.stieltjes(params, true)
    }

    /// Exact difference between the arctan form and the prime-power form:
    /// `-(ln p*/pi) sum_{p <= p_max} sum_{n : p^n > p_max} g(p^n)/n`, together
    /// with the bound `tau = (ln p*/pi) sum |p^-(n sigma)| / n` over the same terms.
    pub fn power_tail(&self, params: &SpectrumParams<T>) -> Result<(T, T)> {
        let n = self.check(params)?;
        let g = Kernel::new(params);
        let pmax = T::of_u64(params.p_max);
        let ln_pmax = pmax.ln();
        let cutoff = T::lit(1e-30);
        let primes = &self.table.primes()[..n];
        let mut signed = CompensatedSum::new();
        let mut bound = CompensatedSum::new();
        for &p in primes {
            let lp = T::of_u64(p).ln();
            let first = (ln_pmax / lp).floor().to_u64().unwrap_or(0) + 1;
            let mut e = first.max(1);
            loop {
                let lx = T::of_u64(e) * lp;
                let mag = (-g.sigma * lx).exp() / T::of_u64(e);
                if mag < cutoff {
                    break;
                }
                signed.add(g.eval(lx) / T::of_u64(e));
                bound.add(mag);
                e += 1;
                if e > first + 200 {
                    break;
                }
            }
        }
        Ok((-g.prefactor * signed.value(), g.prefactor * bound.value()))
    }

    /// Gamma-factor phase slope plus the spectrum value; the sample is flagged
    /// when `eps <= 0` and `t` is within `2 pi/ln p*` of one of `zeros`.
    pub fn xi_slope_estimate(&self, params: &SpectrumParams<T>, zeros: &[T]) -> Result<SpectrumSample<T>> {
        let mut s = self.spectrum_value(params)?;
        finish_estimate(&mut s, params, zeros)?;
        Ok(s)
    }

    /// Spectrum samples at each `t` of `ts` for fixed `(eps, p*, p_max)`,
    /// evaluated in parallel over `t` with slope estimates filled in.
    pub fn scan(&self, template: &SpectrumParams<T>, ts: &[T], zeros: &[T]) -> Result<Vec<SpectrumSample<T>>> {
        let kernel = self.kernel(template)?;
        ts.par_iter()
            .map(|&t| {
                let params = template.with_t(t);
                let mut s = self.value_with_kernel(&kernel, &params)?;
                finish_estimate(&mut s, &params, zeros)?;
                Ok(s)
            })
            .collect()
    }

    /// Spectrum values at `t` for every `eps` (rows) and every ascending
    /// checkpoint `p_max` (columns) from one streaming pass per `eps`. Each
    /// entry is bit-identical to [`Self::spectrum_value`] at that point.
    pub fn stabilization_scan(&self, t: T, eps_list: &[T], p_star: u64, checkpoints: &[u64]) -> Result<Vec<Vec<T>>> {
        if checkpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("checkpoints must be ascending"));
        }
        let last = checkpoints.last().copied().unwrap_or(0);
        eps_list
            .iter()
            .map(|&eps| {
                let top = SpectrumParams::new(t, eps, p_star, last, DEFAULT_J)?;
                let kernel = self.kernel(&top)?;
                let mut acc = ChunkedAccumulator::new();
                let mut row = Vec::with_capacity(checkpoints.len());
                for &cp in checkpoints {
                    let params = top.with_p_max(cp);
                    let n = self.check(&params)?;
                    while acc.len() < n {
                        acc.push(kernel.term(t, acc.len()));
                    }
                    if cp < 2 {
                        row.push(T::zero());
                        continue;
                    }
                    let sum_part = kernel.scale() * acc.value();
                    row.push(sum_part + Self::li_part(&params)?);
                }
                Ok(row)
            })
            .collect()
    }

    /// Envelope sums per oscillation of `cos(t ln x)` over `x` in `[1, p_max]`.
    pub fn envelope_scan(&self, params: &SpectrumParams<T>) -> Result<Vec<EnvelopeRecord<T>>> {
        let n = self.check(params)?;
        if params.p_max < 2 {
            return Ok(Vec::new());
        }
        let t = params.t;
        let pmax = T::of_u64(params.p_max);
        let g = Kernel::new(params);
        let powers = self.prime_powers(params.p_max)?;
        let kernel = WindowedKernel::new(&self.table, params.eps, params.p_star, n)?;
        let k_first = 0i64;
        let k_last = ((t * pmax.ln() + T::PI() / T::two()) / T::TAU()).ceil().to_i64().unwrap_or(0);

        let mut prime_acc = ChunkedAccumulator::new();
        let mut next_prime = 0usize;
        let mut next_power = 0usize;
        let mut plus = CompensatedSum::new();
        let mut minus = CompensatedSum::new();
        let mut out = Vec::new();

        // Running spectrum truncated at x: primes <= x in the arctan form plus
        // the integral over [1, x].
        let running = |x: T, acc: &mut ChunkedAccumulator<T>, next: &mut usize| -> Result<T> {
            let xi = x.floor().to_u64().unwrap_or(0).min(params.p_max);
            let count = self.table.count_up_to(xi).min(n);
            while *next < count {
                acc.push(kernel.term(t, *next));
                *next += 1;
            }
            let li = if x > T::one() {
                li_integral(params, T::one(), x.min(pmax))?
            } else {
                T::zero()
            };
            Ok(kernel.scale() * acc.value() + li)
        };

        for (k, (x_lo, x_hi)) in (k_first..=k_last).zip(sampling_grid(t, k_first..k_last + 1)) {
            let x_next = ((T::TAU() * T::lit((k + 1) as f64) - T::PI() / T::two()) / t).exp();
            if x_next <= T::one() {
                continue;
            }
            if x_lo > pmax {
                break;
            }
            let mut rec = EnvelopeRecord {
                k,
                x_lo,
                x_hi,
                o_plus_j: T::zero(),
                o_minus_j: T::zero(),
                o_plus_li: T::zero(),
                o_minus_li: T::zero(),
                running_ratio: T::zero(),
                value_at_lo: T::zero(),
                value_at_hi: T::zero(),
            };
            rec.value_at_lo = running(x_lo.max(T::one()).min(pmax), &mut prime_acc, &mut next_prime)?;
            for (a, b, cos_sign) in [(x_lo, x_hi, T::one()), (x_hi, x_next, -T::one())] {
                let a = a.max(T::one());
                let b = b.min(pmax);
                if !(b > a) {
                    continue;
                }
                for (pa, pb, sin_sign) in split_at_window_powers(a, b, params.p_star) {
                    let class = cos_sign * sin_sign;
                    let mut js = CompensatedSum::new();
                    while next_power < powers.len() && T::of_u64(powers[next_power].value) <= pb {
                        let pp = &powers[next_power];
                        js.add(pp.weight_as::<T>() * g.eval(T::of_u64(pp.value).ln()));
                        next_power += 1;
                    }
                    let j_abs = (g.prefactor * js.value()).abs();
                    let li_abs = li_integral(params, pa, pb)?.abs();
                    if class > T::zero() {
                        rec.o_plus_j += j_abs;
                        rec.o_minus_li += li_abs;
                    } else {
                        rec.o_minus_j += j_abs;
                        rec.o_plus_li += li_abs;
                    }
                }
                if cos_sign > T::zero() {
                    rec.value_at_hi = running(b, &mut prime_acc, &mut next_prime)?;
                }
            }
            if x_hi > pmax {
                rec.value_at_hi = running(pmax, &mut prime_acc, &mut next_prime)?;
            }
            plus.add(rec.o_plus_j + rec.o_plus_li);
            minus.add(rec.o_minus_j + rec.o_minus_li);
            rec.running_ratio = if minus.value() > T::zero() {
                plus.value() / minus.value()
            } else {
                T::nan()
            };
            out.push(rec);
        }
        Ok(out)
    }
}

/// `g(x) = cos(t ln x) x^-sigma sin(pi ln x / ln p*)` in terms of `ln x`,
/// with the `ln p* / pi` prefactor.
struct Kernel<T> {
    t: T,
    sigma: T,
    omega: T,
    prefactor: T,
}

impl<T: Real> Kernel<T> {
    fn new(params: &SpectrumParams<T>) -> Self {
        let lps = params.ln_p_star();
        Self {
            t: params.t,
            sigma: params.sigma(),
            omega: T::PI() / lps,
            prefactor: lps / T::PI(),
        }
    }

    #[inline]
    fn eval(&self, lx: T) -> T {
        (self.t * lx).cos() * (-self.sigma * lx).exp() * (self.omega * lx).sin()
    }
}

/// Splits `[a, b]` at powers of `p*`, returning each piece with the sign of
/// `sin(pi ln x / ln p*)` on it.
fn split_at_window_powers<T: Real>(a: T, b: T, p_star: u64) -> Vec<(T, T, T)> {
    let lps = T::of_u64(p_star).ln();
    let m_of = |x: T| (x.ln() / lps).floor().to_i64().unwrap_or(0);
    let mut out = Vec::new();
    let mut lo = a;
    let mut m = m_of(a);
    loop {
        let edge = (lps * T::of_u64((m + 1).max(0) as u64)).exp();
        let hi = if edge < b { edge } else { b };
        let sign = if m.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        if hi > lo {
            out.push((lo, hi, sign));
        }
        if hi >= b {
            break;
        }
        lo = hi;
        m += 1;
    }
    out
}

fn finish_estimate<T: Real>(s: &mut SpectrumSample<T>, params: &SpectrumParams<T>, zeros: &[T]) -> Result<()> {
    let gamma = gamma_factor_phase_slope(CriticalStripPoint::new(params.t, params.eps))?;
    s.slope_estimate = Some(gamma + s.value);
    let radius = T::TAU() / params.ln_p_star();
    s.flagged = params.eps <= T::zero() && zeros.iter().any(|&z| (z - params.t).abs() <= radius);
    Ok(())
}

/// `(x_0t(k), x'_0t(k)) = (e^((2 pi k - pi/2)/t), e^((2 pi k + pi/2)/t))`.
pub fn sampling_grid<T: Real>(t: T, k_range: Range<i64>) -> Vec<(T, T)> {
    let quarter = T::PI() / T::two();
    k_range
        .map(|k| {
            let kk = T::lit(k as f64);
            let centre = T::TAU() * kk;
            (((centre - quarter) / t).exp(), ((centre + quarter) / t).exp())
        })
        .collect()
}

/// Smoothing window `W = 2 pi / ln p_max`.
pub fn window_width<T: Real>(p_max: u64) -> T {
    T::TAU() / T::of_u64(p_max).ln()
}

/// Default scan step `min(0.02, W/8)`.
pub fn default_scan_step<T: Real>(p_max: u64) -> T {
    T::lit(0.02).min(window_width::<T>(p_max) / T::lit(8.0))
}

/// Uniform grid `t_min, t_min + step, ...` up to `t_max` (inclusive within
/// half a step).
pub fn uniform_grid<T: Real>(t_min: T, t_max: T, step: T) -> Vec<T> {
    let n = ((t_max - t_min) / step + T::lit(0.5)).floor().to_usize().unwrap_or(0);
    (0..=n).map(|i| t_min + step * T::of_usize(i)).collect()
}

/// Centered boxcar average of width `W = 2 pi / ln p_max` of the piecewise
/// linear interpolant of `value`, truncated at the ends of the grid. Fills
/// `smoothed` in place.
pub fn smooth_moving_window<T: Real>(samples: &mut [SpectrumSample<T>], p_max: u64) -> Result<()> {
    let values: Vec<T> = samples.iter().map(|s| s.value).collect();
    let ts: Vec<T> = samples.iter().map(|s| s.t).collect();
    let smoothed = boxcar(&ts, &values, window_width(p_max))?;
    for (s, v) in samples.iter_mut().zip(smoothed) {
        s.smoothed = Some(v);
    }
    Ok(())
}

/// Boxcar average of width `w` of the piecewise-linear function through
/// `(ts, vs)` on a uniform grid with step below `w / 4`.
pub fn boxcar<T: Real>(ts: &[T], vs: &[T], w: T) -> Result<Vec<T>> {
    let n = ts.len();
    if n < 2 {
        return Ok(vs.to_vec());
    }
    let step = (ts[n - 1] - ts[0]) / T::of_usize(n - 1);
    let limit = w / T::lit(4.0);
    let tol = step * T::lit(1e-6);
    if ts.windows(2).any(|p| ((p[1] - p[0]) - step).abs() > tol) {
        return Err(Error::domain("smoothing needs a uniform grid"));
    }
    if !(step < limit) {
        return Err(Error::Resolution {
            step: step.as_f64(),
            limit: limit.as_f64(),
        });
    }
    // prefix[k] = integral from ts[0] to ts[k].
    let mut prefix = Vec::with_capacity(n);
    let mut acc = CompensatedSum::new();
    prefix.push(T::zero());
    for k in 1..n {
        acc.add(step * (vs[k - 1] + vs[k]) * T::half());
        prefix.push(acc.value());
    }
    let t0 = ts[0];
    let integral_to = |u: T| -> T {
        let pos = ((u - t0) / step).max(T::zero());
        let k = pos.floor().to_usize().unwrap_or(0).min(n - 2);
        let theta = (pos - T::of_usize(k)).min(T::one());
        let h = theta * step;
        prefix[k] + h * (vs[k] + (vs[k + 1] - vs[k]) * theta * T::half())
    };
    let half = w * T::half();
    let (lo_end, hi_end) = (ts[0], ts[n - 1]);
    Ok(ts
        .iter()
        .map(|&t| {
            let a = (t - half).max(lo_end);
            let b = (t + half).min(hi_end);
            (integral_to(b) - integral_to(a)) / (b - a)
        })
        .collect())
}

/// Sign changes of `Re Z(t, 0)` on `[t_lo, t_hi]` with the default grid step.
pub fn zero_locate<T: Real>(t_lo: T, t_hi: T) -> Result<Vec<ZeroRecord<T>>> {
    zero_locate_with_step(t_lo, t_hi, T::lit(ZERO_GRID_STEP))
}

/// Sign changes of `Re Z(t, 0)` on a grid of the given step, each refined by
/// bisection to a bracket narrower than [`ZERO_TOLERANCE`]. Close pairs inside
/// one grid cell are missed.
pub fn zero_locate_with_step<T: Real>(t_lo: T, t_hi: T, step: T) -> Result<Vec<ZeroRecord<T>>> {
    if !(t_lo > T::TAU()) {
        return Err(Error::domain(format!("zero_locate needs t_lo > 2 pi, got {t_lo}")));
    }
    if !(step > T::zero()) || !(t_hi >= t_lo) {
        return Err(Error::domain("zero_locate needs t_hi >= t_lo and a positive step"));
    }
    let f = |t: T| -> Result<T> { Ok(z_approx(CriticalStripPoint::new(t, T::zero()))?.re) };
    let tol = T::lit(ZERO_TOLERANCE).max(T::epsilon() * t_hi * T::lit(4.0));
    let mut grid = uniform_grid(t_lo, t_hi, step);
    if let Some(&last) = grid.last() {
        if last < t_hi {
            grid.push(t_hi);
        }
    }
    let mut out = Vec::new();
    let mut prev_t = grid[0];
    let mut prev_v = f(prev_t)?;
    for &t in &grid[1..] {
        let v = f(t)?;
        if prev_v == T::zero() {
            out.push(ZeroRecord {
                t_star: prev_t,
                bracket: (prev_t, prev_t),
                residual: T::zero(),
            });
        } else if prev_v * v < T::zero() {
            let (mut a, mut b, mut fa) = (prev_t, t, prev_v);
            while b - a > tol {
                let m = (a + b) * T::half();
                let fm = f(m)?;
                if fm == T::zero() {
                    a = m;
                    b = m;
                    break;
                }
                if (fa < T::zero()) == (fm < T::zero()) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let t_star = (a + b) * T::half();
            out.push(ZeroRecord {
                t_star,
                bracket: (a, b),
                residual: f(t_star)?.abs(),
            });
        }
        prev_t = t;
        prev_v = v;
    }
    if prev_v == T::zero() {
        out.push(ZeroRecord {
            t_star: prev_t,
            bracket: (prev_t, prev_t),
            residual: T::zero(),
        });
    }
    Ok(out)
}
