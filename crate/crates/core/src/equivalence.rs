//! Angular momentum of xi and the discriminant `[xi']^2 - xi xi''` on the
//! critical line.
//!
//! `xi = F(t) g(t)` with `g = -Re Z(t, 0)` and the positive scale
//! `F = (pi/2)^(1/4) t^(7/4) e^(-pi t/4)`, which underflows long before the
//! interesting heights. Everything is therefore computed on `g` with the
//! analytic log-derivatives `L1 = F'/F = 7/(4t) - pi/4` and
//! `L2 = F''/F = L1^2 - 7/(4t^2)`:
//!
//! ```text
//! ([xi']^2 - xi xi'') / F^2 = g'^2 - g g'' + (L1^2 - L2) g^2 = g'^2 - g g'' + 7 g^2 / (4 t^2)
//! ```

use rayon::prelude::*;

use crate::error::Result;
use crate::scalar::Real;
use crate::spectrum::uniform_grid;
use crate::xi_eval::{z_approx, CriticalStripPoint};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

/// `Re f * d Im f - Im f * d Re f` by central differences for any complex
/// valued `f` given as `(re, im)`.
pub fn angular_momentum_of<T: Real, F>(f: F, t: T, h: T) -> Result<T>
where
    F: Fn(T) -> Result<(T, T)>,
{
    let (re, im) = f(t)?;
    let (rp, ip) = f(t + h)?;
    let (rm, im_m) = f(t - h)?;
    let two_h = T::two() * h;
    Ok(re * (ip - im_m) / two_h - im * (rp - rm) / two_h)
}

/// Angular momentum of the normalized `xi_hat = -Z(t, eps)`; same sign as
/// that of xi itself.
pub fn angular_momentum<T: Real>(pt: CriticalStripPoint<T>, h: T) -> Result<T> {
    angular_momentum_of(
        |t| {
            let z = z_approx(CriticalStripPoint::new(t, pt.eps))?;
            Ok((-z.re, -z.im))
        },
        pt.t,
        h,
    )
}

/// One point of the normalized discriminant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantSample<T = f64> {
    pub t: T,
    /// `([xi']^2 - xi xi'') / F(t)^2`.
    pub normalized_value: T,
    /// `g = xi / F = -Re Z(t, 0)`.
    pub xi_hat: T,
    pub g_prime: T,
    /// `g^2 * 3 / (4 t^2)`.
    pub floor_value: T,
}

impl<T: Real> DiscriminantSample<T> {
    pub fn is_violation(&self) -> bool {
        !(self.normalized_value > T::zero())
    }
}

fn g<T: Real>(t: T) -> Result<T> {
    Ok(-z_approx(CriticalStripPoint::new(t, T::zero()))?.re)
}

/// Discriminant from any real `g` on the critical line.
pub fn discriminant_of<T: Real, F>(g: F, t: T, h: T) -> Result<DiscriminantSample<T>>
where
    F: Fn(T) -> Result<T>,
{
    let g0 = g(t)?;
    let gp = g(t + h)?;
    let gm = g(t - h)?;
    let d1 = (gp - gm) / (T::two() * h);
    let d2 = (gp - T::two() * g0 + gm) / (h * h);
    let t2 = t * t;
    let normalized_value = d1 * d1 - g0 * d2 + T::lit(7.0) * g0 * g0 / (T::lit(4.0) * t2);
    Ok(DiscriminantSample {
        t,
        normalized_value,
        xi_hat: g0,
        g_prime: d1,
        floor_value: g0 * g0 * T::lit(3.0) / (T::lit(4.0) * t2),
    })
}

pub fn discriminant<T: Real>(t: T, h: T) -> Result<DiscriminantSample<T>> {
    discriminant_of(g, t, h)
}

/// Result of a positivity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport<T = f64> {
    pub samples: Vec<DiscriminantSample<T>>,
    pub min_value: Option<T>,
    pub argmin: Option<T>,
    /// Grid points where `normalized_value <= 0`.
    pub violations: Vec<T>,
    /// Grid points where the value falls below the `3 g^2 / (4 t^2)` floor.
    pub below_floor: Vec<T>,
}

/// Discriminant on `t_lo, t_lo + step, ..` up to `t_hi`; parallel over the grid.
pub fn positivity_scan<T: Real>(t_lo: T, t_hi: T, step: T, h: T) -> Result<PositivityReport<T>> {
    let ts = if t_hi > t_lo { uniform_grid(t_lo, t_hi, step) } else { Vec::new() };
    let samples: Vec<DiscriminantSample<T>> = ts.par_iter().map(|&t| discriminant(t, h)).collect::<Result<_>>()?;
    let mut min_value: Option<T> = None;
    let mut argmin = None;
    for s in &samples {
        if min_value.is_none_or(|m| s.normalized_value < m) {
            min_value = Some(s.normalized_value);
            argmin = Some(s.t);
        }
    }
    Ok(PositivityReport {
        violations: samples.iter().filter(|s| s.is_violation()).map(|s| s.t).collect(),
        below_floor: samples
            .iter()
            .filter(|s| s.normalized_value <= s.floor_value)
            .map(|s| s.t)
            .collect(),
        samples,
        min_value,
        argmin,
    })
}
