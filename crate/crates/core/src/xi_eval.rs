//! Riemann–Siegel style approximation `Z(t, eps)` of xi near the critical
//! line, with the first remainder term, the Gamma-factor phase slope and
//! finite-difference phase derivatives.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `s = 1/2 + eps + i t`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CriticalStripPoint<T = f64> {
    pub t: T,
    pub eps: T,
}

impl<T: Real> CriticalStripPoint<T> {
    pub fn new(t: T, eps: T) -> Self {
        Self { t, eps }
    }

    pub fn sigma(&self) -> T {
        T::half() + self.eps
    }
}

/// Value of `Z(t, eps)` with the quantities that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZValue<T = f64> {
    pub re: T,
    pub im: T,
    /// `N = floor(sqrt(t / 2 pi))`.
    pub n_terms: u64,
    /// First Riemann–Siegel correction, already included in `re`.
    pub remainder: T,
    /// `p = sqrt(t / 2 pi) - N`.
    pub p_frac: T,
}

impl<T: Real> ZValue<T> {
    pub fn modulus_sq(&self) -> T {
        self.re * self.re + self.im * self.im
    }

    pub fn phase(&self) -> T {
        self.im.atan2(self.re)
    }
}

/// Below this `|Z|^2` a phase derivative is reported as a near-zero error.
pub const NEAR_ZERO_FLOOR: f64 = 1e-24;

pub fn z_approx<T: Real>(pt: CriticalStripPoint<T>) -> Result<ZValue<T>> {
    let two_pi = T::TAU();
    if !(pt.t > two_pi) {
        return Err(Error::domain(format!("z_approx needs t > 2 pi, got {}", pt.t)));
    }
    let t = pt.t;
    let r = (t / two_pi).sqrt();
    let n_terms = r.floor().to_u64().unwrap_or(0).max(1);
    let p_frac = (r - T::of_u64(n_terms)).max(T::zero()).min(T::one());
    let ln_r = r.ln();
    let base_phase = t * (ln_r - T::half()) - T::PI() / T::lit(8.0);

    let mut re = T::zero();
    let mut im = T::zero();
    for n in 1..=n_terms {
        let nf = T::of_u64(n);
        let ln_n = nf.ln();
        let amp = T::two() / nf.sqrt();
        let (s, c) = (base_phase - t * ln_n).sin_cos();
        let u = pt.eps * (ln_r - ln_n);
        re += amp * u.cosh() * c;
        im += amp * u.sinh() * s;
    }
    let sign = if n_terms % 2 == 1 { T::one() } else { -T::one() };
    let remainder = sign * (two_pi / t).powf(T::lit(0.25)) * c0_unchecked(p_frac);
    if pt.eps == T::zero() {
        im = T::zero();
    }
    Ok(ZValue {
        re: re + remainder,
        im,
        n_terms,
        remainder,
        p_frac,
    })
}

/// `C0(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)` on `[0, 1]`.
pub fn c0<T: Real>(p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::domain(format!("c0 needs 0 <= p <= 1, got {p}")));
    }
    Ok(c0_unchecked(p))
}

fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        x.sin() / x
    }
}

fn c0_unchecked<T: Real>(p: T) -> T {
    let pi = T::PI();
    let quarter = T::lit(0.25);
    let three_quarters = T::lit(0.75);
    let tol = T::lit(1e-4);
    let d = p - quarter;
    if d.abs() < tol {
        return (T::one() - T::two() * d) / T::two() * sinc(pi * d * (T::one() - T::two() * d)) / sinc(T::two() * pi * d);
    }
    let d = p - three_quarters;
    if d.abs() < tol {
        return (T::one() + T::two() * d) / T::two() * sinc(pi * d * (T::one() + T::two() * d)) / sinc(T::two() * pi * d);
    }
    let num = (T::TAU() * (p * p - p - T::lit(1.0 / 16.0))).cos();
    num / (T::TAU() * p).cos()
}

/// `1/2 ln(t / 2 pi) + 3 eps / (4 t^2)`.
pub fn gamma_factor_phase_slope<T: Real>(pt: CriticalStripPoint<T>) -> Result<T> {
    if !(pt.t > T::zero()) {
        return Err(Error::domain(format!("phase slope needs t > 0, got {}", pt.t)));
    }
    let t = pt.t;
    Ok(T::half() * (t / T::TAU()).ln() + T::lit(3.0) * pt.eps / (T::lit(4.0) * t * t))
}

/// Default finite-difference step for phase derivatives at height `t`.
pub fn default_phase_step<T: Real>(t: T) -> T {
    T::lit(1e-5).max(t * T::lit(1e-9))
}

/// `(Re dIm - Im dRe) / |Z|^2` by central differences on [`z_approx`].
pub fn z_phase_slope<T: Real>(pt: CriticalStripPoint<T>, h: T) -> Result<T> {
    if pt.eps == T::zero() {
        return Err(Error::domain("phase of Z is piecewise constant at eps = 0"));
    }
    if !(h > T::zero()) {
        return Err(Error::domain(format!("finite-difference step must be positive, got {h}")));
    }
    let z = z_approx(pt)?;
    let zp = z_approx(CriticalStripPoint::new(pt.t + h, pt.eps))?;
    let zm = z_approx(CriticalStripPoint::new(pt.t - h, pt.eps))?;
    let m2 = z.modulus_sq();
    if m2.as_f64() < NEAR_ZERO_FLOOR {
        return Err(Error::NearZero {
            t: pt.t.as_f64(),
            modulus_sq: m2.as_f64(),
        });
    }
    let two_h = T::two() * h;
    let d_re = (zp.re - zm.re) / two_h;
    let d_im = (zp.im - zm.im) / two_h;
    Ok((z.re * d_im - z.im * d_re) / m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn z(t: f64, eps: f64) -> ZValue<f64> {
        z_approx(CriticalStripPoint::new(t, eps)).unwrap()
    }

    #[test]
    fn imaginary_part_vanishes_on_line() {
        for t in [7.0, 100.0, 1645.57] {
            assert_eq!(z(t, 0.0).im, 0.0);
        }
    }

    #[test]
    fn term_count() {
        assert_eq!(z(1645.57, 0.0).n_terms, 16);
        assert_eq!(z(1645.57, 0.1).n_terms, 16);
        assert!(z_approx(CriticalStripPoint::new(6.0, 0.0)).is_err());
    }

    #[test]
    fn first_zero_bracketed() {
        assert!(z(14.0, 0.0).re * z(14.3, 0.0).re < 0.0);
    }

    #[test]
    fn c0_values() {
        let cpi8 = (std::f64::consts::PI / 8.0).cos();
        assert_abs_diff_eq!(c0(0.0).unwrap(), cpi8, epsilon = 1e-15);
        assert_abs_diff_eq!(c0(1.0).unwrap(), cpi8, epsilon = 1e-15);
        assert_abs_diff_eq!(c0(0.5).unwrap(), 0.382_683_432_365_089_8, epsilon = 1e-12);
        assert!(c0(-0.1).is_err());
        assert!(c0(1.1).is_err());
    }

    #[test]
    fn c0_continuous_through_removable_points() {
        let direct = |p: f64| (std::f64::consts::TAU * (p * p - p - 1.0 / 16.0)).cos() / (std::f64::consts::TAU * p).cos();
        for centre in [0.25f64, 0.75] {
            for d in [0.99e-4, -0.5e-4, 1e-6] {
                let p = centre + d;
                assert_abs_diff_eq!(c0(p).unwrap(), direct(p), epsilon = 1e-9);
            }
            assert!(c0(centre).unwrap().is_finite());
        }
        assert_abs_diff_eq!(c0(0.25).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c0(0.75).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn z_continuous_across_term_count_change() {
        let t = std::f64::consts::TAU * 16.0 * 16.0;
        let below = z(t - 1e-9, 0.0).re;
        let above = z(t + 1e-9, 0.0).re;
        assert_abs_diff_eq!(below, above, epsilon = 1e-6);
    }

    #[test]
    fn gamma_slope_values() {
        let tau = std::f64::consts::TAU;
        let s = |t: f64| gamma_factor_phase_slope(CriticalStripPoint::new(t, 0.0)).unwrap();
        assert_abs_diff_eq!(s(tau), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s(tau * std::f64::consts::E), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s(644.2), 0.5 * (644.2 / tau).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(s(644.2), 2.3151, epsilon = 1e-4);
    }

    #[test]
    fn phase_slope_rejected_on_line() {
        assert!(z_phase_slope(CriticalStripPoint::new(100.0, 0.0), 1e-5).is_err());
    }

    #[test]
    fn phase_slope_spikes_at_zero() {
        let t0 = 1645.57376;
        let slope = |eps: f64| {
            let mut extreme: f64 = 0.0;
            let mut t = t0 - 0.05;
            while t < t0 + 0.05 {
                let v = z_phase_slope(CriticalStripPoint::new(t, eps), default_phase_step(t)).unwrap();
                if v.abs() > extreme.abs() {
                    extreme = v;
                }
                t += 0.001;
            }
            extreme
        };
        let neg = slope(-0.05);
        let pos = slope(0.1);
        assert!(neg < -5.0, "{neg}");
        assert!(pos > 5.0, "{pos}");
    }

    /// Term-by-term derivative of the two sums plus the remainder.
    fn analytic_derivative(t: f64, eps: f64) -> (f64, f64) {
        let tau = std::f64::consts::TAU;
        let r = (t / tau).sqrt();
        let n_terms = r.floor() as u64;
        let ln_r = r.ln();
        let base = t * (ln_r - 0.5) - std::f64::consts::PI / 8.0;
        let (mut dre, mut dim) = (0.0, 0.0);
        for n in 1..=n_terms {
            let ln_n = (n as f64).ln();
            let amp = 2.0 / (n as f64).sqrt();
            let u = eps * (ln_r - ln_n);
            let ph = base - t * ln_n;
            let dph = ln_r - ln_n;
            let du = eps / (2.0 * t);
            dre += amp * (u.sinh() * du * ph.cos() - u.cosh() * ph.sin() * dph);
            dim += amp * (u.cosh() * du * ph.sin() + u.sinh() * ph.cos() * dph);
        }
        let p = r - n_terms as f64;
        let sign = if n_terms % 2 == 1 { 1.0 } else { -1.0 };
        let k = (tau / t).powf(0.25);
        let hp = 1e-6;
        let dc0 = (c0(p + hp).unwrap() - c0(p - hp).unwrap()) / (2.0 * hp);
        dre += sign * (-0.25 / t * k * c0(p).unwrap() + k * dc0 * r / (2.0 * t));
        (dre, dim)
    }

    #[test]
    fn phase_slope_matches_analytic_derivative() {
        for (t, eps) in [(100.3, 0.1), (710.2, -0.05), (1647.0, 0.3)] {
            let v = z(t, eps);
            let (dre, dim) = analytic_derivative(t, eps);
            let exact = (v.re * dim - v.im * dre) / v.modulus_sq();
            let fd = z_phase_slope(CriticalStripPoint::new(t, eps), 1e-4).unwrap();
            assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()), "t={t}: {fd} vs {exact}");
        }
    }

    #[test]
    fn single_precision_tracks_double() {
        let a = z_approx(CriticalStripPoint::new(100.0f32, 0.1)).unwrap();
        let b = z(100.0, 0.1);
        assert!((a.re as f64 - b.re).abs() < 1e-3);
        assert!((a.im as f64 - b.im).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn conjugate_symmetry(t in 7.0f64..2000.0, eps in -0.49f64..0.49) {
            let a = z(t, eps);
            let b = z(t, -eps);
            prop_assert_eq!(a.re, b.re);
            prop_assert_eq!(a.im, -b.im);
        }

        #[test]
        fn c0_bounds(p in 0.0f64..=1.0) {
            let v = c0(p).unwrap();
            let lo = c0(0.5).unwrap();
            let hi = (std::f64::consts::PI / 8.0).cos();
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "C0({}) = {}", p, v);
        }
    }
}
