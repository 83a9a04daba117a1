//! The `d[Li(x)]` correction integral
//!
//! ```text
//! (ln p* / pi) * integral cos(t ln x) x^-(1/2+eps) sin(pi ln x / ln p*) dx / ln x
//! ```
//!
//! In `y = ln x` the integrand becomes `e^(a y) [sin(b+ y) - sin(b- y)] / (2y)`
//! with `a = 1/2 - eps`, `b+- = t +- pi/ln p*`. Repeated integration by parts
//! against `1/y` gives the boundary series
//!
//! ```text
//! sum_{j=1}^{J} (j-1)! [v_j(y) / y^j]
//! v_j = e^(a y) (A_j sin(b y) - B_j cos(b y)),   A_j - i B_j = (a - i b)^-j
//! ```
//!
//! which is accurate once `b y` is large compared with `J`. Near `x = 1` the
//! series is useless, so [`li_integral`] integrates that stretch with
//! Gauss–Legendre panels and switches to the series further out.

use crate::error::{Error, Result};
use crate::euler_phase::{SpectrumParams, MAX_J};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::summation::CompensatedSum;

/// `e^(a v) (a sin(b v) - b cos(b v)) / (a^2 + b^2)`, an antiderivative of
/// `e^(a v) sin(b v)`.
pub fn exp_sin_antideriv<T: Real>(a: T, b: T, v: T) -> Result<T> {
    let d = a * a + b * b;
    if d == T::zero() {
        return Err(Error::Degenerate);
    }
    let (s, c) = (b * v).sin_cos();
    Ok((a * v).exp() * (a * s - b * c) / d)
}

/// `e^(a v) (a cos(b v) + b sin(b v)) / (a^2 + b^2)`, an antiderivative of
/// `e^(a v) cos(b v)`.
pub fn exp_cos_antideriv<T: Real>(a: T, b: T, v: T) -> Result<T> {
    let d = a * a + b * b;
    if d == T::zero() {
        return Err(Error::Degenerate);
    }
    let (s, c) = (b * v).sin_cos();
    Ok((a * v).exp() * (a * c + b * s) / d)
}

/// Coefficients of the integration-by-parts series for both frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct IbpCoefficients<T = f64> {
    pub a: T,
    pub b_plus: T,
    pub b_minus: T,
    pub a_j_plus: Vec<T>,
    pub b_j_plus: Vec<T>,
    pub a_j_minus: Vec<T>,
    pub b_j_minus: Vec<T>,
}

fn powers<T: Real>(a: T, b: T, j_max: usize) -> (Vec<T>, Vec<T>) {
    let d = a * a + b * b;
    let (a1, b1) = (a / d, b / d);
    let mut aj = Vec::with_capacity(j_max);
    let mut bj = Vec::with_capacity(j_max);
    let (mut pa, mut pb) = (a1, b1);
    for _ in 0..j_max {
        aj.push(pa);
        bj.push(pb);
        (pa, pb) = (a1 * pa - b1 * pb, a1 * pb + b1 * pa);
    }
    (aj, bj)
}

impl<T: Real> IbpCoefficients<T> {
    pub fn new(params: &SpectrumParams<T>) -> Self {
        Self::with_order(params, params.j_max)
    }

    pub fn with_order(params: &SpectrumParams<T>, j_max: usize) -> Self {
        let a = T::half() - params.eps;
        let c = params.half_width();
        let b_plus = params.t + c;
        let b_minus = params.t - c;
        let (a_j_plus, b_j_plus) = powers(a, b_plus, j_max);
        let (a_j_minus, b_j_minus) = powers(a, b_minus, j_max);
        Self {
            a,
            b_plus,
            b_minus,
            a_j_plus,
            b_j_plus,
            a_j_minus,
            b_j_minus,
        }
    }

    pub fn order(&self) -> usize {
        self.a_j_plus.len()
    }

    /// `sum_j (j-1)! v_j(y) / y^j` for `y > 0`.
    pub fn boundary(&self, y: T) -> T {
        let (sp, cp) = (self.b_plus * y).sin_cos();
        let (sm, cm) = (self.b_minus * y).sin_cos();
        let inv_y = y.recip();
        let mut acc = T::zero();
        let mut w = inv_y;
        for j in 0..self.order() {
            let v = self.a_j_plus[j] * sp - self.b_j_plus[j] * cp - self.a_j_minus[j] * sm + self.b_j_minus[j] * cm;
            acc += w * v;
            w = w * T::of_usize(j + 1) * inv_y;
        }
        (self.a * y).exp() * acc
    }
}

fn check_truncation<T: Real>(params: &SpectrumParams<T>) -> Result<()> {
    let j = params.j_max;
    if j == 0 || j > MAX_J || !(T::of_usize(j) < params.t / T::lit(10.0)) {
        return Err(Error::TruncationValidity {
            j_max: j,
            t: params.t.as_f64(),
        });
    }
    Ok(())
}

/// `(ln p*/pi) int_{x_lo}^{x_hi} cos(t ln x) x^-(1/2+eps) sin(pi ln x/ln p*) dx/ln x`
/// by the integration-by-parts series alone.
pub fn li_window_integral<T: Real>(params: &SpectrumParams<T>, x_lo: T, x_hi: T) -> Result<T> {
    params.validate()?;
    if !(x_lo >= T::two()) {
        return Err(Error::domain(format!("li_window_integral needs x_lo >= 2, got {x_lo}")));
    }
    if !(x_hi >= x_lo) {
        return Err(Error::domain(format!(
            "li_window_integral needs x_hi >= x_lo, got [{x_lo}, {x_hi}]"
        )));
    }
    check_truncation(params)?;
    if x_hi == x_lo {
        return Ok(T::zero());
    }
    let coef = IbpCoefficients::new(params);
    Ok(params.window_scale() * (coef.boundary(x_hi.ln()) - coef.boundary(x_lo.ln())))
}

/// Target size of the neglected series term `J! / (b y)^J` where the
/// integration-by-parts series takes over from quadrature.
const SERIES_TOLERANCE: f64 = 1e-10;
const PANEL_ORDER: usize = 12;

/// Lower end (in `y`) of the stretch handled by the series.
fn series_start<T: Real>(params: &SpectrumParams<T>) -> Option<T> {
    if check_truncation(params).is_err() {
        return None;
    }
    let j = params.j_max;
    let fact: f64 = (1..=j).map(|k| k as f64).product();
    let by = (fact / SERIES_TOLERANCE).powf(1.0 / j as f64);
    let b_minus = (params.t - params.half_width()).as_f64();
    Some(T::lit((by / b_minus).max(std::f64::consts::LN_2)))
}

/// `y`-integrand `e^(a y) cos(t y) sin(c y) / y` times 2, written through
/// `sinc` so that it stays regular at `y = 0`.
fn y_integrand<T: Real>(a: T, t: T, c: T, y: T) -> T {
    let cy = c * y;
    let sinc = if cy.abs() < T::lit(1e-4) {
        T::one() - cy * cy / T::lit(6.0)
    } else {
        cy.sin() / cy
    };
    T::two() * (a * y).exp() * (t * y).cos() * c * sinc
}

/// Gauss–Legendre on `[y_lo, y_hi]` with roughly half an oscillation per panel.
fn panel_integral<T: Real>(params: &SpectrumParams<T>, y_lo: T, y_hi: T) -> T {
    if !(y_hi > y_lo) {
        return T::zero();
    }
    let c = params.half_width();
    let a = T::half() - params.eps;
    let freq = params.t + c;
    let panels = ((y_hi - y_lo) * freq / T::PI()).ceil().to_usize().unwrap_or(1).max(1);
    let rule = GaussLegendre::<T>::new(PANEL_ORDER);
    rule.integrate_composite(y_lo, y_hi, panels, |y| y_integrand(a, params.t, c, y))
}

/// The same integral for any `1 <= x_lo <= x_hi`: Gauss–Legendre panels up to
/// the point where the series is accurate to [`SERIES_TOLERANCE`], the series
/// beyond it. If `j_max` is not valid for this `t` the whole range uses panels.
pub fn li_integral<T: Real>(params: &SpectrumParams<T>, x_lo: T, x_hi: T) -> Result<T> {
    params.validate()?;
    if !(x_lo >= T::one()) || !(x_hi >= x_lo) {
        return Err(Error::domain(format!("li_integral needs 1 <= x_lo <= x_hi, got [{x_lo}, {x_hi}]")));
    }
    let y_lo = x_lo.ln();
    let y_hi = x_hi.ln();
    let mut acc = CompensatedSum::new();
    match series_start(params) {
        Some(y_split) if y_split < y_hi => {
            let y_mid = y_split.max(y_lo);
            acc.add(params.window_scale() * panel_integral(params, y_lo, y_mid));
            let coef = IbpCoefficients::new(params);
            acc.add(params.window_scale() * (coef.boundary(y_hi) - coef.boundary(y_mid)));
        }
        _ => acc.add(params.window_scale() * panel_integral(params, y_lo, y_hi)),
    }
    Ok(acc.value())
}
