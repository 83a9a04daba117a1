//! Reference values of zeta and its phase slope from methods that never touch
//! the Euler product: the Borwein-accelerated alternating (eta) series and
//! Euler–Maclaurin summation. Used for cross-validation only.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

pub type ComplexValue = Complex64;

/// Largest `|t|` the oracle accepts.
pub const T_LIMIT: f64 = 2000.0;

/// `|zeta|^2` below which phase derivatives are refused.
pub const ZETA_FLOOR: f64 = 1e-20;

/// Step of the central difference in `t` used for `d zeta / dt`.
pub const SLOPE_STEP: f64 = 1e-6;

fn check_envelope(t: f64) -> Result<()> {
    if !(t.abs() <= T_LIMIT) {
        return Err(Error::Envelope {
            t: t.abs(),
            limit: T_LIMIT,
        });
    }
    Ok(())
}

/// `n^-s` for integer `n >= 1`.
#[inline]
fn n_pow_neg_s(n: f64, s: Complex64) -> Complex64 {
    let ln = n.ln();
    let mag = (-s.re * ln).exp();
    let (sn, cs) = (s.im * ln).sin_cos();
    Complex64::new(mag * cs, -mag * sn)
}

/// `1 - d_k / d_n` for `k = 0..n` in Borwein's second algorithm, built in log
/// space so that large `n` does not overflow.
fn borwein_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    // log of (n+i-1)! 4^i / ((n-i)! (2i)!), starting from i = 0 where it is 1/n.
    let mut logs = Vec::with_capacity(n + 1);
    let mut l = -nf.ln();
    logs.push(l);
    for i in 1..=n {
        let fi = i as f64;
        l += ((nf + fi - 1.0) * 4.0 * (nf - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0))).ln();
        logs.push(l);
    }
    let lmax = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut cumulative = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    for &li in &logs {
        acc += (li - lmax).exp();
        cumulative.push(acc);
    }
    let total = acc;
    cumulative.iter().take(n).map(|c| 1.0 - c / total).collect()
}

/// `zeta(sigma + i t)` by the accelerated alternating series.
pub fn zeta_eval(sigma: f64, t: f64) -> Result<ComplexValue> {
    check_envelope(t)?;
    if !(sigma >= 0.0) {
        return Err(Error::domain(format!("oracle needs sigma >= 0, got {sigma}")));
    }
    if sigma == 1.0 && t == 0.0 {
        return Err(Error::domain("zeta has a pole at s = 1"));
    }
    let s = Complex64::new(sigma, t);
    let factor = Complex64::new(1.0, 0.0) - n_pow_neg_s(2.0, s - 1.0);
    if factor.norm() < 1e-12 {
        return Err(Error::domain(format!("1 - 2^(1-s) vanishes at s = {s}")));
    }
    let n = (1.8 * t.abs()).ceil() as usize + 60;
    let weights = borwein_weights(n);
    let mut eta = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for (k, w) in weights.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = n_pow_neg_s((k + 1) as f64, s) * (sign * w);
        let y = term - comp;
        let next = eta + y;
        comp = (next - eta) - y;
        eta = next;
    }
    Ok(eta / factor)
}

const BERNOULLI_2K: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// `zeta(sigma + i t)` by Euler–Maclaurin summation; a second, independent
/// method for self-consistency checks.
pub fn zeta_euler_maclaurin(sigma: f64, t: f64) -> Result<ComplexValue> {
    check_envelope(t)?;
    if sigma == 1.0 && t == 0.0 {
        return Err(Error::domain("zeta has a pole at s = 1"));
    }
    let s = Complex64::new(sigma, t);
    let n = t.abs().ceil() as usize + 30;
    let nf = n as f64;
    let mut head = Complex64::new(0.0, 0.0);
    for k in 1..n {
        head += n_pow_neg_s(k as f64, s);
    }
    let n_s = n_pow_neg_s(nf, s);
    let mut total = head + n_s * nf / (s - 1.0) + n_s * 0.5;
    // Term k: B_2k / (2k)! * s (s+1) ... (s+2k-2) * N^(-s-2k+1).
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = n_s / nf;
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let kk = (k + 1) as f64;
        total += rising * npow * (b / fact);
        rising = rising * (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
        npow /= nf * nf;
    }
    Ok(total)
}

/// `d/dt Im ln[zeta(s) (s - 1)] = Im[(d zeta/dt) / zeta] + Re[1/(s - 1)]`,
/// with `d zeta/dt` by a central difference of step [`SLOPE_STEP`].
pub fn phase_slope_oracle(sigma: f64, t: f64) -> Result<f64> {
    let z = zeta_eval(sigma, t)?;
    if z.norm_sqr() < ZETA_FLOOR {
        return Err(Error::NearZero {
            t,
            modulus_sq: z.norm_sqr(),
        });
    }
    let dz = (zeta_eval(sigma, t + SLOPE_STEP)? - zeta_eval(sigma, t - SLOPE_STEP)?) / (2.0 * SLOPE_STEP);
    let pole = Complex64::new(1.0, 0.0) / Complex64::new(sigma - 1.0, t);
    Ok((dz / z).im + pole.re)
}

/// Mean of [`phase_slope_oracle`] over `[t - pi/ln p*, t + pi/ln p*]`.
pub fn windowed_phase_slope_oracle(sigma: f64, t: f64, p_star: u64) -> Result<f64> {
    if p_star < 2 {
        return Err(Error::domain(format!("p_star must be at least 2, got {p_star}")));
    }
    let delta = std::f64::consts::PI / (p_star as f64).ln();
    let mut failure = None;
    let integral = integrate_adaptive(t - delta, t + delta, 1e-8 * 2.0 * delta, 0.0, 4000, |u| {
        match phase_slope_oracle(sigma, u) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(integral / (2.0 * delta))
}

/// Continuous `Im ln zeta(sigma + i t)` for `sigma > 1`, unwrapped along the
/// horizontal segment from `sigma` to `sigma + i t`.
pub fn im_log_zeta(sigma: f64, t: f64) -> Result<f64> {
    if !(sigma > 1.0) {
        return Err(Error::domain(format!("continuous log needs sigma > 1, got {sigma}")));
    }
    let steps = (t.abs() / 0.02).ceil().max(1.0) as usize;
    let mut phase = 0.0;
    let mut prev = zeta_eval(sigma, 0.0)?.arg();
    for k in 1..=steps {
        let u = t * k as f64 / steps as f64;
        let cur = zeta_eval(sigma, u)?.arg();
        let mut d = cur - prev;
        if d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        } else if d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        phase += d;
        prev = cur;
    }
    Ok(phase)
}

/// `(ln p*/pi) int_{x_lo}^{x_hi} cos(t ln x) x^-(1/2+eps) sin(pi ln x/ln p*) dx/ln x`
/// by adaptive Gauss–Kronrod in `y = ln x`, with one subinterval between
/// consecutive zeros of `cos(t y)`.
pub fn li_integral_oracle(t: f64, eps: f64, p_star: u64, x_lo: f64, x_hi: f64) -> Result<f64> {
    if !(x_lo >= 1.0 && x_hi >= x_lo) {
        return Err(Error::domain(format!("bad interval [{x_lo}, {x_hi}]")));
    }
    let ln_ps = (p_star as f64).ln();
    let c = std::f64::consts::PI / ln_ps;
    let a = 0.5 - eps;
    let f = |y: f64| {
        let sin_part = if y == 0.0 { c } else { (c * y).sin() / y };
        (a * y).exp() * (t * y).cos() * sin_part
    };
    let (y_lo, y_hi) = (x_lo.ln(), x_hi.ln());
    let step = std::f64::consts::PI / t;
    let mut k = (y_lo / step - 0.5).ceil() as i64;
    let mut lo = y_lo;
    let mut total = 0.0;
    let mut comp = 0.0;
    loop {
        let z = (k as f64 + 0.5) * step;
        let hi = z.min(y_hi);
        if hi > lo {
            let piece = integrate_adaptive(lo, hi, 1e-16, 1e-13, 200, f)?;
            let y = piece - comp;
            let next = total + y;
            comp = (next - total) - y;
            total = next;
        }
        if z >= y_hi {
            break;
        }
        lo = z;
        k += 1;
    }
    Ok(ln_ps / std::f64::consts::PI * total)
}
