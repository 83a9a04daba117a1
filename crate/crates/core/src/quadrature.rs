//! Fixed-order Gauss–Legendre panels and adaptive Gauss–Kronrod (7, 15).

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::summation::CompensatedSum;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T = f64> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `n`-point rule; nodes found by Newton iteration on `P_n` in `f64`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::lit(-x);
            nodes[n - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[n - 1 - i] = T::lit(w);
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integral of `f` over `[a, b]` with one panel.
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) * T::half();
        let mid = (a + b) * T::half();
        let mut acc = CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(*w * f(mid + half * *x));
        }
        acc.value() * half
    }

    /// Integral over `[a, b]` split into `panels` equal panels.
    pub fn integrate_composite<F: FnMut(T) -> T>(&self, a: T, b: T, panels: usize, mut f: F) -> T {
        let panels = panels.max(1);
        let width = (b - a) / T::of_usize(panels);
        let mut acc = CompensatedSum::new();
        for k in 0..panels {
            let lo = a + width * T::of_usize(k);
            let hi = if k + 1 == panels { b } else { lo + width };
            acc.add(self.integrate(lo, hi, &mut f));
        }
        acc.value()
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod estimate and `|K15 - G7|` on one interval.
fn gk15<T: Real, F: FnMut(T) -> T>(a: T, b: T, f: &mut F) -> (T, T) {
    let half = (b - a) * T::half();
    let mid = (a + b) * T::half();
    let fc = f(mid);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        k += T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            g += T::lit(WG[j / 2]) * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Adaptive Gauss–Kronrod integration on `[a, b]` to absolute tolerance
/// `abs_tol` (or relative `rel_tol`, whichever is looser), bisecting the
/// interval with the largest error estimate first.
pub fn integrate_adaptive<T: Real, F: FnMut(T) -> T>(a: T, b: T, abs_tol: T, rel_tol: T, max_intervals: usize, mut f: F) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let (v, e) = gk15(a, b, &mut f);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let mut total = CompensatedSum::new();
        let mut err = T::zero();
        let mut worst = 0;
        for (i, piece) in pieces.iter().enumerate() {
            total.add(piece.2);
            err += piece.3;
            if piece.3 > pieces[worst].3 {
                worst = i;
            }
        }
        let value = total.value();
        if err <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(value);
        }
        if pieces.len() >= max_intervals {
            return Err(Error::domain(format!(
                "adaptive quadrature did not reach tolerance: error estimate {err} after {} intervals",
                pieces.len()
            )));
        }
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = (lo + hi) * T::half();
        let (v1, e1) = gk15(lo, mid, &mut f);
        let (v2, e2) = gk15(mid, hi, &mut f);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 8, 16] {
            let rule = GaussLegendre::<f64>::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let v = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n}: {v}");
        }
    }

    #[test]
    fn composite_oscillatory() {
        let rule = GaussLegendre::<f64>::new(10);
        let v = rule.integrate_composite(0.0, 50.0, 40, |x| (3.0 * x).cos());
        assert!((v - (150.0f64).sin() / 3.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let v = integrate_adaptive(0.0, 1.0, 1e-12, 0.0, 1000, |x: f64| 1.0 / ((x - 0.3).powi(2) + 1e-4)).unwrap();
        let exact = ((0.7f64 / 1e-2).atan() + (0.3f64 / 1e-2).atan()) / 1e-2;
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
        assert_eq!(integrate_adaptive(2.0, 2.0, 1e-12, 0.0, 10, |x: f64| x).unwrap(), 0.0);
    }

    #[test]
    fn adaptive_reports_failure() {
        assert!(integrate_adaptive(0.0, 1.0, 1e-14, 0.0, 3, |x: f64| (1000.0 * x).sin()).is_err());
    }
}
