use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use prime_spectrum::csv_out::{write_envelope, write_samples, write_zeros};
use prime_spectrum::equivalence::{discriminant, positivity_scan, DEFAULT_STEP};
use prime_spectrum::oracle::{li_integral_oracle, windowed_phase_slope_oracle};
use prime_spectrum::spectrum::{smooth_moving_window, uniform_grid, zero_locate};
use prime_spectrum::{li_window_integral, EnvelopeRecord, SpectrumEngine, SpectrumParams, SpectrumSample, ZeroRecord};

const PRIME_LIMIT: u64 = 60_000_000;
const SCAN_STEP: f64 = 0.02;

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "acceptance criterion {n:>2}: {verdict} | {detail}").unwrap();
}

fn engine() -> &'static SpectrumEngine<f64> {
    static ENGINE: OnceLock<SpectrumEngine<f64>> = OnceLock::new();
    ENGINE.get_or_init(|| SpectrumEngine::new(PRIME_LIMIT).unwrap())
}

fn with_threads<R: Send>(n: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

fn zero_times(t_lo: f64, t_hi: f64) -> Vec<f64> {
    zero_locate(t_lo, t_hi).unwrap().iter().map(|z| z.t_star).collect()
}

fn far_from(t: f64, zeros: &[f64], radius: f64) -> bool {
    zeros.iter().all(|z| (t - z).abs() > radius)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

struct Runs {
    peaks: (Vec<SpectrumSample>, Vec<ZeroRecord>),
    baseline: Vec<SpectrumSample>,
    monotone: (Vec<SpectrumSample>, Vec<SpectrumSample>),
    envelopes: (Vec<EnvelopeRecord>, Vec<EnvelopeRecord>),
}

impl Runs {
    fn compute() -> Self {
        let engine = engine();

        let zeros = zero_locate(700.0, 730.0).unwrap();
        let zs: Vec<f64> = zeros.iter().map(|z| z.t_star).collect();
        let params = SpectrumParams::new(715.0, 0.1, 30_000_000, 30_000_000, 3).unwrap();
        let peaks = engine.scan(&params, &uniform_grid(700.0, 730.0, SCAN_STEP), &zs).unwrap();

        let p_max = 21_952_000;
        let params = SpectrumParams::new(75.0, 0.0, 280, p_max, 3).unwrap();
        let mut baseline = engine
            .scan(&params, &uniform_grid(60.0, 90.0, SCAN_STEP), &zero_times(60.0, 90.0))
            .unwrap();
        smooth_moving_window(&mut baseline, p_max).unwrap();

        let ts = uniform_grid(350.0, 360.0, SCAN_STEP);
        let zs = zero_times(350.0, 360.0);
        let mut curves = [0.0, 0.05].map(|eps| {
            let params = SpectrumParams::new(355.0, eps, 6_000_000, 60_000_000, 3).unwrap();
            let mut s = engine.scan(&params, &ts, &zs).unwrap();
            smooth_moving_window(&mut s, 60_000_000).unwrap();
            s
        });

        let envelopes = [0.0, 0.05].map(|eps| {
            let params = SpectrumParams::new(644.2, eps, 10_000_000, 10_000_000, 3).unwrap();
            engine.envelope_scan(&params).unwrap()
        });
        let [e0, e1] = envelopes;

        Self {
            peaks: (peaks, zeros),
            baseline,
            monotone: (std::mem::take(&mut curves[0]), std::mem::take(&mut curves[1])),
            envelopes: (e0, e1),
        }
    }

    fn csv_files(&self) -> Vec<(&'static str, Vec<u8>)> {
        let samples = |s: &[SpectrumSample]| {
            let mut buf = Vec::new();
            write_samples(&mut buf, s).unwrap();
            buf
        };
        let envelope = |r: &[EnvelopeRecord]| {
            let mut buf = Vec::new();
            write_envelope(&mut buf, r).unwrap();
            buf
        };
        let mut zeros = Vec::new();
        write_zeros(&mut zeros, &self.peaks.1).unwrap();
        vec![
            ("peaks", samples(&self.peaks.0)),
            ("peak zeros", zeros),
            ("baseline", samples(&self.baseline)),
            ("monotone eps=0", samples(&self.monotone.0)),
            ("monotone eps=0.05", samples(&self.monotone.1)),
            ("envelope eps=0", envelope(&self.envelopes.0)),
            ("envelope eps=0.05", envelope(&self.envelopes.1)),
        ]
    }
}

fn eight_threads() -> &'static Runs {
    static RUNS: OnceLock<Runs> = OnceLock::new();
    RUNS.get_or_init(|| with_threads(8, Runs::compute))
}

#[test]
fn criterion_01_oracle_equivalence() {
    let engine = SpectrumEngine::<f64>::new(1_000_000).unwrap();
    let mut worst = 0.0f64;
    for sigma in [1.6, 2.5] {
        for t in [10.0, 20.0, 50.0] {
            let params = SpectrumParams::new(t, sigma - 0.5, 1_000_000, 1_000_000, 3).unwrap();
            let value = engine.spectrum_value(&params).unwrap().value;
            let oracle = windowed_phase_slope_oracle(sigma, t, 1_000_000).unwrap();
            worst = worst.max((value - oracle).abs());
        }
    }
    let pass = worst <= 1e-6;
    report(1, pass, &format!("max |spectrum - windowed oracle| = {worst:.3e} (tol 1e-6)"));
    assert!(pass);
}

#[test]
fn criterion_02_quadrature() {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let f = i as f64 / 19.0;
        let t = 60.0 + f * (1650.0 - 60.0);
        let eps = -0.05 + f * 0.55;
        let j_max = (((t / 10.0).ceil() as usize) - 1).min(8);
        let params = SpectrumParams::new(t, eps, 10_000_000, 10_000_000, j_max).unwrap();
        let got = li_window_integral(&params, 2.0, 1e6).unwrap();
        let want = li_integral_oracle(t, eps, 10_000_000, 2.0, 1e6).unwrap();
        worst = worst.max((got - want).abs() / want.abs());
    }
    let pass = worst <= 1e-6;
    report(2, pass, &format!("max relative error over 20 points = {worst:.3e} (tol 1e-6)"));
    assert!(pass);
}

#[test]
fn criterion_03_peak_zero_alignment() {
    let (samples, zeros) = &eight_threads().peaks;
    let radius = 2.0 * PI / 3e7f64.ln();
    let zs: Vec<f64> = zeros.iter().map(|z| z.t_star).collect();
    let slope: Vec<f64> = samples.iter().map(|s| s.slope_estimate.unwrap()).collect();
    let between: Vec<f64> = samples
        .iter()
        .zip(&slope)
        .filter(|(s, _)| far_from(s.t, &zs, radius))
        .map(|(_, v)| *v)
        .collect();
    let threshold = 3.0 * median(between);
    let peaks: Vec<(f64, f64)> = (1..slope.len() - 1)
        .filter(|&i| slope[i] > slope[i - 1] && slope[i] >= slope[i + 1])
        .map(|i| (samples[i].t, slope[i]))
        .collect();
    let unmatched: Vec<f64> = zs
        .iter()
        .copied()
        .filter(|z| !peaks.iter().any(|&(t, v)| (t - z).abs() <= radius && v > threshold))
        .collect();
    let spurious: Vec<f64> = peaks
        .iter()
        .filter(|&&(t, v)| v > threshold && far_from(t, &zs, radius))
        .map(|&(t, _)| t)
        .collect();
    let pass = !zs.is_empty() && unmatched.is_empty() && spurious.is_empty();
    report(
        3,
        pass,
        &format!(
            "{} zeros, {} local maxima, threshold {threshold:.3}; unmatched zeros {unmatched:?}, spurious peaks {spurious:?}",
            zs.len(),
            peaks.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_critical_line_baseline() {
    let samples = &eight_threads().baseline;
    let zs = zero_times(60.0, 90.0);
    let radius = 2.0 * PI / 280f64.ln();
    let devs: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| far_from(s.t, &zs, radius))
        .map(|s| (s.t, s.smoothed.unwrap() + 0.5 * (s.t / (2.0 * PI)).ln()))
        .collect();
    let (t_worst, worst) = devs
        .iter()
        .fold((0.0, 0.0f64), |a, &(t, d)| if d.abs() > a.1 { (t, d.abs()) } else { a });
    let pass = !devs.is_empty() && worst <= 0.3;
    report(
        4,
        pass,
        &format!(
            "{} points outside zero neighborhoods, max deviation {worst:.4} at t = {t_worst:.2} (tol 0.3)",
            devs.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_eps_monotonicity() {
    let (low, high) = &eight_threads().monotone;
    let zs = zero_times(350.0, 360.0);
    let radius = 2.0 * PI / 6e6f64.ln();
    let mut total = 0usize;
    let mut ok = 0usize;
    for (a, b) in low.iter().zip(high) {
        if far_from(a.t, &zs, radius) {
            total += 1;
            ok += usize::from(b.smoothed.unwrap() >= a.smoothed.unwrap());
        }
    }
    let rate = ok as f64 / total.max(1) as f64;
    let pass = total > 0 && rate >= 0.99;
    report(
        5,
        pass,
        &format!("smoothed eps=0.05 >= eps=0 at {ok}/{total} points ({:.2}%, need 99%)", 100.0 * rate),
    );
    assert!(pass);
}

fn spread(records: &[EnvelopeRecord], lo: f64, hi: f64) -> f64 {
    let vals: Vec<f64> = records
        .iter()
        .filter(|r| r.x_lo >= lo && r.x_hi <= hi)
        .flat_map(|r| [r.value_at_lo, r.value_at_hi])
        .collect();
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

#[test]
fn criterion_06_stabilization() {
    let (e0, e1) = &eight_threads().envelopes;
    let mut pass = true;
    let mut detail = String::new();
    for (eps, records) in [(0.0, e0), (0.05, e1)] {
        let early = spread(records, 2.0, 1e6);
        let late = spread(records, 4e6, 1e7);
        let ratio = late / early;
        pass &= ratio.is_finite() && ratio <= 0.05;
        detail += &format!(
            "eps={eps}: late/early spread {ratio:.4}, final {:.4}; ",
            records.last().unwrap().value_at_hi
        );
    }
    let (c0, c1) = (e0.last().unwrap().value_at_hi, e1.last().unwrap().value_at_hi);
    let separation = c1 - c0;
    let late_spread = spread(e0, 4e6, 1e7).max(spread(e1, 4e6, 1e7));
    pass &= separation > late_spread;
    detail += &format!("separation {separation:.4} vs late spread {late_spread:.4} (tol ratio 0.05)");
    report(6, pass, &detail);
    assert!(pass);
}

#[test]
fn criterion_07_positivity() {
    let mut violations = Vec::new();
    let mut min_value = f64::INFINITY;
    let mut zero_failures = Vec::new();
    let mut zero_count = 0;
    for (lo, hi, step) in [(15.0, 100.0, 0.05), (1640.0, 1655.0, 0.02)] {
        let r = positivity_scan(lo, hi, step, DEFAULT_STEP).unwrap();
        violations.extend(r.violations);
        min_value = min_value.min(r.min_value.unwrap());
        for z in zero_locate(lo, hi).unwrap() {
            zero_count += 1;
            let d = discriminant(z.t_star, DEFAULT_STEP).unwrap();
            if d.normalized_value < d.g_prime * d.g_prime * (1.0 - 1e-6) {
                zero_failures.push(z.t_star);
            }
        }
    }
    let pass = violations.is_empty() && zero_failures.is_empty() && zero_count > 0;
    report(
        7,
        pass,
        &format!("min normalized value {min_value:.3e}, violations {violations:?}; {zero_count} zeros checked, failures {zero_failures:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_zero_table() {
    let expected = [1645.5737, 1646.624, 1648.270, 1649.118];
    let got = zero_times(1645.0, 1650.0);
    let pass = got.len() == expected.len() && got.iter().zip(expected).all(|(g, e)| (g - e).abs() <= 5e-3);
    let shown: Vec<String> = got.iter().map(|t| format!("{t:.4}")).collect();
    report(8, pass, &format!("zeros [{}] (tol 5e-3)", shown.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_09_determinism() {
    let eight = eight_threads().csv_files();
    let one = with_threads(1, Runs::compute).csv_files();
    let differing: Vec<&str> = eight.iter().zip(&one).filter(|(a, b)| a.1 != b.1).map(|(a, _)| a.0).collect();
    let bytes: usize = eight.iter().map(|f| f.1.len()).sum();
    let pass = differing.is_empty();
    report(
        9,
        pass,
        &format!(
            "{} CSV files, {bytes} bytes compared between 1 and 8 threads; differing {differing:?}",
            eight.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_formulation_consistency() {
    let engine = engine();
    let mut pass = true;
    let mut detail = Vec::new();
    for t in [700.3, 715.0, 728.6] {
        let params = SpectrumParams::new(t, 0.1, 30_000_000, 30_000_000, 3).unwrap();
        let arctan = engine.spectrum_value(&params).unwrap().value;
        let stieltjes = engine.spectrum_value_prime_powers(&params).unwrap().value;
        let (_, tau) = engine.power_tail(&params).unwrap();
        let diff = (arctan - stieltjes).abs();
        pass &= diff <= tau;
        detail.push(format!("t={t}: |diff| {diff:.3e}, tau {tau:.3e}"));
    }
    report(10, pass, &detail.join("; "));
    assert!(pass);
}
