use std::path::Path;

use prime_spectrum::oracle::{im_log_zeta, phase_slope_oracle, windowed_phase_slope_oracle, zeta_euler_maclaurin, zeta_eval};
use prime_spectrum::{euler_phase_sum, sieve_segment, windowed_sum_delta, PrimeRange, SpectrumEngine, SpectrumParams};

fn golden() -> Vec<(f64, f64, f64, f64)> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/zeta_golden.csv");
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.deserialize().map(|r| r.unwrap()).collect()
}

#[test]
fn zeta_matches_golden_values() {
    let rows = golden();
    assert!(rows.len() >= 6);
    for (sigma, t, re, im) in rows {
        let mag = re.hypot(im);
        let z = zeta_eval(sigma, t).unwrap();
        assert!((z.re - re).hypot(z.im - im) <= 1e-10 * mag, "{sigma} {t}: {z}");
        let w = zeta_euler_maclaurin(sigma, t).unwrap();
        assert!((w.re - re).hypot(w.im - im) <= 1e-10 * mag, "{sigma} {t}: {w}");
    }
}

#[test]
fn euler_sum_matches_log_zeta() {
    let primes = sieve_segment(PrimeRange::up_to(100_000)).unwrap();
    let phi = euler_phase_sum(10.0, 2.0, &primes).unwrap();
    assert!((phi - im_log_zeta(2.5, 10.0).unwrap()).abs() <= 1e-9);
}

#[test]
fn euler_sum_within_oscillatory_tail_bound() {
    let primes = sieve_segment(PrimeRange::up_to(1_000_000)).unwrap();
    let x = 1e6f64;
    for eps in [0.6, 0.8, 1.0, 1.5, 2.0] {
        let sigma = 0.5 + eps;
        for k in 1..=10 {
            let t = 5.0 * k as f64;
            let d = euler_phase_sum(t, eps, &primes).unwrap() - im_log_zeta(sigma, t).unwrap();
            let bound = 2.0 * x.powf(1.0 - sigma) / ((1.0 - sigma).hypot(t) * x.ln());
            assert!(d.abs() <= bound, "eps {eps} t {t}: {d:e} > {bound:e}");
            if eps >= 2.0 {
                assert!(d.abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn windowed_sum_sign_convention() {
    let primes = sieve_segment(PrimeRange::up_to(100_000)).unwrap();
    let params = SpectrumParams::new(20.0, 2.0, 100_000, 100_000, 3).unwrap();
    let delta = params.half_width();
    let expected = params.window_scale() * (im_log_zeta(2.5, 20.0 + delta).unwrap() - im_log_zeta(2.5, 20.0 - delta).unwrap());
    let got = windowed_sum_delta(&params, &primes).unwrap();
    assert!((got - expected).abs() <= 1e-8, "{got} vs {expected}");
    assert!(got.signum() == expected.signum());
}

#[test]
fn both_forms_match_windowed_oracle() {
    let engine = SpectrumEngine::<f64>::new(100_000).unwrap();
    let params = SpectrumParams::new(20.0, 2.0, 100_000, 100_000, 3).unwrap();
    let oracle = windowed_phase_slope_oracle(2.5, 20.0, 100_000).unwrap();
    let arctan = engine.spectrum_value(&params).unwrap().value;
    let powers = engine.spectrum_value_prime_powers(&params).unwrap().value;
    assert!((arctan - oracle).abs() <= 1e-6, "{arctan} vs {oracle}");
    assert!((powers - oracle).abs() <= 1e-6, "{powers} vs {oracle}");
}

#[test]
fn phase_slope_matches_differentiated_euler_sum() {
    let primes = sieve_segment(PrimeRange::up_to(1_000_000)).unwrap();
    let (sigma, t, h) = (2.5, 20.0, 1e-4);
    let eps = sigma - 0.5;
    let d = (euler_phase_sum(t + h, eps, &primes).unwrap() - euler_phase_sum(t - h, eps, &primes).unwrap()) / (2.0 * h);
    let pole = (sigma - 1.0) / ((sigma - 1.0) * (sigma - 1.0) + t * t);
    let oracle = phase_slope_oracle(sigma, t).unwrap();
    assert!((d + pole - oracle).abs() <= 1e-6, "{} vs {oracle}", d + pole);
}
