//! Windowed phase spectrum of the Euler product, Riemann–Siegel style
//! evaluation of xi near the critical line, and the diagnostics built on them.
//!
//! Every numeric routine is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` / `*F32` aliases below name the concrete instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csv_out;
pub mod equivalence;
pub mod error;
pub mod euler_phase;
pub mod li_quadrature;
pub mod oracle;
pub mod primes;
pub mod quadrature;
pub mod scalar;
pub mod spectrum;
pub mod summation;
pub mod xi_eval;

pub use equivalence::{angular_momentum, discriminant, positivity_scan, DiscriminantSample, PositivityReport};
pub use error::{Error, Result};
pub use euler_phase::{euler_phase_sum, windowed_sum_delta, SpectrumParams};
pub use li_quadrature::{exp_cos_antideriv, exp_sin_antideriv, li_integral, li_window_integral, IbpCoefficients};
pub use primes::{prime_power_stream, sieve_segment, PrimePower, PrimeRange, Sieve};
pub use scalar::Real;
pub use spectrum::{EnvelopeRecord, SpectrumEngine, SpectrumSample, ZeroRecord};
pub use xi_eval::{c0, gamma_factor_phase_slope, z_approx, z_phase_slope, CriticalStripPoint, ZValue};

pub type SpectrumParamsF64 = SpectrumParams<f64>;
pub type SpectrumParamsF32 = SpectrumParams<f32>;
pub type CriticalStripPointF64 = CriticalStripPoint<f64>;
pub type CriticalStripPointF32 = CriticalStripPoint<f32>;
pub type ZValueF64 = ZValue<f64>;
pub type ZValueF32 = ZValue<f32>;
pub type SpectrumSampleF64 = SpectrumSample<f64>;
pub type SpectrumSampleF32 = SpectrumSample<f32>;
pub type EnvelopeRecordF64 = EnvelopeRecord<f64>;
pub type ZeroRecordF64 = ZeroRecord<f64>;
pub type DiscriminantSampleF64 = DiscriminantSample<f64>;
pub type PositivityReportF64 = PositivityReport<f64>;
pub type IbpCoefficientsF64 = IbpCoefficients<f64>;
pub type IbpCoefficientsF32 = IbpCoefficients<f32>;
pub type SpectrumEngineF64 = SpectrumEngine<f64>;
pub type SpectrumEngineF32 = SpectrumEngine<f32>;
