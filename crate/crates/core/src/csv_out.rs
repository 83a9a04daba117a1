//! CSV writers. Every float is written with 17 significant digits so that a
//! file round-trips exactly.

use std::io::Write;

use crate::equivalence::DiscriminantSample;
use crate::error::Result;
use crate::scalar::Real;
use crate::spectrum::{EnvelopeRecord, SpectrumSample, ZeroRecord};
use crate::xi_eval::ZValue;

pub fn fmt_float<T: Real>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

fn fmt_opt<T: Real>(x: Option<T>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

pub fn write_samples<W: Write, T: Real>(w: W, samples: &[SpectrumSample<T>]) -> Result<()> {
    let mut out = writer(
        w,
        &[
            "t",
            "eps",
            "p_star",
            "p_max",
            "sum_part",
            "li_part",
            "value",
            "smoothed",
            "slope_estimate",
        ],
    )?;
    for s in samples {
        out.write_record([
            fmt_float(s.t),
            fmt_float(s.eps),
            s.p_star.to_string(),
            s.p_max.to_string(),
            fmt_float(s.sum_part),
            fmt_float(s.li_part),
            fmt_float(s.value),
            fmt_opt(s.smoothed),
            fmt_opt(s.slope_estimate),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_zeros<W: Write, T: Real>(w: W, zeros: &[ZeroRecord<T>]) -> Result<()> {
    let mut out = writer(w, &["t_star", "bracket_lo", "bracket_hi", "residual"])?;
    for z in zeros {
        out.write_record([
            fmt_float(z.t_star),
            fmt_float(z.bracket.0),
            fmt_float(z.bracket.1),
            fmt_float(z.residual),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_envelope<W: Write, T: Real>(w: W, records: &[EnvelopeRecord<T>]) -> Result<()> {
    let mut out = writer(
        w,
        &[
            "k",
            "x_lo",
            "x_hi",
            "o_plus_j",
            "o_minus_j",
            "o_plus_li",
            "o_minus_li",
            "running_ratio",
            "value_at_lo",
            "value_at_hi",
        ],
    )?;
    for r in records {
        out.write_record([
            r.k.to_string(),
            fmt_float(r.x_lo),
            fmt_float(r.x_hi),
            fmt_float(r.o_plus_j),
            fmt_float(r.o_minus_j),
            fmt_float(r.o_plus_li),
            fmt_float(r.o_minus_li),
            fmt_float(r.running_ratio),
            fmt_float(r.value_at_lo),
            fmt_float(r.value_at_hi),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_positivity<W: Write, T: Real>(w: W, samples: &[DiscriminantSample<T>]) -> Result<()> {
    let mut out = writer(w, &["t", "normalized_value", "xi_hat", "floor_value", "violation"])?;
    for s in samples {
        out.write_record([
            fmt_float(s.t),
            fmt_float(s.normalized_value),
            fmt_float(s.xi_hat),
            fmt_float(s.floor_value),
            u8::from(s.is_violation()).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One row of a spectrum-versus-oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub eps: f64,
    pub p_star: u64,
    pub p_max: u64,
    pub spectrum: f64,
    pub oracle: f64,
}

pub fn write_compare<W: Write>(w: W, rows: &[CompareRow]) -> Result<()> {
    let mut out = writer(w, &["t", "eps", "p_star", "p_max", "spectrum", "oracle", "difference"])?;
    for r in rows {
        out.write_record([
            fmt_float(r.t),
            fmt_float(r.eps),
            r.p_star.to_string(),
            r.p_max.to_string(),
            fmt_float(r.spectrum),
            fmt_float(r.oracle),
            fmt_float(r.spectrum - r.oracle),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Rows `eps, p_max, value` of a stabilization matrix.
pub fn write_stabilization<W: Write, T: Real>(w: W, eps_list: &[T], checkpoints: &[u64], matrix: &[Vec<T>]) -> Result<()> {
    let mut out = writer(w, &["eps", "p_max", "value"])?;
    for (eps, row) in eps_list.iter().zip(matrix) {
        for (cp, v) in checkpoints.iter().zip(row) {
            out.write_record([fmt_float(*eps), cp.to_string(), fmt_float(*v)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One point of the `Z(t, eps)` phase curve; `phase_slope` is absent on the
/// critical line and next to zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRow<T = f64> {
    pub t: T,
    pub eps: T,
    pub z: ZValue<T>,
    pub phase_slope: Option<T>,
}

pub fn write_phase<W: Write, T: Real>(w: W, rows: &[PhaseRow<T>]) -> Result<()> {
    let mut out = writer(w, &["t", "eps", "z_re", "z_im", "phase", "phase_slope"])?;
    for r in rows {
        out.write_record([
            fmt_float(r.t),
            fmt_float(r.eps),
            fmt_float(r.z.re),
            fmt_float(r.z.im),
            fmt_float(r.z.phase()),
            fmt_opt(r.phase_slope),
        ])?;
    }
    out.flush()?;
    Ok(())
}
