//! CSV writers. Floats are written as `{:.16e}` (17 significant digits),
//! absent values as empty fields.

use std::io::Write;

use csv::Writer;

use crate::continuum::ContinuumRow;
use crate::dynamics::Evolution;
use crate::edgestates::EdgeState;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Spin};
use crate::stability::{EigenFlow, StabilityReport};
use crate::sweeps::SweepCell;

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

fn finish<W: Write>(mut w: Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// `x, re_L, im_L, re_R, im_R`.
pub fn write_edge_state<W: Write>(out: W, edge: &EdgeState) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record(["x", "re_L", "im_L", "re_R", "im_R"])?;
    let s = edge.amplitudes();
    for x in edge.lattice().positions() {
        let (l, r) = (s.get(x, Spin::L), s.get(x, Spin::R));
        w.write_record([x.to_string(), float(l.re), float(l.im), float(r.re), float(r.im)])?;
    }
    finish(w)
}

/// `kappa, re, im, trajectory_id`. Every report's spectrum is written with
/// its position as the id.
pub fn write_spectra<W: Write>(out: W, reports: &[StabilityReport]) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record(["kappa", "re", "im", "trajectory_id"])?;
    for r in reports {
        for (i, l) in r.spectrum.iter().enumerate() {
            w.write_record([float(r.kappa), float(l.re), float(l.im), i.to_string()])?;
        }
    }
    finish(w)
}

/// `kappa, re, im, trajectory_id` from a matched flow.
pub fn write_flow<W: Write>(out: W, flow: &EigenFlow) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record(["kappa", "re", "im", "trajectory_id"])?;
    for (k, row) in flow.kappas.iter().zip(&flow.positions) {
        for (t, l) in row.iter().enumerate() {
            w.write_record([float(*k), float(l.re), float(l.im), t.to_string()])?;
        }
    }
    finish(w)
}

/// `kappa, max_abs_lambda, bound, kappa_c, verdict`.
pub fn write_reports<W: Write>(out: W, reports: &[StabilityReport]) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record(["kappa", "max_abs_lambda", "bound", "kappa_c", "verdict"])?;
    for r in reports {
        w.write_record([
            float(r.kappa),
            float(r.max_modulus),
            float(r.bound),
            opt(r.kappa_c),
            r.verdict.to_string(),
        ])?;
    }
    finish(w)
}

/// `q, kappa, re_omega_1, im_omega_1, re_omega_2, im_omega_2, pt_phase`.
pub fn write_continuum<W: Write>(out: W, rows: &[ContinuumRow]) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record([
        "q",
        "kappa",
        "re_omega_1",
        "im_omega_1",
        "re_omega_2",
        "im_omega_2",
        "pt_phase",
    ])?;
    for r in rows {
        w.write_record([
            float(r.q),
            float(r.kappa),
            float(r.omega[0].re),
            float(r.omega[0].im),
            float(r.omega[1].re),
            float(r.omega[1].im),
            r.phase.to_string(),
        ])?;
    }
    finish(w)
}

/// `t, norm, F_0_plus, F_pi_plus, F_0_minus, F_pi_minus` (one column per
/// tracked edge, in tracking order), one row per record.
pub fn write_trajectory<W: Write>(out: W, ev: &Evolution) -> Result<()> {
    let mut w = Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "norm".to_string()];
    header.extend(ev.labels.iter().cloned());
    w.write_record(&header)?;
    for r in &ev.records {
        let mut row = vec![r.step.to_string(), float(r.norm)];
        row.extend(r.fidelities.iter().map(|&f| float(f)));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `x, prob`.
pub fn write_snapshot<W: Write>(out: W, lattice: Lattice, prob: &[f64]) -> Result<()> {
    if prob.len() != lattice.sites() {
        return Err(Error::DimensionMismatch {
            left: prob.len(),
            right: lattice.sites(),
        });
    }
    let mut w = Writer::from_writer(out);
    w.write_record(["x", "prob"])?;
    for (x, p) in lattice.positions().zip(prob) {
        w.write_record([x.to_string(), float(*p)])?;
    }
    finish(w)
}

/// `axis1, axis2, max_abs_lambda, fidelity_at_T, kappa_c_analytic, flags`.
pub fn write_sweep<W: Write>(out: W, cells: &[SweepCell]) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record([
        "axis1",
        "axis2",
        "max_abs_lambda",
        "fidelity_at_T",
        "kappa_c_analytic",
        "flags",
    ])?;
    for c in cells {
        w.write_record([
            float(c.angle),
            float(c.kappa),
            opt(c.max_abs_lambda),
            opt(c.fidelity_at_t),
            opt(c.kappa_c_analytic),
            c.flag_string(),
        ])?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgestates::{build_edge_single, Chirality, Quasienergy};

    #[test]
    fn full_precision_round_trip() {
        let v = 0.1f64 + 0.2;
        assert_eq!(float(v).parse::<f64>().unwrap(), v);
        assert_eq!(
            float(std::f64::consts::PI).parse::<f64>().unwrap(),
            std::f64::consts::PI
        );
    }

    #[test]
    fn edge_state_csv_shape() {
        let e = build_edge_single(Quasienergy::Zero, Chirality::Plus, 0.5, Lattice::new(2).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_edge_state(&mut buf, &e).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,re_L,im_L,re_R,im_R");
        assert_eq!(lines.len(), 9);
        assert!(lines[1].starts_with("-4,"));
    }

    #[test]
    fn snapshot_length_checked() {
        let l = Lattice::new(2).unwrap();
        assert!(write_snapshot(Vec::new(), l, &[0.0; 3]).is_err());
    }
}
