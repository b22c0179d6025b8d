//! Continuum-limit contrast for the single-step walk.
//!
//! Linearizing the continuum (Dirac-like) equation around a uniform edge
//! amplitude `|Φ|²` gives, for a plane wave of wave number `q`,
//! `Ω(q) = −2iκη|Φ|²·1 + Ω̃(q)` with
//!
//! ```text
//! Ω̃(q) = [[ q,              −iθ₀ + 2iκ|Φ|² ],
//!          [ iθ₀ + 2iκ|Φ|²,  −q            ]]
//! ```
//!
//! and eigenfrequencies `ω = −2iκη|Φ|² ± √(q² + θ₀² − 4κ²|Φ|⁴)`. `Ω̃` is
//! PT symmetric with `PT = σ₃K`; its eigenvalues leave the real axis once
//! the radicand turns negative, but `|Im ω̃| ≤ 2κ|Φ|²` always, so the sign
//! of `Im ω` is fixed by η alone and κ never changes the verdict.
//!
//! Nothing here feeds the discrete verdicts of [`crate::stability`].

use std::fmt;

use num_complex::Complex64;

use crate::edgestates::Chirality;
use crate::error::{Error, Result};
use crate::operators::Kappa;
use crate::stability::Verdict;
use crate::sweeps::Axis;

/// Radicands within this of zero are exceptional points.
pub const EXCEPTIONAL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuumParams {
    pub theta0: f64,
    pub kappa: Kappa,
    /// Uniform proxy for `|Φ_x|²`.
    pub phi2: f64,
    pub eta: Chirality,
    pub q: f64,
}

impl ContinuumParams {
    pub fn new(theta0: f64, kappa: Kappa, phi2: f64, eta: Chirality, q: f64) -> Result<Self> {
        if !(phi2.is_finite() && phi2 >= 0.0) {
            return Err(Error::Domain {
                name: "|Φ|²",
                value: phi2,
                domain: "[0, ∞)",
            });
        }
        Ok(ContinuumParams {
            theta0,
            kappa,
            phi2,
            eta,
            q,
        })
    }

    /// `q² + θ₀² − 4κ²|Φ|⁴`.
    pub fn radicand(&self) -> f64 {
        let g = self.kappa.value() * self.phi2;
        self.q * self.q + self.theta0 * self.theta0 - 4.0 * g * g
    }

    /// `2κ|Φ|²`, the gain/loss rate shared by both branches.
    pub fn damping(&self) -> f64 {
        2.0 * self.kappa.value() * self.phi2
    }
}

/// Both eigenvalues of `Ω̃(q)`: `±√radicand` on the principal branch.
pub fn omega_tilde(p: &ContinuumParams) -> [Complex64; 2] {
    let r = Complex64::new(p.radicand(), 0.0).sqrt();
    [r, -r]
}

/// Both eigenfrequencies `ω = −2iκη|Φ|² ± √radicand`.
pub fn omega(p: &ContinuumParams) -> [Complex64; 2] {
    let shift = Complex64::new(0.0, -p.eta.sign() * p.damping());
    omega_tilde(p).map(|w| w + shift)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtPhase {
    Unbroken,
    Broken,
    Exceptional,
}

impl fmt::Display for PtPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PtPhase::Unbroken => f.write_str("unbroken"),
            PtPhase::Broken => f.write_str("broken"),
            PtPhase::Exceptional => f.write_str("exceptional"),
        }
    }
}

pub fn pt_phase(p: &ContinuumParams) -> PtPhase {
    let r = p.radicand();
    if r.abs() <= EXCEPTIONAL_TOLERANCE {
        PtPhase::Exceptional
    } else if r > 0.0 {
        PtPhase::Unbroken
    } else {
        PtPhase::Broken
    }
}

pub type Mat2 = [[Complex64; 2]; 2];

/// `Ω̃(q)` as a 2×2 matrix.
pub fn omega_tilde_matrix(q: f64, theta0: f64, kappa: f64, phi2: f64) -> Mat2 {
    let g = 2.0 * kappa * phi2;
    [
        [Complex64::new(q, 0.0), Complex64::new(0.0, g - theta0)],
        [Complex64::new(0.0, theta0 + g), Complex64::new(-q, 0.0)],
    ]
}

/// Antiunitary candidates `AK` for the PT operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Antiunitary {
    /// `σ₃K`, the PT operator.
    Sigma3K,
    /// `σ₁K`, which is not a symmetry of `Ω̃`.
    Sigma1K,
}

/// `max |(A K) M (A K)⁻¹ − M|` entrywise, i.e. `A M* A − M` for a real
/// involutory Pauli `A`.
pub fn conjugation_residual(op: Antiunitary, m: &Mat2) -> f64 {
    let conj = m.map(|row| row.map(|z| z.conj()));
    let transformed: Mat2 = match op {
        Antiunitary::Sigma3K => [[conj[0][0], -conj[0][1]], [-conj[1][0], conj[1][1]]],
        Antiunitary::Sigma1K => [[conj[1][1], conj[1][0]], [conj[0][1], conj[0][0]]],
    };
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((transformed[i][j] - m[i][j]).norm());
        }
    }
    worst
}

/// Parameter grid for the continuum checks.
#[derive(Clone, Copy, Debug)]
pub struct ContinuumGrid {
    pub theta0: f64,
    pub phi2: f64,
    pub q: Axis,
    pub kappa: Axis,
}

impl ContinuumGrid {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.kappa
            .values()
            .into_iter()
            .flat_map(move |k| self.q.values().into_iter().map(move |q| (q, k)))
    }
}

/// Whether `op` commutes with `Ω̃` at every grid point to `tol`.
pub fn pt_operator_check(op: Antiunitary, grid: &ContinuumGrid, tol: f64) -> bool {
    grid.points().all(|(q, k)| {
        let m = omega_tilde_matrix(q, grid.theta0, k, grid.phi2);
        conjugation_residual(op, &m) <= tol
    })
}

/// Outcome of [`pt_irrelevance_check`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IrrelevanceReport {
    pub points: usize,
    /// Points with `2κ|Φ|² < |Im ω̃|`.
    pub inequality_violations: Vec<(f64, f64)>,
    /// Points with `κ|Φ|² > 0` where `sign(max Im ω) ≠ −η`.
    pub sign_violations: Vec<(f64, f64, Chirality)>,
    pub broken_points: usize,
    pub exceptional_points: usize,
}

impl IrrelevanceReport {
    pub fn passed(&self) -> bool {
        self.inequality_violations.is_empty() && self.sign_violations.is_empty()
    }
}

/// Verifies `2κ|Φ|² ≥ |Im ω̃|` and that the sign of `max Im ω` is `−η`
/// wherever `κ|Φ|² > 0`, on every grid point and for both chiralities.
pub fn pt_irrelevance_check(grid: &ContinuumGrid) -> Result<IrrelevanceReport> {
    let mut report = IrrelevanceReport::default();
    for (q, k) in grid.points() {
        let kappa = Kappa::new(k)?;
        report.points += 1;
        let base = ContinuumParams::new(grid.theta0, kappa, grid.phi2, Chirality::Plus, q)?;
        match pt_phase(&base) {
            PtPhase::Broken => report.broken_points += 1,
            PtPhase::Exceptional => report.exceptional_points += 1,
            PtPhase::Unbroken => {}
        }
        let im_tilde = omega_tilde(&base)[0].im.abs();
        if base.damping() + EXCEPTIONAL_TOLERANCE < im_tilde {
            report.inequality_violations.push((q, k));
        }
        if base.damping() > 0.0 {
            for eta in Chirality::BOTH {
                let p = ContinuumParams { eta, ..base };
                let max_im = omega(&p).iter().map(|w| w.im).fold(f64::NEG_INFINITY, f64::max);
                if max_im.signum() != -eta.sign() || max_im == 0.0 {
                    report.sign_violations.push((q, k, eta));
                }
            }
        }
    }
    Ok(report)
}

/// Continuum verdict over a set of wave numbers: stable iff every
/// `Im ω ≤ 0`.
pub fn continuum_verdict(theta0: f64, kappa: Kappa, phi2: f64, eta: Chirality, qs: &[f64]) -> Result<Verdict> {
    let mut max_im = f64::NEG_INFINITY;
    for &q in qs {
        let p = ContinuumParams::new(theta0, kappa, phi2, eta, q)?;
        for w in omega(&p) {
            max_im = max_im.max(w.im);
        }
    }
    Ok(if max_im <= 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    })
}

/// One row of the continuum table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuumRow {
    pub q: f64,
    pub kappa: f64,
    pub omega: [Complex64; 2],
    pub phase: PtPhase,
}

/// `ω` and PT phase on every grid point, κ-major.
pub fn continuum_table(grid: &ContinuumGrid, eta: Chirality) -> Result<Vec<ContinuumRow>> {
    grid.points()
        .map(|(q, k)| {
            let p = ContinuumParams::new(grid.theta0, Kappa::new(k)?, grid.phi2, eta, q)?;
            Ok(ContinuumRow {
                q,
                kappa: k,
                omega: omega(&p),
                phase: pt_phase(&p),
            })
        })
        .collect()
}
