//! Parallel (angle, κ) grid scans.
//!
//! Each cell runs a spectral analysis (max |λ| of the linearized operator of
//! the η = + edge state), a dynamical run from a Gaussian state, or both.
//! Cells are independent and each solve is single-threaded, so the output
//! does not depend on the worker count.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rayon::prelude::*;

use crate::dynamics::{evolve, gaussian_initial, standard_edges, EvolveOptions, RecordSchedule};
use crate::edgestates::{
    build_edge_single, build_edge_two, classify_region, transform_edge, Chirality, Quasienergy, Region,
};
use crate::eigen::EigenSolver;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Sublattice};
use crate::operators::{Kappa, WalkModel};
use crate::stability::{analyze_single, analyze_two, kappa_c_single, kappa_c_two, AnalysisOptions};

/// Threshold on max |λ| used by [`threshold_extract`].
pub const THRESHOLD_EXCESS: f64 = 1e-6;

/// Points closer than this to an excluded line are excluded.
pub const EXCLUSION_TOLERANCE: f64 = 1e-12;

/// `count` evenly spaced values from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN bounds are rejected
    pub fn new(min: f64, max: f64, count: usize) -> Result<Axis> {
        if count == 0 || !min.is_finite() || !max.is_finite() || (count > 1 && !(max > min)) {
            return Err(Error::Mismatch(format!(
                "axis needs min < max and count ≥ 1 (got {min}, {max}, {count})"
            )));
        }
        Ok(Axis { min, max, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.min
        } else if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    /// Grid spacing; zero for a single point.
    pub fn step(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.count - 1) as f64
        }
    }
}

/// `θ₂ = −0.6 θ₁ + π/5`, the line the two-step sweep follows.
pub fn theta2_on_line(theta1: f64) -> f64 {
    -0.6 * theta1 + PI / 5.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepModel {
    /// Axis 1 is θ₀.
    Single,
    /// Axis 1 is θ₁; θ₂ follows [`theta2_on_line`].
    TwoOnLine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Spectral,
    Dynamical,
    Both,
}

impl SweepMode {
    fn spectral(self) -> bool {
        matches!(self, SweepMode::Spectral | SweepMode::Both)
    }

    fn dynamical(self) -> bool {
        matches!(self, SweepMode::Dynamical | SweepMode::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsSpec {
    pub m: usize,
    pub steps: u64,
    pub delta2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepGrid {
    pub model: SweepModel,
    pub angle: Axis,
    pub kappa: Axis,
    pub mode: SweepMode,
    /// Lattice half-width of the spectral analysis.
    pub spectral_m: usize,
    pub dynamics: DynamicsSpec,
    /// Sublattice of the two-step edge state and initial state. Required
    /// for the two-step model, ignored otherwise.
    pub parity: Option<Sublattice>,
}

impl SweepGrid {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN widths are rejected
    pub fn validate(&self) -> Result<()> {
        if self.angle.count < 2 || self.kappa.count < 2 {
            return Err(Error::Mismatch("sweep axes need at least 2 points".into()));
        }
        Kappa::new(self.kappa.min)?;
        if self.mode.spectral() {
            Lattice::new(self.spectral_m)?;
        }
        if self.mode.dynamical() {
            Lattice::new(self.dynamics.m)?;
            if !(self.dynamics.delta2 > 0.0) {
                return Err(Error::Domain {
                    name: "Δ²",
                    value: self.dynamics.delta2,
                    domain: "(0, ∞)",
                });
            }
        }
        if self.model == SweepModel::TwoOnLine && self.parity.is_none() {
            return Err(Error::Mismatch("two-step sweeps need an explicit parity".into()));
        }
        Ok(())
    }

    pub fn walk_model(&self, angle: f64) -> WalkModel {
        match self.model {
            SweepModel::Single => WalkModel::Single { theta0: angle },
            SweepModel::TwoOnLine => WalkModel::Two {
                theta1: angle,
                theta2: theta2_on_line(angle),
            },
        }
    }

    /// Why the point at this angle is skipped, if it is.
    pub fn exclusion(&self, angle: f64) -> Option<&'static str> {
        let near = |a: f64, b: f64| (a - b).abs() <= EXCLUSION_TOLERANCE;
        match self.walk_model(angle) {
            WalkModel::Single { theta0 } => (theta0 <= EXCLUSION_TOLERANCE
                || theta0 >= FRAC_PI_2 - EXCLUSION_TOLERANCE)
                .then_some("theta0 outside (0, pi/2)"),
            WalkModel::Two { theta1, theta2 } => {
                if near(theta1, 0.0) {
                    Some("theta1 = 0")
                } else if near(theta2, 0.0) {
                    Some("theta2 = 0")
                } else if near(theta1, theta2) {
                    Some("theta1 = theta2")
                } else if near(theta1, -theta2) {
                    Some("theta1 = -theta2")
                } else if classify_region(theta1, theta2) == Region::Undefined {
                    Some("outside regions A and B")
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellFlag {
    /// `e^{−2γm} ≥ 10⁻⁶`: edge states on the two walls overlap.
    OverlapSuspect,
    Excluded(&'static str),
    Failed(String),
}

impl fmt::Display for CellFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellFlag::OverlapSuspect => f.write_str("overlap-suspect"),
            CellFlag::Excluded(why) => write!(f, "excluded:{why}"),
            CellFlag::Failed(why) => write!(f, "failed:{why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub angle_index: usize,
    pub kappa_index: usize,
    pub angle: f64,
    pub kappa: f64,
    pub max_abs_lambda: Option<f64>,
    /// `max(F_{0,+}, F_{π,+})` (single-step) or `F_{π,+}` (two-step) at the
    /// final step.
    pub fidelity_at_t: Option<f64>,
    pub kappa_c_analytic: Option<f64>,
    pub flags: Vec<CellFlag>,
}

impl SweepCell {
    pub fn excluded(&self) -> bool {
        self.flags.iter().any(|f| matches!(f, CellFlag::Excluded(_)))
    }

    pub fn overlap_suspect(&self) -> bool {
        self.flags.contains(&CellFlag::OverlapSuspect)
    }

    /// Flags joined with `;`.
    pub fn flag_string(&self) -> String {
        self.flags.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
    }
}

/// Analytic κ_c and overlap flag of the η = + edge state at one angle.
fn analytic_threshold(grid: &SweepGrid, angle: f64, lattice: Lattice) -> Result<(f64, bool)> {
    match grid.walk_model(angle) {
        WalkModel::Single { theta0 } => {
            let e = build_edge_single(Quasienergy::Zero, Chirality::Plus, theta0, lattice)?;
            Ok((kappa_c_single(&e)?, e.overlap_suspect()))
        }
        WalkModel::Two { theta1, theta2 } => {
            let parity = grid.parity.unwrap_or(Sublattice::Even);
            let e = build_edge_two(Quasienergy::Pi, Chirality::Plus, theta1, theta2, lattice, parity)?;
            let t = transform_edge(&e, theta1, theta2)?;
            Ok((kappa_c_two(&e, &t)?, e.overlap_suspect()))
        }
    }
}

fn spectral_max(grid: &SweepGrid, angle: f64, kappa: Kappa) -> Result<f64> {
    let lattice = Lattice::new(grid.spectral_m)?;
    let solver = EigenSolver::sequential();
    let report = match grid.walk_model(angle) {
        WalkModel::Single { theta0 } => analyze_single(
            theta0,
            kappa,
            Quasienergy::Zero,
            Chirality::Plus,
            lattice,
            &solver,
            AnalysisOptions::default(),
        )?,
        WalkModel::Two { theta1, theta2 } => analyze_two(
            theta1,
            theta2,
            kappa,
            Quasienergy::Pi,
            Chirality::Plus,
            lattice,
            grid.parity.unwrap_or(Sublattice::Even),
            &solver,
            AnalysisOptions::default(),
        )?,
    };
    Ok(report.max_modulus)
}

fn dynamical_fidelity(grid: &SweepGrid, angle: f64, kappa: Kappa) -> Result<f64> {
    let lattice = Lattice::new(grid.dynamics.m)?;
    let model = grid.walk_model(angle);
    let parity = match grid.model {
        SweepModel::Single => None,
        SweepModel::TwoOnLine => grid.parity,
    };
    let state = gaussian_initial(grid.dynamics.delta2, lattice, parity)?;
    let edges = standard_edges(model, lattice, parity)?;
    // Single-step: either η = + state may be the attractor. Two-step: (π, +).
    let plus = match grid.model {
        SweepModel::Single => &edges[..2],
        SweepModel::TwoOnLine => &edges[1..2],
    };
    let options = EvolveOptions {
        schedule: RecordSchedule::Steps(vec![grid.dynamics.steps]),
        distributions: false,
        trace_stride: 0,
    };
    let ev = evolve(state, model, kappa, grid.dynamics.steps, plus, &options)?;
    let last = ev.records.last().expect("final step is always recorded");
    Ok(last.fidelities.iter().copied().fold(0.0, f64::max))
}

fn run_cell(grid: &SweepGrid, i: usize, j: usize) -> SweepCell {
    let angle = grid.angle.value(i);
    let kappa = grid.kappa.value(j);
    let mut cell = SweepCell {
        angle_index: i,
        kappa_index: j,
        angle,
        kappa,
        max_abs_lambda: None,
        fidelity_at_t: None,
        kappa_c_analytic: None,
        flags: Vec::new(),
    };
    if let Some(why) = grid.exclusion(angle) {
        cell.flags.push(CellFlag::Excluded(why));
        return cell;
    }
    let k = match Kappa::new(kappa) {
        Ok(k) => k,
        Err(e) => {
            cell.flags.push(CellFlag::Failed(e.to_string()));
            return cell;
        }
    };
    let m = if grid.mode.spectral() {
        grid.spectral_m
    } else {
        grid.dynamics.m
    };
    match Lattice::new(m).and_then(|l| analytic_threshold(grid, angle, l)) {
        Ok((kc, overlap)) => {
            cell.kappa_c_analytic = Some(kc);
            if overlap {
                cell.flags.push(CellFlag::OverlapSuspect);
            }
        }
        Err(e) => cell.flags.push(CellFlag::Failed(e.to_string())),
    }
    if grid.mode.spectral() {
        match spectral_max(grid, angle, k) {
            Ok(v) => cell.max_abs_lambda = Some(v),
            Err(e) => cell.flags.push(CellFlag::Failed(e.to_string())),
        }
    }
    if grid.mode.dynamical() {
        match dynamical_fidelity(grid, angle, k) {
            Ok(v) => cell.fidelity_at_t = Some(v),
            Err(e) => cell.flags.push(CellFlag::Failed(e.to_string())),
        }
    }
    cell
}

/// Runs every cell of `grid` on a pool of `workers` threads (0 picks the
/// rayon default). Cells come back angle-major, κ-minor.
pub fn run_sweep(grid: &SweepGrid, workers: usize) -> Result<Vec<SweepCell>> {
    grid.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Mismatch(format!("cannot start worker pool: {e}")))?;
    let (na, nk) = (grid.angle.count, grid.kappa.count);
    Ok(pool.install(|| {
        (0..na * nk)
            .into_par_iter()
            .map(|c| run_cell(grid, c / nk, c % nk))
            .collect()
    }))
}

/// Empirical and analytic thresholds of one angle column.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleThreshold {
    pub angle: f64,
    pub kappa_c_analytic: Option<f64>,
    /// Smallest κ with `max|λ| > 1 + THRESHOLD_EXCESS`.
    pub empirical: Option<f64>,
    pub overlap_suspect: bool,
    pub excluded: bool,
}

impl AngleThreshold {
    /// Whether the empirical threshold lies within `step` of the analytic
    /// one. A column with no empirical threshold agrees when the analytic
    /// value is at or beyond the last grid κ minus `step`.
    pub fn agrees(&self, step: f64, kappa_max: f64) -> bool {
        match (self.kappa_c_analytic, self.empirical) {
            (Some(kc), Some(e)) => (e - kc).abs() <= step,
            (Some(kc), None) => kc >= kappa_max - step,
            (None, _) => false,
        }
    }
}

/// Per-angle thresholds from spectral cells.
pub fn threshold_extract(cells: &[SweepCell]) -> Vec<AngleThreshold> {
    let mut angles: Vec<usize> = cells.iter().map(|c| c.angle_index).collect();
    angles.sort_unstable();
    angles.dedup();
    angles
        .into_iter()
        .map(|a| {
            let mut column: Vec<&SweepCell> = cells.iter().filter(|c| c.angle_index == a).collect();
            column.sort_by_key(|c| c.kappa_index);
            AngleThreshold {
                angle: column[0].angle,
                kappa_c_analytic: column.iter().find_map(|c| c.kappa_c_analytic),
                empirical: column
                    .iter()
                    .find(|c| c.max_abs_lambda.is_some_and(|v| v > 1.0 + THRESHOLD_EXCESS))
                    .map(|c| c.kappa),
                overlap_suspect: column.iter().any(|c| c.overlap_suspect()),
                excluded: column.iter().any(|c| c.excluded()),
            }
        })
        .collect()
}

/// Defaults for the two reproduction scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

impl Scale {
    /// `(spectral m, dynamical m, dynamical T)`.
    pub fn defaults(self) -> (usize, usize, u64) {
        match self {
            Scale::Desk => (100, 50, 100_000),
            Scale::Paper => (100, 100, 3_000_000),
        }
    }
}
