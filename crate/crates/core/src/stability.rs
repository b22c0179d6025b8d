//! Linear stability of edge states under the nonlinear walks.
//!
//! A small fluctuation `|δψ⟩` around a stationary edge state `|Φ⟩` evolves
//! under a real, non-unitary operator: `V₁ = U₁ D_{κ,η}(|Φ|)` for the
//! single-step walk and `V₂ = U₂ᵦ D_{−κ,η̃}(|Φ̃|) U₂ₐ D_{κ,η}(|Φ|)` for the
//! two-step walk, with `|Φ̃⟩ = U₂ₐ|Φ⟩`. `D` is block diagonal with 2×2
//! blocks `(1 − 2κηw)·1 + 2κw·σ₁`, `w = |Φ_{x,L}|²`, whose eigenvalues are
//! `1` and `1 − 4κηw`.
//!
//! The edge state is an attractor when every eigenvalue of `V` sits on or
//! inside the unit circle. Since `U` is unitary, `max|λ| ≤ ‖D‖`, which gives
//! the closed-form bounds and thresholds below.

use std::f64::consts::PI;
use std::fmt;

use faer::{Mat, MatRef};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::edgestates::{build_edge_single, build_edge_two, transform_edge, Chirality, EdgeState, Quasienergy};
use crate::eigen::{self, EigenSolver, Eigenpairs};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Sublattice};
use crate::operators::{dense_from_operator, CoinProfile, Factor, Kappa, LinearWalk, WalkModel};

/// Stable iff `max|λ| ≤ 1 + STABILITY_TOLERANCE`.
pub const STABILITY_TOLERANCE: f64 = 1e-9;

/// Matching tolerance of [`quartet_check`].
pub const QUARTET_TOLERANCE: f64 = 1e-8;

/// Block-diagonal `D_{κ,η}(|Φ|)`. `kappa` is signed so that the
/// `D_{−κ,η̃}` factor of `V₂` is representable.
#[derive(Clone, Debug)]
pub struct DOperator {
    kappa: f64,
    eta: Chirality,
    weights: Vec<f64>,
}

impl DOperator {
    /// `weights[site] = |Φ_{x,L}|²`, ordered by x.
    pub fn new(kappa: f64, eta: Chirality, weights: Vec<f64>) -> DOperator {
        DOperator { kappa, eta, weights }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eta(&self) -> Chirality {
        self.eta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `[[a, b], [b, a]]` with `a = 1 − 2κηw`, `b = 2κw`.
    pub fn block(&self, site: usize) -> [[f64; 2]; 2] {
        let w = self.weights[site];
        let a = 1.0 - 2.0 * self.kappa * self.eta.sign() * w;
        let b = 2.0 * self.kappa * w;
        [[a, b], [b, a]]
    }

    /// `(1, 1 − 4κηw)`.
    pub fn block_eigenvalues(&self, site: usize) -> (f64, f64) {
        (1.0, 1.0 - 4.0 * self.kappa * self.eta.sign() * self.weights[site])
    }

    /// `max_x max(1, |1 − 4κηw_x|)`, the operator norm of `D`.
    pub fn norm(&self) -> f64 {
        (0..self.weights.len())
            .map(|s| self.block_eigenvalues(s).1.abs())
            .fold(1.0, f64::max)
    }

    pub fn apply(&self, amps: &mut [Complex64]) {
        for (site, pair) in amps.chunks_exact_mut(2).enumerate() {
            let [[a, b], _] = self.block(site);
            let (l, r) = (pair[0], pair[1]);
            pair[0] = l * a + r * b;
            pair[1] = l * b + r * a;
        }
    }
}

/// `D_{κ,η}(|Φ|)` for an edge state.
pub fn build_d(kappa: Kappa, eta: Chirality, edge: &EdgeState) -> DOperator {
    DOperator::new(kappa.value(), eta, edge.weights())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearizedModel {
    V1,
    V2,
}

/// Dense matrix of `V₁` or `V₂` with the data it was built from.
#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    matrix: Mat<Complex64>,
    model: LinearizedModel,
    walk: WalkModel,
    lattice: Lattice,
    kappa: Kappa,
    quasienergy: Quasienergy,
    chirality: Chirality,
}

impl LinearizedOperator {
    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    pub fn model(&self) -> LinearizedModel {
        self.model
    }

    pub fn walk(&self) -> WalkModel {
        self.walk
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn quasienergy(&self) -> Quasienergy {
        self.quasienergy
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// All `8m` eigenvalues. `V₂` is solved block by block on the two
    /// sublattices, which it never couples.
    pub fn spectrum(&self, solver: &EigenSolver) -> Result<Vec<Complex64>> {
        match self.model {
            LinearizedModel::V1 => solver.eigenvalues(self.matrix()),
            LinearizedModel::V2 => solver.eigenvalues_blocked(self.matrix(), &parity_groups(self.lattice)),
        }
    }

    pub fn eigenpairs(&self, solver: &EigenSolver) -> Result<Eigenpairs> {
        solver.eigenpairs(self.matrix())
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        eigen::spectral_norm(self.matrix())
    }

    /// `‖VΦ − e^{-iε}Φ‖`.
    pub fn edge_residual(&self, edge: &EdgeState) -> f64 {
        let v = edge.amplitudes().amplitudes();
        let mu = edge.quasienergy().eigenvalue();
        let m = self.matrix();
        (0..self.dim())
            .map(|i| {
                let row: Complex64 = (0..self.dim()).map(|j| m[(i, j)] * v[j]).sum();
                (row - v[i] * mu).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Amplitude indices on even sites and on odd sites.
pub fn parity_groups(lattice: Lattice) -> Vec<Vec<usize>> {
    let mut even = Vec::with_capacity(lattice.dim() / 2);
    let mut odd = Vec::with_capacity(lattice.dim() / 2);
    for i in 0..lattice.dim() {
        if Sublattice::of(lattice.position(i / 2)) == Sublattice::Even {
            even.push(i);
        } else {
            odd.push(i);
        }
    }
    vec![even, odd]
}

/// `V₁ = U₁ D_{κ,η}(|Φ|)`.
pub fn build_v1(theta0: f64, kappa: Kappa, edge: &EdgeState) -> Result<LinearizedOperator> {
    match edge.model() {
        WalkModel::Single { theta0: t } if t == theta0 => {}
        other => {
            return Err(Error::Mismatch(format!(
                "V1 at θ0 = {theta0} requested for an edge state of {other:?}"
            )))
        }
    }
    let lattice = edge.lattice();
    let walk = LinearWalk::new(CoinProfile::single(lattice, theta0));
    let d = build_d(kappa, edge.chirality(), edge);
    let matrix = dense_from_operator(lattice.dim(), |v| {
        d.apply(v);
        walk.apply(Factor::U1, v);
    });
    Ok(LinearizedOperator {
        matrix,
        model: LinearizedModel::V1,
        walk: edge.model(),
        lattice,
        kappa,
        quasienergy: edge.quasienergy(),
        chirality: edge.chirality(),
    })
}

fn check_pair(theta1: f64, theta2: f64, edge: &EdgeState, tilde: &EdgeState) -> Result<()> {
    let want = WalkModel::Two { theta1, theta2 };
    let mismatch = |what: &str| Err(Error::Mismatch(what.to_string()));
    if edge.model() != want || tilde.model() != want {
        return mismatch("edge states were built for different coin angles");
    }
    if edge.is_transformed() || !tilde.is_transformed() {
        return mismatch("expected an edge state and its U2a transform");
    }
    if edge.lattice() != tilde.lattice() || edge.quasienergy() != tilde.quasienergy() {
        return mismatch("edge state and transform differ in lattice or quasienergy");
    }
    if tilde.chirality() != edge.chirality().transformed(edge.quasienergy()) {
        return mismatch("transform carries the wrong chirality");
    }
    Ok(())
}

/// `V₂ = U₂ᵦ D_{−κ,η̃}(|Φ̃|) U₂ₐ D_{κ,η}(|Φ|)`.
pub fn build_v2(
    theta1: f64,
    theta2: f64,
    kappa: Kappa,
    edge: &EdgeState,
    tilde: &EdgeState,
) -> Result<LinearizedOperator> {
    check_pair(theta1, theta2, edge, tilde)?;
    let lattice = edge.lattice();
    let walk = LinearWalk::new(CoinProfile::two(lattice, theta1, theta2));
    let d = build_d(kappa, edge.chirality(), edge);
    let d_tilde = DOperator::new(-kappa.value(), tilde.chirality(), tilde.weights());
    let matrix = dense_from_operator(lattice.dim(), |v| {
        d.apply(v);
        walk.apply(Factor::U2a, v);
        d_tilde.apply(v);
        walk.apply(Factor::U2b, v);
    });
    Ok(LinearizedOperator {
        matrix,
        model: LinearizedModel::V2,
        walk: edge.model(),
        lattice,
        kappa,
        quasienergy: edge.quasienergy(),
        chirality: edge.chirality(),
    })
}

/// `max_x max(1, |1 − 4κη|Φ_x|²|)`.
pub fn bound_single(kappa: Kappa, eta: Chirality, edge: &EdgeState) -> f64 {
    build_d(kappa, eta, edge).norm()
}

/// `max_x max(1, |δ₂(x)|) · max_x max(1, |δ̃₂(x)|)` with
/// `δ₂ = 1 − 4κη|Φ_x|²` and `δ̃₂ = 1 + 4κη̃|Φ̃_x|²`.
pub fn bound_two(kappa: Kappa, edge: &EdgeState, tilde: &EdgeState) -> f64 {
    let d = build_d(kappa, edge.chirality(), edge);
    let d_tilde = DOperator::new(-kappa.value(), tilde.chirality(), tilde.weights());
    d.norm() * d_tilde.norm()
}

/// `κ_c = 1 / (2 max_x |Φ_x|²)` for an η = + single-step edge state.
pub fn kappa_c_single(edge: &EdgeState) -> Result<f64> {
    if !matches!(edge.model(), WalkModel::Single { .. }) || edge.chirality() != Chirality::Plus {
        return Err(Error::Mismatch(
            "κ_c is defined for η = + single-step edge states".into(),
        ));
    }
    Ok(0.5 / edge.max_weight())
}

/// `κ_c = 1 / (2 max_x(|Φ_x|², |Φ̃_x|²))` for the (π, +) two-step edge state.
pub fn kappa_c_two(edge: &EdgeState, tilde: &EdgeState) -> Result<f64> {
    if edge.quasienergy() != Quasienergy::Pi || edge.chirality() != Chirality::Plus {
        return Err(Error::Mismatch(
            "κ_c is defined for the (π, +) two-step edge state".into(),
        ));
    }
    if let WalkModel::Two { theta1, theta2 } = edge.model() {
        check_pair(theta1, theta2, edge, tilde)?;
    } else {
        return Err(Error::Mismatch(
            "κ_c two-step requested for a single-step edge state".into(),
        ));
    }
    Ok(0.5 / edge.max_weight().max(tilde.max_weight()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
}

impl Verdict {
    pub fn from_max_modulus(max_modulus: f64) -> Verdict {
        if max_modulus <= 1.0 + STABILITY_TOLERANCE {
            Verdict::Stable
        } else {
            Verdict::Unstable
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Stable => f.write_str("stable"),
            Verdict::Unstable => f.write_str("unstable"),
        }
    }
}

/// Spectrum of `V` at one κ with its bound and threshold.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub kappa: f64,
    pub quasienergy: Quasienergy,
    pub chirality: Chirality,
    pub spectrum: Vec<Complex64>,
    pub max_modulus: f64,
    pub bound: f64,
    /// Only defined for the η = + (single) and (π, +) (two-step) states.
    pub kappa_c: Option<f64>,
    /// Largest singular value of `V`, if requested.
    pub spectral_norm: Option<f64>,
    pub verdict: Verdict,
    /// The analytic edge state was flagged as overlapping its partner.
    pub overlap_suspect: bool,
}

/// What to compute besides the spectrum.
#[derive(Clone, Copy, Debug, Default)]
pub struct AnalysisOptions {
    pub spectral_norm: bool,
    /// Multiply the edge amplitudes by `1/√2` (mixed-parity initial states).
    pub mixed_parity_rescale: bool,
}

fn finish_report(
    v: &LinearizedOperator,
    solver: &EigenSolver,
    bound: f64,
    kappa_c: Option<f64>,
    overlap_suspect: bool,
    options: AnalysisOptions,
) -> Result<StabilityReport> {
    let spectrum = v.spectrum(solver)?;
    let max_modulus = eigen::spectral_radius(&spectrum);
    let spectral_norm = if options.spectral_norm {
        Some(v.spectral_norm()?)
    } else {
        None
    };
    Ok(StabilityReport {
        kappa: v.kappa().value(),
        quasienergy: v.quasienergy(),
        chirality: v.chirality(),
        spectrum,
        max_modulus,
        bound,
        kappa_c,
        spectral_norm,
        verdict: Verdict::from_max_modulus(max_modulus),
        overlap_suspect,
    })
}

fn rescale(edge: EdgeState, options: AnalysisOptions) -> EdgeState {
    if options.mixed_parity_rescale {
        edge.scaled(std::f64::consts::FRAC_1_SQRT_2)
    } else {
        edge
    }
}

/// Builds the edge state, `V₁` and its report.
pub fn analyze_single(
    theta0: f64,
    kappa: Kappa,
    eps: Quasienergy,
    eta: Chirality,
    lattice: Lattice,
    solver: &EigenSolver,
    options: AnalysisOptions,
) -> Result<StabilityReport> {
    let edge = rescale(build_edge_single(eps, eta, theta0, lattice)?, options);
    let v = build_v1(theta0, kappa, &edge)?;
    let kappa_c = kappa_c_single(&edge).ok();
    finish_report(
        &v,
        solver,
        bound_single(kappa, eta, &edge),
        kappa_c,
        edge.overlap_suspect(),
        options,
    )
}

/// Builds the edge state on `parity`, its transform, `V₂` and its report.
#[allow(clippy::too_many_arguments)]
pub fn analyze_two(
    theta1: f64,
    theta2: f64,
    kappa: Kappa,
    eps: Quasienergy,
    eta: Chirality,
    lattice: Lattice,
    parity: Sublattice,
    solver: &EigenSolver,
    options: AnalysisOptions,
) -> Result<StabilityReport> {
    let edge = build_edge_two(eps, eta, theta1, theta2, lattice, parity)?;
    let tilde = rescale(transform_edge(&edge, theta1, theta2)?, options);
    let edge = rescale(edge, options);
    let v = build_v2(theta1, theta2, kappa, &edge, &tilde)?;
    let kappa_c = kappa_c_two(&edge, &tilde).ok();
    finish_report(
        &v,
        solver,
        bound_two(kappa, &edge, &tilde),
        kappa_c,
        edge.overlap_suspect(),
        options,
    )
}

/// Which partner of a spectral quartet is missing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Partner {
    /// `−λ`
    Negated,
    /// `λ*`
    Conjugate,
    /// `−λ*`
    NegatedConjugate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuartetViolation {
    pub index: usize,
    pub value: Complex64,
    pub missing: Partner,
}

/// Checks that `spectrum` is closed, as a multiset, under `λ ↦ −λ`,
/// `λ ↦ λ*` and `λ ↦ −λ*`, matching within `tol`. Returns the entries
/// whose partner could not be matched.
pub fn quartet_check(spectrum: &[Complex64], tol: f64) -> Vec<QuartetViolation> {
    let mut order: Vec<usize> = (0..spectrum.len()).collect();
    order.sort_by(|&a, &b| spectrum[a].re.total_cmp(&spectrum[b].re));
    let sorted_re: Vec<f64> = order.iter().map(|&i| spectrum[i].re).collect();

    let mut violations = Vec::new();
    for (partner, map) in [
        (Partner::Negated, (|z: Complex64| -z) as fn(Complex64) -> Complex64),
        (Partner::Conjugate, |z: Complex64| z.conj()),
        (Partner::NegatedConjugate, |z: Complex64| -z.conj()),
    ] {
        let mut used = vec![false; spectrum.len()];
        for (i, &z) in spectrum.iter().enumerate() {
            let target = map(z);
            let lo = sorted_re.partition_point(|&r| r < target.re - tol);
            let best = (lo..order.len())
                .take_while(|&k| sorted_re[k] <= target.re + tol)
                .filter(|&k| !used[k])
                .map(|k| (k, (spectrum[order[k]] - target).norm()))
                .filter(|&(_, d)| d <= tol)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((k, _)) => used[k] = true,
                None => violations.push(QuartetViolation {
                    index: i,
                    value: z,
                    missing: partner,
                }),
            }
        }
    }
    violations
}

/// `ξ = i log λ` on the principal branch: `Re ξ = −arg λ ∈ (−π, π]`,
/// `Im ξ = log|λ|`, so `|λ| > 1 ⇔ Im ξ > 0`.
pub fn quasienergy_of(lambda: Complex64) -> Result<Complex64> {
    if lambda == Complex64::default() {
        return Err(Error::ZeroEigenvalue);
    }
    // `+ 0.0` turns −0 (positive real λ) into +0
    let mut re = -lambda.arg() + 0.0;
    if re <= -PI {
        re += 2.0 * PI;
    }
    Ok(Complex64::new(re, lambda.norm().ln()))
}

/// Tuning of [`match_flow`].
#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    /// A matched move longer than this flags the κ step as too coarse.
    pub jump_threshold: f64,
    /// Two candidates whose distances differ by less than this fraction
    /// flag the match as ambiguous.
    pub ambiguity_ratio: f64,
    /// Candidates closer together than this are interchangeable.
    pub degeneracy: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            jump_threshold: 0.1,
            ambiguity_ratio: 0.25,
            degeneracy: 1e-7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlowWarning {
    LargeJump {
        kappa_lo: f64,
        kappa_hi: f64,
        trajectory: usize,
        distance: f64,
    },
    Ambiguous {
        kappa_lo: f64,
        kappa_hi: f64,
        trajectory: usize,
    },
}

/// Spectra along a κ grid. `positions[s][t]` is trajectory `t` at step `s`.
#[derive(Clone, Debug)]
pub struct EigenFlow {
    pub kappas: Vec<f64>,
    pub positions: Vec<Vec<Complex64>>,
    pub warnings: Vec<FlowWarning>,
}

/// A trajectory that moves along the real axis through the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OriginCrossing {
    pub trajectory: usize,
    pub kappa_before: f64,
    pub kappa_after: f64,
    pub before: Complex64,
    pub after: Complex64,
}

impl EigenFlow {
    pub fn trajectory_count(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    pub fn trajectory(&self, id: usize) -> Vec<(f64, Complex64)> {
        self.kappas
            .iter()
            .zip(&self.positions)
            .map(|(&k, p)| (k, p[id]))
            .collect()
    }

    /// Errors on the first ambiguous match, for callers that need a clean
    /// labelling.
    pub fn strict(self) -> Result<EigenFlow> {
        for w in &self.warnings {
            if let FlowWarning::Ambiguous { kappa_lo, kappa_hi, .. } = *w {
                return Err(Error::AmbiguousMatching { kappa_lo, kappa_hi });
            }
        }
        Ok(self)
    }

    /// Trajectories that are real on both sides of a κ step, change sign,
    /// and stay within `radius` of the origin.
    pub fn origin_crossings(&self, radius: f64) -> Vec<OriginCrossing> {
        let mut out = Vec::new();
        for s in 1..self.positions.len() {
            for t in 0..self.trajectory_count() {
                let (a, b) = (self.positions[s - 1][t], self.positions[s][t]);
                if a.im == 0.0 && b.im == 0.0 && a.re * b.re < 0.0 && a.norm() < radius && b.norm() < radius {
                    out.push(OriginCrossing {
                        trajectory: t,
                        kappa_before: self.kappas[s - 1],
                        kappa_after: self.kappas[s],
                        before: a,
                        after: b,
                    });
                }
            }
        }
        out
    }
}

/// Labels consecutive spectra into continuous trajectories.
///
/// Each trajectory's next position is predicted by linear extrapolation from
/// its last two points (scaled by the κ step), then predictions and new
/// eigenvalues are paired greedily by increasing distance. Extrapolation is
/// what lets two eigenvalues meeting head-on pass through each other instead
/// of bouncing back.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails the ordering check
pub fn match_flow(kappas: &[f64], spectra: Vec<Vec<Complex64>>, options: FlowOptions) -> Result<EigenFlow> {
    if kappas.len() != spectra.len() {
        return Err(Error::DimensionMismatch {
            left: kappas.len(),
            right: spectra.len(),
        });
    }
    if kappas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Mismatch("κ grid must be strictly ascending".into()));
    }
    let mut spectra = spectra.into_iter();
    let Some(first) = spectra.next() else {
        return Ok(EigenFlow {
            kappas: Vec::new(),
            positions: Vec::new(),
            warnings: Vec::new(),
        });
    };
    let n = first.len();
    let mut positions = vec![first];
    let mut warnings = Vec::new();
    const NEIGHBOURS: usize = 6;

    for (s, next) in spectra.enumerate().map(|(i, v)| (i + 1, v)) {
        if next.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: next.len(),
            });
        }
        let (k_lo, k_hi) = (kappas[s - 1], kappas[s]);
        let prev = &positions[s - 1];
        let predicted: Vec<Complex64> = if s >= 2 {
            let ratio = (k_hi - k_lo) / (k_lo - kappas[s - 2]);
            prev.iter()
                .zip(&positions[s - 2])
                .map(|(&a, &b)| a + (a - b) * ratio)
                .collect()
        } else {
            prev.clone()
        };

        let mut candidates = Vec::with_capacity(n * NEIGHBOURS);
        for (t, &p) in predicted.iter().enumerate() {
            let mut near: Vec<(f64, usize)> = next.iter().enumerate().map(|(j, &z)| ((z - p).norm(), j)).collect();
            let k = NEIGHBOURS.min(n);
            near.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0));
            near.truncate(k);
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            if near.len() >= 2 {
                let (d1, j1) = near[0];
                let (d2, j2) = near[1];
                let distinct = (next[j1] - next[j2]).norm() > options.degeneracy;
                if distinct && d1 > options.degeneracy && d2 - d1 < options.ambiguity_ratio * d1 {
                    warnings.push(FlowWarning::Ambiguous {
                        kappa_lo: k_lo,
                        kappa_hi: k_hi,
                        trajectory: t,
                    });
                }
            }
            candidates.extend(near.into_iter().map(|(d, j)| (d, t, j)));
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut assigned = vec![usize::MAX; n];
        let mut taken = vec![false; n];
        for (_, t, j) in candidates {
            if assigned[t] == usize::MAX && !taken[j] {
                assigned[t] = j;
                taken[j] = true;
            }
        }
        // Leftovers whose short lists were exhausted pair up by brute force.
        for t in 0..n {
            if assigned[t] == usize::MAX {
                let j = (0..n)
                    .filter(|&j| !taken[j])
                    .min_by(|&a, &b| {
                        (next[a] - predicted[t])
                            .norm()
                            .total_cmp(&(next[b] - predicted[t]).norm())
                    })
                    .expect("as many free eigenvalues as unassigned trajectories");
                assigned[t] = j;
                taken[j] = true;
            }
        }

        let row: Vec<Complex64> = assigned.iter().map(|&j| next[j]).collect();
        for (t, (&z, &p)) in row.iter().zip(prev).enumerate() {
            let d = (z - p).norm();
            if d > options.jump_threshold {
                warnings.push(FlowWarning::LargeJump {
                    kappa_lo: k_lo,
                    kappa_hi: k_hi,
                    trajectory: t,
                    distance: d,
                });
            }
        }
        positions.push(row);
    }
    Ok(EigenFlow {
        kappas: kappas.to_vec(),
        positions,
        warnings,
    })
}

/// Which linearized operator a flow follows.
#[derive(Clone, Copy, Debug)]
pub enum FlowModel {
    Single {
        theta0: f64,
    },
    Two {
        theta1: f64,
        theta2: f64,
        parity: Sublattice,
    },
}

/// Spectra of `V` along an ascending κ grid, solved in parallel, then
/// matched into trajectories.
pub fn eigenvalue_flow(
    model: FlowModel,
    eps: Quasienergy,
    eta: Chirality,
    lattice: Lattice,
    kappas: &[f64],
    options: FlowOptions,
) -> Result<EigenFlow> {
    let solver = EigenSolver::sequential();
    let spectra = kappas
        .par_iter()
        .map(|&k| {
            let kappa = Kappa::new(k)?;
            let report = match model {
                FlowModel::Single { theta0 } => {
                    analyze_single(theta0, kappa, eps, eta, lattice, &solver, AnalysisOptions::default())?
                }
                FlowModel::Two { theta1, theta2, parity } => analyze_two(
                    theta1,
                    theta2,
                    kappa,
                    eps,
                    eta,
                    lattice,
                    parity,
                    &solver,
                    AnalysisOptions::default(),
                )?,
            };
            Ok(report.spectrum)
        })
        .collect::<Result<Vec<_>>>()?;
    match_flow(kappas, spectra, options)
}
