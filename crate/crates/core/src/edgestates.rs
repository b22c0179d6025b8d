//! Analytic topological edge states of the single-step and two-step walks.
//!
//! Edge states are labelled by quasienergy ε ∈ {0, π} (eigenvalue `e^{-iε}`
//! of the one-period map) and chirality η = ±1 (eigenvalue of Γ = 1ₓ ⊗ σ₁,
//! which forces `Φ_{x,R} = η Φ_{x,L}`). Profiles are exponentials anchored on
//! the sites next to the coin-sign domain walls at `x = ±m`; overlap between
//! the two domain walls is neglected, which is what the validity gate
//! [`OVERLAP_GATE`] measures.
//!
//! Global phase: amplitudes are real and `Φ_L` is positive at the inner anchor.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Spin, Sublattice, WalkerState};
use crate::operators::{CoinProfile, Factor, LinearWalk, WalkModel};

/// Edge states with `e^{-2γm}` at or above this are flagged as overlapping
/// their partner on the opposite boundary.
pub const OVERLAP_GATE: f64 = 1e-6;

/// Tolerance of the Γ-eigenrelation check in [`transform_edge`], relative to
/// the state norm, on top of [`RESIDUAL_ALLOWANCE`].
pub const CHIRALITY_TOLERANCE: f64 = 1e-10;

/// Multiple of the input's [`EdgeState::eigen_residual`] tolerated by
/// [`transform_edge`]. The analytic profile is truncated on the finite
/// periodic lattice, so Φ is only an eigenstate up to that residual, and
/// Φ̃ only a Γ eigenstate up to a comparable amount.
pub const RESIDUAL_ALLOWANCE: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quasienergy {
    Zero,
    Pi,
}

impl Quasienergy {
    pub const BOTH: [Quasienergy; 2] = [Quasienergy::Zero, Quasienergy::Pi];

    /// `e^{-iε}`: `+1` or `-1`.
    pub fn eigenvalue(self) -> f64 {
        match self {
            Quasienergy::Zero => 1.0,
            Quasienergy::Pi => -1.0,
        }
    }

    pub fn radians(self) -> f64 {
        match self {
            Quasienergy::Zero => 0.0,
            Quasienergy::Pi => std::f64::consts::PI,
        }
    }
}

impl fmt::Display for Quasienergy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quasienergy::Zero => f.write_str("0"),
            Quasienergy::Pi => f.write_str("pi"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chirality {
    Plus,
    Minus,
}

impl Chirality {
    pub const BOTH: [Chirality; 2] = [Chirality::Plus, Chirality::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Chirality::Plus => 1.0,
            Chirality::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Chirality {
        match self {
            Chirality::Plus => Chirality::Minus,
            Chirality::Minus => Chirality::Plus,
        }
    }

    /// `η e^{iε}`: chirality of `U₂ₐ|Φ⟩`.
    pub fn transformed(self, eps: Quasienergy) -> Chirality {
        match eps {
            Quasienergy::Zero => self,
            Quasienergy::Pi => self.flip(),
        }
    }
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chirality::Plus => f.write_str("+"),
            Chirality::Minus => f.write_str("-"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Left,
    Right,
}

/// Two-step coin-angle region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    A,
    B,
    Undefined,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EdgeWarning {
    /// `e^{-2γm}` is not negligible; the analytic form ignores this overlap.
    BoundaryOverlap { overlap: f64 },
    /// The transformed state missed the Γ eigenrelation by `residual`;
    /// only tolerated on overlap-suspect inputs.
    ChiralityResidual { residual: f64 },
}

/// An analytic stationary edge state together with its localization data.
#[derive(Clone, Debug)]
pub struct EdgeState {
    quasienergy: Quasienergy,
    chirality: Chirality,
    amplitudes: WalkerState,
    gamma: f64,
    boundary: Boundary,
    parity: Option<Sublattice>,
    normalization: f64,
    p: Option<f64>,
    model: WalkModel,
    region: Option<Region>,
    /// `U₂ₐ|Φ⟩` rather than an eigenstate of `U₂` itself.
    transformed: bool,
    warnings: Vec<EdgeWarning>,
}

impl EdgeState {
    pub fn quasienergy(&self) -> Quasienergy {
        self.quasienergy
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn amplitudes(&self) -> &WalkerState {
        &self.amplitudes
    }

    pub fn lattice(&self) -> Lattice {
        self.amplitudes.lattice()
    }

    /// Inverse localization length.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Sublattice carrying the state (two-step only).
    pub fn parity(&self) -> Option<Sublattice> {
        self.parity
    }

    /// `N₁` or `N₂`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `p = cos θ₂ / (1 + sin θ₂)` (two-step only; inverted on odd sites).
    pub fn p(&self) -> Option<f64> {
        self.p
    }

    pub fn model(&self) -> WalkModel {
        self.model
    }

    pub fn region(&self) -> Option<Region> {
        self.region
    }

    pub fn is_transformed(&self) -> bool {
        self.transformed
    }

    pub fn warnings(&self) -> &[EdgeWarning] {
        &self.warnings
    }

    pub fn overlap_suspect(&self) -> bool {
        !self.warnings.is_empty()
    }

    /// `|Φ_x|² = |Φ_{x,L}|²` per site, ordered by x.
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes
            .amplitudes()
            .chunks_exact(2)
            .map(|c| c[0].norm_sqr())
            .collect()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights().into_iter().fold(0.0, f64::max)
    }

    /// Site on which the profile peaks on the inner side of its domain wall.
    pub fn inner_anchor(&self) -> i64 {
        let m = self.lattice().m() as i64;
        let a = match (self.model, self.parity) {
            (WalkModel::Single { .. }, _) => m,
            (WalkModel::Two { .. }, Some(Sublattice::Odd)) => m - 1,
            (WalkModel::Two { .. }, _) => m,
        };
        match self.boundary {
            Boundary::Right => a,
            Boundary::Left => -a,
        }
    }

    /// Site on which the profile peaks on the outer side of its domain wall.
    pub fn outer_anchor(&self) -> i64 {
        let m = self.lattice().m() as i64;
        let a = match (self.model, self.parity) {
            (WalkModel::Single { .. }, _) => m + 1,
            (WalkModel::Two { .. }, Some(Sublattice::Odd)) => m + 1,
            (WalkModel::Two { .. }, _) => m + 2,
        };
        match self.boundary {
            Boundary::Right => a,
            Boundary::Left => -a,
        }
    }

    /// The same profile multiplied by `factor`; labels and γ are kept.
    ///
    /// Used for the `1/√2` rescaling that accounts for a mixed-parity
    /// initial state populating only half of an edge state's sublattice.
    pub fn scaled(&self, factor: f64) -> EdgeState {
        let mut out = self.clone();
        out.amplitudes.scale(factor);
        out.normalization *= factor;
        out
    }

    /// `‖UΦ − e^{-iε}Φ‖` under the matching linear walk, applied in place.
    pub fn eigen_residual(&self) -> f64 {
        let walk = LinearWalk::new(CoinProfile::new(self.lattice(), self.model));
        let mut v = self.amplitudes.amplitudes().to_vec();
        if self.transformed {
            walk.apply(Factor::U2b, &mut v);
            walk.apply(Factor::U2a, &mut v);
        } else {
            walk.apply_period(&mut v);
        }
        let mu = self.quasienergy.eigenvalue();
        v.iter()
            .zip(self.amplitudes.amplitudes())
            .map(|(a, b)| (a - b * mu).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖Γ|Φ⟩ − η|Φ⟩‖` with `Γ = 1ₓ ⊗ σ₁`.
    pub fn chirality_residual(&self) -> f64 {
        chirality_residual(&self.amplitudes, self.chirality)
    }

    /// Residual of the domain-wall matching conditions.
    ///
    /// Single-step: `Φ_a = (−1)^{ε/π} Φ_{a'}` between the inner anchor `a`
    /// and its outer neighbour `a'`. Two-step: the amplitude ratio across
    /// the wall, `cos θ₂ |Φ_o| = (1 − sin θ₂) |Φ_i|` when the outer side
    /// carries the `p` factor and `(1 − sin θ₂) |Φ_o| = cos θ₂ |Φ_i|`
    /// when the inner side does; the two forms trade places on odd sites.
    pub fn boundary_residual(&self) -> f64 {
        let (inner, outer) = (self.inner_anchor(), self.outer_anchor());
        match self.model {
            WalkModel::Single { .. } => Spin::BOTH
                .iter()
                .map(|&s| {
                    let a = self.amplitudes.get(inner, s);
                    let b = self.amplitudes.get(outer, s);
                    (a - b * self.quasienergy.eigenvalue()).norm()
                })
                .fold(0.0, f64::max),
            WalkModel::Two { theta2, .. } => {
                let (c2, s2) = (theta2.cos(), 1.0 - theta2.sin());
                let p_outer = !matches!((self.quasienergy, self.region), (Quasienergy::Pi, Some(Region::B)));
                let odd = self.parity == Some(Sublattice::Odd);
                let (co, ci) = if p_outer != odd { (c2, s2) } else { (s2, c2) };
                Spin::BOTH
                    .iter()
                    .map(|&s| {
                        let o = self.amplitudes.get(outer, s).norm();
                        let i = self.amplitudes.get(inner, s).norm();
                        (co * o - ci * i).abs()
                    })
                    .fold(0.0, f64::max)
            }
        }
    }
}

fn chirality_residual(state: &WalkerState, eta: Chirality) -> f64 {
    state
        .amplitudes()
        .chunks_exact(2)
        .map(|c| (c[1] - c[0] * eta.sign()).norm_sqr() + (c[0] - c[1] * eta.sign()).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn check_open_angle(name: &'static str, value: f64, lo: f64, hi: f64, domain: &'static str) -> Result<()> {
    if value > lo && value < hi {
        Ok(())
    } else {
        Err(Error::Domain { name, value, domain })
    }
}

/// `γ = log[(1 + sin θ₀) / cos θ₀]` for `0 < θ₀ < π/2`.
pub fn gamma_single(theta0: f64) -> Result<f64> {
    check_open_angle("θ0", theta0, 0.0, FRAC_PI_2, "(0, π/2)")?;
    Ok(((1.0 + theta0.sin()) / theta0.cos()).ln())
}

/// Region of the two-step coin angles. Region boundaries (`θ₁ = θ₂`,
/// `θ₁ = 0`, `θ₂ = 0`, `θ₁ = −θ₂`) are `Undefined`.
pub fn classify_region(theta1: f64, theta2: f64) -> Region {
    let in_a = theta2 > 0.0 && theta2 < FRAC_PI_2 && -theta2 < theta1 && theta1 < theta2;
    let in_b = theta1 > 0.0 && theta1 < FRAC_PI_2 && -theta1 < theta2 && theta2 < theta1;
    if theta1 == 0.0 || theta2 == 0.0 {
        Region::Undefined
    } else if in_a {
        Region::A
    } else if in_b {
        Region::B
    } else {
        Region::Undefined
    }
}

/// Two-step inverse localization length: `γ₀` for ε = 0, `γ_π^A` / `γ_π^B`
/// for ε = π.
pub fn gamma_two(eps: Quasienergy, theta1: f64, theta2: f64) -> Result<f64> {
    let region = classify_region(theta1, theta2);
    let (s1, s2) = (theta1.sin(), theta2.sin());
    let denom = theta1.cos() * theta2.cos();
    let num = match (eps, region) {
        (_, Region::Undefined) => return Err(Error::UndefinedRegion { theta1, theta2 }),
        (Quasienergy::Zero, _) => (1.0 + s1) * (1.0 + s2),
        (Quasienergy::Pi, Region::A) => (1.0 - s1) * (1.0 + s2),
        (Quasienergy::Pi, Region::B) => (1.0 + s1) * (1.0 - s2),
    };
    Ok(0.5 * (num / denom).ln())
}

fn overlap_warnings(gamma: f64, lattice: Lattice) -> Vec<EdgeWarning> {
    let overlap = (-2.0 * gamma * lattice.m() as f64).exp();
    if overlap >= OVERLAP_GATE {
        vec![EdgeWarning::BoundaryOverlap { overlap }]
    } else {
        Vec::new()
    }
}

/// Single-step edge state
/// `Φ_{x,L} = η Φ_{x,R} = N₁ (−1)^{εx/π} e^{−γ|x − η m'|}`, with `m' = m`
/// inside and `m + 1` outside, `N₁ = √[(1 − e^{−2γ})/4]`.
///
/// η = + sits on the right domain wall, η = − on the left.
pub fn build_edge_single(eps: Quasienergy, eta: Chirality, theta0: f64, lattice: Lattice) -> Result<EdgeState> {
    let gamma = gamma_single(theta0)?;
    let norm = ((1.0 - (-2.0 * gamma).exp()) / 4.0).sqrt();
    let m = lattice.m() as i64;
    let side = eta.sign() as i64;
    let amplitudes = WalkerState::from_fn(lattice, |x| {
        let anchor = side * if lattice.is_inner(x) { m } else { m + 1 };
        let sign = match eps {
            Quasienergy::Pi if x.rem_euclid(2) == 1 => -1.0,
            _ => 1.0,
        };
        let a = norm * sign * (-gamma * (x - anchor).abs() as f64).exp();
        (Complex64::new(a, 0.0), Complex64::new(eta.sign() * a, 0.0))
    });
    Ok(EdgeState {
        quasienergy: eps,
        chirality: eta,
        amplitudes,
        gamma,
        boundary: if eta == Chirality::Plus {
            Boundary::Right
        } else {
            Boundary::Left
        },
        parity: None,
        normalization: norm,
        p: None,
        model: WalkModel::Single { theta0 },
        region: None,
        transformed: false,
        warnings: overlap_warnings(gamma, lattice),
    })
}

/// Two-step edge state on one sublattice.
///
/// ε = 0: η = + on the right wall, η = − on the left, in both regions.
/// ε = π: η = + on the left wall in region A and on the right wall in
/// region B (η = − opposite). The side of the wall away from the centre
/// of the profile carries the factor `p`, except for ε = π in region B
/// where the inner side does. On odd sites the anchors `m, m+2` become
/// `m−1, m+1` and `p` becomes `1/p`; `N₂` is computed from the `p` in use.
pub fn build_edge_two(
    eps: Quasienergy,
    eta: Chirality,
    theta1: f64,
    theta2: f64,
    lattice: Lattice,
    parity: Sublattice,
) -> Result<EdgeState> {
    let region = classify_region(theta1, theta2);
    if region == Region::Undefined {
        return Err(Error::UndefinedRegion { theta1, theta2 });
    }
    let gamma = gamma_two(eps, theta1, theta2)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::NoEdgeState {
            quasienergy: eps,
            chirality: eta,
            region,
            gamma,
        });
    }
    let p_even = theta2.cos() / (1.0 + theta2.sin());
    let p = match parity {
        Sublattice::Even => p_even,
        Sublattice::Odd => 1.0 / p_even,
    };
    let norm = ((1.0 - (-4.0 * gamma).exp()) / (2.0 * (1.0 + p * p))).sqrt();

    let right = match (eps, region) {
        (Quasienergy::Zero, _) | (Quasienergy::Pi, Region::B) => eta == Chirality::Plus,
        (Quasienergy::Pi, _) => eta == Chirality::Minus,
    };
    let p_inner = eps == Quasienergy::Pi && region == Region::B;
    let m = lattice.m() as i64;
    let (inner, outer) = match parity {
        Sublattice::Even => (m, m + 2),
        Sublattice::Odd => (m - 1, m + 1),
    };
    let side = if right { 1 } else { -1 };

    let amplitudes = WalkerState::from_fn(lattice, |x| {
        if !parity.contains(x) {
            return Default::default();
        }
        let is_inner = lattice.is_inner(x);
        let anchor = side * if is_inner { inner } else { outer };
        let factor = if is_inner == p_inner { p } else { 1.0 };
        let sign = match eps {
            Quasienergy::Pi if (x - side * inner).rem_euclid(4) == 2 => -1.0,
            _ => 1.0,
        };
        let a = norm * factor * sign * (-gamma * (x - anchor).abs() as f64).exp();
        (Complex64::new(a, 0.0), Complex64::new(eta.sign() * a, 0.0))
    });

    Ok(EdgeState {
        quasienergy: eps,
        chirality: eta,
        amplitudes,
        gamma,
        boundary: if right { Boundary::Right } else { Boundary::Left },
        parity: Some(parity),
        normalization: norm,
        p: Some(p),
        model: WalkModel::Two { theta1, theta2 },
        region: Some(region),
        transformed: false,
        warnings: overlap_warnings(gamma, lattice),
    })
}

/// `|Φ̃⟩ = U₂ₐ|Φ⟩`, an eigenstate of `U₂ₐU₂ᵦ` with chirality `η̃ = η e^{iε}`.
///
/// Fails if the angles differ from the ones the edge state was built for,
/// or if the result is not a Γ eigenstate with eigenvalue `η̃` to within
/// [`CHIRALITY_TOLERANCE`] plus [`RESIDUAL_ALLOWANCE`] eigen residuals. An
/// overlap-suspect input instead gets an [`EdgeWarning::ChiralityResidual`].
pub fn transform_edge(edge: &EdgeState, theta1: f64, theta2: f64) -> Result<EdgeState> {
    if edge.transformed {
        return Err(Error::Mismatch("edge state is already transformed".into()));
    }
    match edge.model {
        WalkModel::Two { theta1: a, theta2: b } if a == theta1 && b == theta2 => {}
        other => {
            return Err(Error::Mismatch(format!(
                "edge state built for {other:?}, transform requested for two-step ({theta1}, {theta2})"
            )))
        }
    }
    let lattice = edge.lattice();
    let walk = LinearWalk::new(CoinProfile::two(lattice, theta1, theta2));
    let mut v = edge.amplitudes.amplitudes().to_vec();
    walk.apply(Factor::U2a, &mut v);
    let amplitudes = WalkerState::from_amplitudes(lattice, v)?;
    let eta = edge.chirality.transformed(edge.quasienergy);
    let residual = chirality_residual(&amplitudes, eta);
    let tolerance = CHIRALITY_TOLERANCE * amplitudes.norm2().sqrt() + RESIDUAL_ALLOWANCE * edge.eigen_residual();
    let mut warnings = edge.warnings.clone();
    if residual > tolerance {
        if !edge.overlap_suspect() {
            return Err(Error::ChiralityMismatch { residual });
        }
        warnings.push(EdgeWarning::ChiralityResidual { residual });
    }
    Ok(EdgeState {
        chirality: eta,
        warnings,
        amplitudes,
        parity: edge.parity.map(Sublattice::flip),
        transformed: true,
        ..edge.clone()
    })
}
