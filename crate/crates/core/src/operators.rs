//! Coin, shift and nonlinear-coin operators, and the single-step / two-step
//! one-period maps.
//!
//! Everything here acts in place on amplitude slices in O(N). Dense matrices
//! are assembled on demand by applying the same routines to basis vectors
//! ([`dense_unitary`]); they are only needed to linearize around edge states.
//!
//! Conventions:
//! - coin `C[θ] = exp(-iθσ₂) = [[cos θ, -sin θ], [sin θ, cos θ]]` acting on `(ψ_L, ψ_R)`;
//! - shift moves L amplitudes `x → x-1` and R amplitudes `x → x+1`, periodically;
//! - `U₁ = C(θ₀/2) S C(θ₀/2)`, `U₂ₐ = C(θ₂/2) S C(θ₁/2)`, `U₂ᵦ = C(θ₁/2) S C(θ₂/2)`;
//! - coin angles carry the sign profile `θ(x) = +θ` for `|x| ≤ m`, `-θ` otherwise.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, WalkerState};

/// Nonnegative nonlinearity strength κ.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Kappa(f64);

impl Kappa {
    pub const ZERO: Kappa = Kappa(0.0);

    pub fn new(value: f64) -> Result<Kappa> {
        if value.is_finite() && value >= 0.0 {
            Ok(Kappa(value))
        } else {
            Err(Error::NegativeKappa(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which walk is being driven, with its inner-region base angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WalkModel {
    Single { theta0: f64 },
    Two { theta1: f64, theta2: f64 },
}

impl WalkModel {
    pub fn name(&self) -> &'static str {
        match self {
            WalkModel::Single { .. } => "single",
            WalkModel::Two { .. } => "two",
        }
    }
}

/// Position-dependent coin angles: the base angles of a [`WalkModel`] with
/// the inner/outer sign flip between `|x| = m` and `|x| = m+1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinProfile {
    lattice: Lattice,
    model: WalkModel,
}

impl CoinProfile {
    pub fn new(lattice: Lattice, model: WalkModel) -> CoinProfile {
        CoinProfile { lattice, model }
    }

    pub fn single(lattice: Lattice, theta0: f64) -> CoinProfile {
        CoinProfile::new(lattice, WalkModel::Single { theta0 })
    }

    pub fn two(lattice: Lattice, theta1: f64, theta2: f64) -> CoinProfile {
        CoinProfile::new(lattice, WalkModel::Two { theta1, theta2 })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn model(&self) -> WalkModel {
        self.model
    }

    /// `θ(x)` for base angle `theta`.
    pub fn at(&self, theta: f64, x: i64) -> f64 {
        if self.lattice.is_inner(x) {
            theta
        } else {
            -theta
        }
    }
}

/// Factors of the linear one-period maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    U1,
    U2a,
    U2b,
    /// `U₂ = U₂ᵦ U₂ₐ`.
    U2,
}

/// Rotates `(ψ_L, ψ_R)` at site `i` by the angle whose cosine and sine are
/// `cos[i]`, `sin[i]`.
fn rotate_sites(amps: &mut [Complex64], cos: &[f64], sin: &[f64]) {
    for ((pair, &c), &s) in amps.chunks_exact_mut(2).zip(cos).zip(sin) {
        let (l, r) = (pair[0], pair[1]);
        pair[0] = l * c - r * s;
        pair[1] = l * s + r * c;
    }
}

/// Spin-dependent shift with periodic wrap on an x-major, spin-minor slice.
pub fn shift_in_place(amps: &mut [Complex64]) {
    let n = amps.len() / 2;
    if n == 0 {
        return;
    }
    // L: new[x] = old[x+1]
    let first = amps[0];
    for site in 0..n - 1 {
        amps[2 * site] = amps[2 * site + 2];
    }
    amps[2 * (n - 1)] = first;
    // R: new[x] = old[x-1]
    let last = amps[2 * n - 1];
    for site in (1..n).rev() {
        amps[2 * site + 1] = amps[2 * site - 1];
    }
    amps[1] = last;
}

/// Applies `C[θ(x)]` site by site.
pub fn apply_coin(state: &mut WalkerState, angle: impl Fn(i64) -> f64) {
    let table = CoinTable::from_fn(state.lattice(), angle);
    table.apply(state.amplitudes_mut());
}

pub fn apply_shift(state: &mut WalkerState) {
    shift_in_place(state.amplitudes_mut());
}

/// Θ(x) = |ψ_{x,L}|² − |ψ_{x,R}|², ordered by x.
pub fn nonlinear_theta(state: &WalkerState) -> Vec<f64> {
    let mut out = vec![0.0; state.lattice().sites()];
    population_imbalance(state.amplitudes(), &mut out);
    out
}

fn population_imbalance(amps: &[Complex64], out: &mut [f64]) {
    for (pair, t) in amps.chunks_exact(2).zip(out.iter_mut()) {
        *t = pair[0].norm_sqr() - pair[1].norm_sqr();
    }
}

/// Precomputed per-site cosines and sines of a fixed coin.
#[derive(Clone, Debug)]
pub struct CoinTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl CoinTable {
    pub fn from_fn(lattice: Lattice, angle: impl Fn(i64) -> f64) -> CoinTable {
        let (sin, cos) = lattice.positions().map(|x| angle(x).sin_cos()).unzip();
        CoinTable { cos, sin }
    }

    pub fn apply(&self, amps: &mut [Complex64]) {
        rotate_sites(amps, &self.cos, &self.sin);
    }
}

/// The linear walk of a [`CoinProfile`] with its half-angle coins tabulated.
#[derive(Clone, Debug)]
pub struct LinearWalk {
    profile: CoinProfile,
    /// `C(θ₀/2)` or `C(θ₁/2)`.
    first: CoinTable,
    /// `C(θ₂/2)`; unused by the single-step walk.
    second: Option<CoinTable>,
}

impl LinearWalk {
    pub fn new(profile: CoinProfile) -> LinearWalk {
        let lattice = profile.lattice();
        let half = |theta: f64| CoinTable::from_fn(lattice, |x| 0.5 * profile.at(theta, x));
        match profile.model() {
            WalkModel::Single { theta0 } => LinearWalk {
                profile,
                first: half(theta0),
                second: None,
            },
            WalkModel::Two { theta1, theta2 } => LinearWalk {
                profile,
                first: half(theta1),
                second: Some(half(theta2)),
            },
        }
    }

    pub fn profile(&self) -> CoinProfile {
        self.profile
    }

    /// One full period of the linear walk (`U₁` or `U₂`).
    pub fn apply_period(&self, amps: &mut [Complex64]) {
        match self.second {
            None => self.apply(Factor::U1, amps),
            Some(_) => self.apply(Factor::U2, amps),
        }
    }

    /// Applies one factor in place.
    ///
    /// Panics if the factor does not belong to this walk's model.
    pub fn apply(&self, factor: Factor, amps: &mut [Complex64]) {
        match (factor, &self.second) {
            (Factor::U1, None) => {
                self.first.apply(amps);
                shift_in_place(amps);
                self.first.apply(amps);
            }
            (Factor::U2a, Some(second)) => {
                self.first.apply(amps);
                shift_in_place(amps);
                second.apply(amps);
            }
            (Factor::U2b, Some(second)) => {
                second.apply(amps);
                shift_in_place(amps);
                self.first.apply(amps);
            }
            (Factor::U2, Some(_)) => {
                self.apply(Factor::U2a, amps);
                self.apply(Factor::U2b, amps);
            }
            (f, _) => panic!(
                "factor {f:?} does not belong to the {} walk",
                self.profile.model().name()
            ),
        }
    }
}

/// Long-horizon driver for the nonlinear walk; owns scratch buffers so a step
/// allocates nothing.
#[derive(Clone, Debug)]
pub struct NonlinearWalk {
    linear: LinearWalk,
    kappa: Kappa,
    imbalance: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl NonlinearWalk {
    pub fn new(profile: CoinProfile, kappa: Kappa) -> NonlinearWalk {
        let n = profile.lattice().sites();
        NonlinearWalk {
            linear: LinearWalk::new(profile),
            kappa,
            imbalance: vec![0.0; n],
            cos: vec![0.0; n],
            sin: vec![0.0; n],
        }
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn linear(&self) -> &LinearWalk {
        &self.linear
    }

    /// `C(s·κΘ)` with Θ taken from a snapshot of `amps` before any rotation.
    fn nonlinear_coin(&mut self, amps: &mut [Complex64], sign: f64) {
        population_imbalance(amps, &mut self.imbalance);
        let k = sign * self.kappa.value();
        for ((t, c), s) in self.imbalance.iter().zip(&mut self.cos).zip(&mut self.sin) {
            (*s, *c) = (k * t).sin_cos();
        }
        rotate_sites(amps, &self.cos, &self.sin);
    }

    /// One period.
    ///
    /// Single-step: `ψ ← U₁ C(κΘ) ψ`.
    /// Two-step: `ψ̃ = U₂ₐ C(κΘ) ψ`, then Θ̃ is recomputed from ψ̃ and
    /// `ψ ← U₂ᵦ C(−κΘ̃) ψ̃`.
    pub fn step_amplitudes(&mut self, amps: &mut [Complex64]) {
        self.nonlinear_coin(amps, 1.0);
        if self.linear.second.is_none() {
            self.linear.apply(Factor::U1, amps);
        } else {
            self.linear.apply(Factor::U2a, amps);
            self.nonlinear_coin(amps, -1.0);
            self.linear.apply(Factor::U2b, amps);
        }
    }

    pub fn step(&mut self, state: &mut WalkerState) {
        debug_assert_eq!(state.lattice(), self.linear.profile.lattice());
        self.step_amplitudes(state.amplitudes_mut());
    }
}

/// One single-step nonlinear period, `U₁ C(κΘ)`.
pub fn step_single(state: &mut WalkerState, theta0: f64, kappa: Kappa) {
    NonlinearWalk::new(CoinProfile::single(state.lattice(), theta0), kappa).step(state);
}

/// One two-step nonlinear period, `U₂ᵦ C(−κΘ̃) U₂ₐ C(κΘ)`.
pub fn step_two(state: &mut WalkerState, theta1: f64, theta2: f64, kappa: Kappa) {
    NonlinearWalk::new(CoinProfile::two(state.lattice(), theta1, theta2), kappa).step(state);
}

/// Dense matrix whose column `j` is `op` applied to basis vector `j`.
pub fn dense_from_operator(dim: usize, mut op: impl FnMut(&mut [Complex64])) -> Mat<Complex64> {
    let mut mat = Mat::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        let col = mat.col_as_slice_mut(j);
        col[j] = Complex64::new(1.0, 0.0);
        op(col);
    }
    mat
}

/// Left-multiplies `mat` by `op`, column by column.
pub fn left_apply(mat: &mut Mat<Complex64>, mut op: impl FnMut(&mut [Complex64])) {
    for j in 0..mat.ncols() {
        op(mat.col_as_slice_mut(j));
    }
}

/// Dense `8m × 8m` matrix of one factor of the linear walk.
///
/// Panics if `factor` does not belong to the profile's model.
pub fn dense_unitary(factor: Factor, profile: CoinProfile) -> Mat<Complex64> {
    let walk = LinearWalk::new(profile);
    dense_from_operator(profile.lattice().dim(), |col| walk.apply(factor, col))
}
