//! Nonlinear discrete-time quantum walks on a periodic lattice.
//!
//! Two Floquet models are covered: the single-step walk
//! `U₁ = C(θ₀/2) S C(θ₀/2)` and the two-step walk
//! `U₂ = C(θ₁/2) S C(θ₂/2) · C(θ₂/2) S C(θ₁/2)`, each with a feed-forward
//! nonlinear coin `C(κΘ)` driven by the local population imbalance
//! `Θ = |ψ_L|² − |ψ_R|²`. Coin angles flip sign outside `|x| ≤ m`, which
//! binds topological edge states to the two domain walls.
//!
//! The crate builds those edge states analytically ([`edgestates`]),
//! linearizes the nonlinear map around them ([`stability`]), evolves
//! arbitrary states ([`dynamics`]) and scans parameter grids ([`sweeps`]).
//! [`continuum`] holds the continuum-limit frequencies used as a contrast.

pub mod continuum;
pub mod dynamics;
pub mod edgestates;
pub mod eigen;
pub mod error;
pub mod lattice;
pub mod operators;
pub mod output;
pub mod stability;
pub mod sweeps;

pub use num_complex::Complex64;

pub use edgestates::{
    build_edge_single, build_edge_two, classify_region, gamma_single, gamma_two, transform_edge, Boundary, Chirality,
    EdgeState, EdgeWarning, Quasienergy, Region,
};
pub use error::{Error, Result};
pub use lattice::{Lattice, Spin, Sublattice, SupportParity, WalkerState};
pub use operators::{
    apply_coin, apply_shift, dense_unitary, nonlinear_theta, step_single, step_two, CoinProfile, Factor, Kappa,
    LinearWalk, NonlinearWalk, WalkModel,
};
