use thiserror::Error;

use crate::edgestates::{Chirality, Quasienergy, Region};

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice half-width m must be even and at least 2, got {0}")]
    InvalidHalfWidth(usize),

    #[error("κ must be ≥ 0 (got {0})")]
    NegativeKappa(f64),

    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("coin angles (θ1 = {theta1}, θ2 = {theta2}) lie in neither region A nor region B")]
    UndefinedRegion { theta1: f64, theta2: f64 },

    #[error("no localized edge state (ε = {quasienergy}, η = {chirality}) in region {region:?}: γ = {gamma}")]
    NoEdgeState {
        quasienergy: Quasienergy,
        chirality: Chirality,
        region: Region,
        gamma: f64,
    },

    #[error("transformed edge state violates Γ|Φ̃⟩ = η̃|Φ̃⟩ (residual {residual:e})")]
    ChiralityMismatch { residual: f64 },

    #[error("inconsistent inputs: {0}")]
    Mismatch(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge ({dim}x{dim} matrix)")]
    NoConvergence { dim: usize },

    #[error("quasienergy is undefined at λ = 0")]
    ZeroEigenvalue,

    #[error("ambiguous eigenvalue matching between κ = {kappa_lo} and κ = {kappa_hi}")]
    AmbiguousMatching { kappa_lo: f64, kappa_hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
