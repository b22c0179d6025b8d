//! Periodic one-dimensional lattice with a two-component (L, R) internal
//! degree of freedom.
//!
//! Sites run over `x = -2m ..= 2m-1` (4m sites) with periodic wrap. Amplitudes
//! are stored x-major, spin-minor: linear index `2 * site + spin`, where
//! `site = x + 2m`. Every dense matrix in the crate uses this layout.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes below this modulus are treated as zero when classifying the
/// sublattice support of a state.
pub const PARITY_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    L = 0,
    R = 1,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::L, Spin::R];
}

/// Even or odd sublattice of `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sublattice {
    Even,
    Odd,
}

impl Sublattice {
    pub fn of(x: i64) -> Sublattice {
        if x.rem_euclid(2) == 0 {
            Sublattice::Even
        } else {
            Sublattice::Odd
        }
    }

    pub fn flip(self) -> Sublattice {
        match self {
            Sublattice::Even => Sublattice::Odd,
            Sublattice::Odd => Sublattice::Even,
        }
    }

    pub fn contains(self, x: i64) -> bool {
        Sublattice::of(x) == self
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sublattice::Even => f.write_str("even"),
            Sublattice::Odd => f.write_str("odd"),
        }
    }
}

/// Result of [`WalkerState::support_parity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportParity {
    Even,
    Odd,
    Mixed,
}

/// Lattice geometry: half-width `m` of the inner region, `4m` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    m: usize,
}

impl Lattice {
    pub fn new(m: usize) -> Result<Lattice> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::InvalidHalfWidth(m));
        }
        Ok(Lattice { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sites(&self) -> usize {
        4 * self.m
    }

    /// Length of the amplitude vector (two spin components per site).
    pub fn dim(&self) -> usize {
        8 * self.m
    }

    pub fn x_min(&self) -> i64 {
        -2 * self.m as i64
    }

    pub fn x_max(&self) -> i64 {
        2 * self.m as i64 - 1
    }

    /// Site slot of position `x`, wrapping periodically.
    pub fn site(&self, x: i64) -> usize {
        (x - self.x_min()).rem_euclid(self.sites() as i64) as usize
    }

    pub fn position(&self, site: usize) -> i64 {
        debug_assert!(site < self.sites());
        site as i64 + self.x_min()
    }

    pub fn index(&self, x: i64, spin: Spin) -> usize {
        2 * self.site(x) + spin as usize
    }

    /// Whether `x` lies in the inner region `|x| <= m`.
    pub fn is_inner(&self, x: i64) -> bool {
        x.unsigned_abs() as usize <= self.m
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> {
        self.x_min()..=self.x_max()
    }
}

/// Two-component complex amplitudes on a [`Lattice`].
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerState {
    lattice: Lattice,
    amps: Vec<Complex64>,
}

impl WalkerState {
    pub fn new(lattice: Lattice) -> WalkerState {
        WalkerState {
            lattice,
            amps: vec![Complex64::new(0.0, 0.0); lattice.dim()],
        }
    }

    /// Builds a state from per-site `(ψ_L, ψ_R)`.
    pub fn from_fn(lattice: Lattice, mut f: impl FnMut(i64) -> (Complex64, Complex64)) -> Self {
        let mut state = WalkerState::new(lattice);
        for x in lattice.positions() {
            let (l, r) = f(x);
            state.set(x, Spin::L, l);
            state.set(x, Spin::R, r);
        }
        state
    }

    pub fn from_amplitudes(lattice: Lattice, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: lattice.dim(),
            });
        }
        Ok(WalkerState { lattice, amps })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn get(&self, x: i64, spin: Spin) -> Complex64 {
        self.amps[self.lattice.index(x, spin)]
    }

    pub fn set(&mut self, x: i64, spin: Spin, value: Complex64) {
        let i = self.lattice.index(x, spin);
        self.amps[i] = value;
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Σ_{x,s} |ψ_{x,s}|², summed in storage order.
    pub fn norm2(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to unit norm. A zero state is left untouched.
    pub fn normalize(&mut self) {
        let n = self.norm2().sqrt();
        if n > 0.0 {
            self.scale(1.0 / n);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &WalkerState) -> Result<Complex64> {
        if self.lattice != other.lattice {
            return Err(Error::DimensionMismatch {
                left: self.lattice.dim(),
                right: other.lattice.dim(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |ψ_x|² = |ψ_{x,L}|² + |ψ_{x,R}|² per site, ordered by x.
    pub fn probability(&self) -> Vec<f64> {
        self.amps
            .chunks_exact(2)
            .map(|c| c[0].norm_sqr() + c[1].norm_sqr())
            .collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.amps.iter().fold(0.0, |acc, a| acc.max(a.im.abs()))
    }

    /// Which sublattice carries the state. A state with no amplitude above
    /// [`PARITY_TOLERANCE`] is reported as `Even`.
    pub fn support_parity(&self) -> SupportParity {
        let mut even = false;
        let mut odd = false;
        for (site, c) in self.amps.chunks_exact(2).enumerate() {
            if c[0].norm() < PARITY_TOLERANCE && c[1].norm() < PARITY_TOLERANCE {
                continue;
            }
            match Sublattice::of(self.lattice.position(site)) {
                Sublattice::Even => even = true,
                Sublattice::Odd => odd = true,
            }
        }
        match (even, odd) {
            (true, true) => SupportParity::Mixed,
            (false, true) => SupportParity::Odd,
            _ => SupportParity::Even,
        }
    }

    /// Zeroes every amplitude off `keep`.
    pub fn project_sublattice(&mut self, keep: Sublattice) {
        let lattice = self.lattice;
        for (site, c) in self.amps.chunks_exact_mut(2).enumerate() {
            if !keep.contains(lattice.position(site)) {
                c[0] = Complex64::new(0.0, 0.0);
                c[1] = Complex64::new(0.0, 0.0);
            }
        }
    }
}
