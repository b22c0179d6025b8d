//! Long-horizon nonlinear evolution with fidelity tracking.

use num_complex::Complex64;

use crate::edgestates::{build_edge_single, build_edge_two, Chirality, EdgeState, Quasienergy};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Sublattice, WalkerState};
use crate::operators::{CoinProfile, Kappa, NonlinearWalk, WalkModel};

/// Default window of [`detect_collapse`], in steps.
pub const COLLAPSE_WINDOW: u64 = 1000;
/// Default absolute drop of [`detect_collapse`].
pub const COLLAPSE_DROP: f64 = 0.3;

/// `ψ_{x,L} = ψ_{x,R} = N exp(−x²/2Δ²)`, normalized. With `parity` set the
/// other sublattice is zeroed before normalizing.
pub fn gaussian_initial(delta2: f64, lattice: Lattice, parity: Option<Sublattice>) -> Result<WalkerState> {
    if !(delta2 > 0.0 && delta2.is_finite()) {
        return Err(Error::Domain {
            name: "Δ²",
            value: delta2,
            domain: "(0, ∞)",
        });
    }
    let mut state = WalkerState::from_fn(lattice, |x| {
        let a = Complex64::new((-((x * x) as f64) / (2.0 * delta2)).exp(), 0.0);
        (a, a)
    });
    if let Some(p) = parity {
        state.project_sublattice(p);
    }
    state.normalize();
    Ok(state)
}

/// `|⟨Φ|ψ⟩|`.
pub fn fidelity(state: &WalkerState, edge: &EdgeState) -> Result<f64> {
    Ok(edge.amplitudes().inner(state)?.norm())
}

/// `max_x |p₁(x) − p₂(x)|`.
pub fn distribution_distance(p1: &[f64], p2: &[f64]) -> Result<f64> {
    if p1.len() != p2.len() {
        return Err(Error::DimensionMismatch {
            left: p1.len(),
            right: p2.len(),
        });
    }
    Ok(p1.iter().zip(p2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Steps at which full records (norm, fidelities, distribution) are kept.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum RecordSchedule {
    /// `0`, powers of two, and the final step.
    #[default]
    Geometric,
    /// Every `n` steps, plus the final step.
    Every(u64),
    /// Exactly these steps (each must be `≤ T`).
    Steps(Vec<u64>),
}

impl RecordSchedule {
    pub fn steps(&self, total: u64) -> Result<Vec<u64>> {
        let mut out = match self {
            RecordSchedule::Geometric => {
                let mut v = vec![0];
                let mut s = 1u64;
                while s <= total {
                    v.push(s);
                    s = s.saturating_mul(2);
                }
                v
            }
            RecordSchedule::Every(n) => {
                if *n == 0 {
                    return Err(Error::Domain {
                        name: "record interval",
                        value: 0.0,
                        domain: "[1, ∞)",
                    });
                }
                (0..=total).step_by(*n as usize).collect()
            }
            RecordSchedule::Steps(v) => {
                if let Some(&bad) = v.iter().find(|&&s| s > total) {
                    return Err(Error::Domain {
                        name: "record step",
                        value: bad as f64,
                        domain: "[0, T]",
                    });
                }
                v.clone()
            }
        };
        if !matches!(self, RecordSchedule::Steps(_)) {
            out.push(total);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// An edge state whose fidelity is followed during a run.
#[derive(Clone, Debug)]
pub struct TrackedEdge {
    pub label: String,
    pub edge: EdgeState,
}

/// The four edge states in output order `(0,+), (π,+), (0,−), (π,−)`.
///
/// For the two-step walk they are built on `parity` (even if `None`).
pub fn standard_edges(model: WalkModel, lattice: Lattice, parity: Option<Sublattice>) -> Result<Vec<TrackedEdge>> {
    let order = [
        (Quasienergy::Zero, Chirality::Plus, "F_0_plus"),
        (Quasienergy::Pi, Chirality::Plus, "F_pi_plus"),
        (Quasienergy::Zero, Chirality::Minus, "F_0_minus"),
        (Quasienergy::Pi, Chirality::Minus, "F_pi_minus"),
    ];
    order
        .iter()
        .map(|&(eps, eta, label)| {
            let edge = match model {
                WalkModel::Single { theta0 } => build_edge_single(eps, eta, theta0, lattice)?,
                WalkModel::Two { theta1, theta2 } => {
                    build_edge_two(eps, eta, theta1, theta2, lattice, parity.unwrap_or(Sublattice::Even))?
                }
            };
            Ok(TrackedEdge {
                label: label.to_string(),
                edge,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionRecord {
    pub step: u64,
    pub norm: f64,
    /// One per tracked edge, in tracking order.
    pub fidelities: Vec<f64>,
    pub distribution: Option<Vec<f64>>,
}

/// Fidelities sampled every `stride` steps (plus the final step).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FidelityTrace {
    pub steps: Vec<u64>,
    /// `values[k][i]`: edge `k` at `steps[i]`.
    pub values: Vec<Vec<f64>>,
}

impl FidelityTrace {
    pub fn series(&self, edge: usize) -> Vec<(u64, f64)> {
        self.steps
            .iter()
            .copied()
            .zip(self.values[edge].iter().copied())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub schedule: RecordSchedule,
    /// Keep `|ψ_x|²` in every record.
    pub distributions: bool,
    /// Trace sampling interval; 0 disables the trace.
    pub trace_stride: u64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            schedule: RecordSchedule::Geometric,
            distributions: false,
            trace_stride: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub labels: Vec<String>,
    pub records: Vec<EvolutionRecord>,
    pub trace: FidelityTrace,
    pub final_state: WalkerState,
}

/// Applies the nonlinear period of `model` `steps` times.
pub fn evolve(
    mut state: WalkerState,
    model: WalkModel,
    kappa: Kappa,
    steps: u64,
    tracked: &[TrackedEdge],
    options: &EvolveOptions,
) -> Result<Evolution> {
    let lattice = state.lattice();
    if let Some(t) = tracked.iter().find(|t| t.edge.lattice() != lattice) {
        return Err(Error::Mismatch(format!(
            "tracked edge {} lives on a different lattice",
            t.label
        )));
    }
    let schedule = options.schedule.steps(steps)?;
    let mut walk = NonlinearWalk::new(CoinProfile::new(lattice, model), kappa);
    let mut records = Vec::with_capacity(schedule.len());
    let mut trace = FidelityTrace {
        steps: Vec::new(),
        values: vec![Vec::new(); tracked.len()],
    };

    let fidelities = |s: &WalkerState| -> Vec<f64> {
        tracked
            .iter()
            .map(|t| t.edge.amplitudes().inner(s).map(|z| z.norm()).unwrap_or(f64::NAN))
            .collect()
    };
    let mut next_record = schedule.iter().copied().peekable();
    for t in 0..=steps {
        if t > 0 {
            walk.step(&mut state);
        }
        let traced = options.trace_stride > 0 && (t % options.trace_stride == 0 || t == steps);
        let recorded = next_record.peek() == Some(&t);
        if !(traced || recorded) {
            continue;
        }
        let f = fidelities(&state);
        if traced {
            trace.steps.push(t);
            for (k, v) in f.iter().enumerate() {
                trace.values[k].push(*v);
            }
        }
        if recorded {
            next_record.next();
            records.push(EvolutionRecord {
                step: t,
                norm: state.norm2().sqrt(),
                fidelities: f,
                distribution: options.distributions.then(|| state.probability()),
            });
        }
    }
    Ok(Evolution {
        labels: tracked.iter().map(|t| t.label.clone()).collect(),
        records,
        trace,
        final_state: state,
    })
}

/// First step at which the trailing-window mean of `series` has fallen more
/// than `drop` below its running maximum. `series` holds `(step, value)`
/// pairs in increasing step order; the window covers `(t − window, t]`.
pub fn detect_collapse(series: &[(u64, f64)], window: u64, drop: f64) -> Option<u64> {
    let mut start = 0;
    let mut sum = 0.0;
    let mut best = f64::NEG_INFINITY;
    for (end, &(t, v)) in series.iter().enumerate() {
        sum += v;
        while series[start].0 + window <= t {
            sum -= series[start].1;
            start += 1;
        }
        let mean = sum / (end + 1 - start) as f64;
        // Only full windows count, so a short start-up transient cannot fire.
        if t + 1 < series[0].0 + window {
            continue;
        }
        best = best.max(mean);
        if best - mean > drop {
            return Some(t);
        }
    }
    None
}

/// Population variance of a series from `from` onward.
pub fn variance_after(series: &[(u64, f64)], from: u64) -> Option<f64> {
    let tail: Vec<f64> = series.iter().filter(|(t, _)| *t >= from).map(|&(_, v)| v).collect();
    if tail.is_empty() {
        return None;
    }
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    Some(tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / tail.len() as f64)
}
