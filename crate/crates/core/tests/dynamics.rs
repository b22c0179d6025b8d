use std::f64::consts::FRAC_PI_8;

use nlqw_core::dynamics::{
    detect_collapse, distribution_distance, evolve, fidelity, gaussian_initial, standard_edges, EvolveOptions,
    RecordSchedule, COLLAPSE_DROP, COLLAPSE_WINDOW,
};
use nlqw_core::{Kappa, Lattice, Sublattice, WalkModel};
use proptest::prelude::*;

const SINGLE: WalkModel = WalkModel::Single { theta0: FRAC_PI_8 };

fn lat(m: usize) -> Lattice {
    Lattice::new(m).unwrap()
}

#[test]
fn norm_holds_for_a_million_steps() {
    let l = lat(20);
    let s = gaussian_initial(50.0, l, None).unwrap();
    assert!((s.norm2() - 1.0).abs() < 1e-12);
    let opts = EvolveOptions {
        trace_stride: 0,
        ..EvolveOptions::default()
    };
    let ev = evolve(s, SINGLE, Kappa::new(3.9).unwrap(), 1_000_000, &[], &opts).unwrap();
    assert!((ev.final_state.norm2().sqrt() - 1.0).abs() < 1e-9);
    assert!(ev.final_state.max_imag() == 0.0);
    assert!(ev.records.iter().all(|r| (r.norm - 1.0).abs() < 1e-9));
}

#[test]
fn stable_side_attracts_and_minus_states_repel() {
    let l = lat(50);
    let edges = standard_edges(SINGLE, l, None).unwrap();
    let opts = EvolveOptions {
        trace_stride: 50,
        ..EvolveOptions::default()
    };
    let s = gaussian_initial(50.0, l, None).unwrap();
    let ev = evolve(s, SINGLE, Kappa::new(2.0).unwrap(), 50_000, &edges, &opts).unwrap();
    let plus: Vec<(u64, f64)> = ev
        .trace
        .series(0)
        .into_iter()
        .zip(ev.trace.series(1))
        .map(|((t, a), (_, b))| (t, a.max(b)))
        .collect();
    let mut best: f64 = 0.0;
    for &(t, f) in plus.iter().filter(|(t, _)| *t >= 1000) {
        best = best.max(f);
        assert!(best - f < 0.05, "fidelity fell from {best} to {f} at t={t}");
    }
    assert!(plus.last().unwrap().1 > 0.9);
    for k in [2, 3] {
        assert!(ev.trace.values[k].iter().all(|&f| f < 0.1));
    }
    assert!(detect_collapse(&plus, COLLAPSE_WINDOW, COLLAPSE_DROP).is_none());
}

#[test]
fn probability_and_fidelity_are_consistent() {
    let l = lat(30);
    let edges = standard_edges(
        WalkModel::Two {
            theta1: -0.7,
            theta2: 1.2,
        },
        l,
        Some(Sublattice::Odd),
    )
    .unwrap();
    let s = gaussian_initial(20.0, l, Some(Sublattice::Odd)).unwrap();
    let opts = EvolveOptions {
        schedule: RecordSchedule::Every(250),
        distributions: true,
        trace_stride: 10,
    };
    let model = WalkModel::Two {
        theta1: -0.7,
        theta2: 1.2,
    };
    let ev = evolve(s, model, Kappa::new(1.0).unwrap(), 2000, &edges, &opts).unwrap();
    assert_eq!(ev.labels, ["F_0_plus", "F_pi_plus", "F_0_minus", "F_pi_minus"]);
    assert_eq!(ev.records.len(), 9);
    for r in &ev.records {
        let p = r.distribution.as_ref().unwrap();
        assert!((p.iter().sum::<f64>() - r.norm * r.norm).abs() < 1e-10);
        assert!(r.fidelities.iter().all(|&f| (0.0..=1.0 + 1e-10).contains(&f)));
    }
    let last = ev.records.last().unwrap();
    for (k, t) in edges.iter().enumerate() {
        assert_eq!(last.fidelities[k], fidelity(&ev.final_state, &t.edge).unwrap());
    }
    let p = ev.final_state.probability();
    assert_eq!(distribution_distance(&p, &p).unwrap(), 0.0);
}

#[test]
fn collapse_on_a_synthetic_drop() {
    let series: Vec<(u64, f64)> = (0..20_000u64)
        .map(|t| (t, if t < 12_000 { 0.95 } else { 0.3 }))
        .collect();
    let t = detect_collapse(&series, 1000, 0.3).unwrap();
    // the trailing mean crosses 0.65 about half a window after the step
    assert!((12_400..=12_600).contains(&t), "{t}");
    let flat: Vec<(u64, f64)> = (0..5000u64).map(|t| (t, 0.9 + 0.01 * ((t % 7) as f64))).collect();
    assert!(detect_collapse(&flat, 1000, 0.3).is_none());
}

proptest! {
    #[test]
    fn gaussian_is_normalized(delta2 in 0.5..500.0f64, m in 1usize..40, parity in 0u8..3) {
        let parity = match parity {
            0 => None,
            1 => Some(Sublattice::Even),
            _ => Some(Sublattice::Odd),
        };
        let s = gaussian_initial(delta2, lat(2 * m), parity).unwrap();
        prop_assert!((s.norm2() - 1.0).abs() < 1e-12);
        prop_assert_eq!(s.max_imag(), 0.0);
    }
}
