//! Walk invariants checked against an explicit dense oracle that is built
//! here from the coin and shift definitions, independent of the in-place
//! kernels.

use nlqw_core::dynamics::gaussian_initial;
use nlqw_core::operators::Factor;
use nlqw_core::{
    dense_unitary, nonlinear_theta, step_single, step_two, CoinProfile, Complex64, Kappa, Lattice, LinearWalk,
    Sublattice, SupportParity, WalkerState,
};
use proptest::prelude::*;

type Dense = Vec<Vec<Complex64>>;

fn zeros(n: usize) -> Dense {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

fn idx(m: i64, x: i64, spin: usize) -> usize {
    let n = 4 * m;
    (2 * (x + 2 * m).rem_euclid(n) as usize) + spin
}

fn profile(m: i64, theta: f64, x: i64) -> f64 {
    if x.abs() <= m {
        theta
    } else {
        -theta
    }
}

fn coin(m: i64, angle: impl Fn(i64) -> f64) -> Dense {
    let mut c = zeros(8 * m as usize);
    for x in -2 * m..2 * m {
        let (s, co) = angle(x).sin_cos();
        let (l, r) = (idx(m, x, 0), idx(m, x, 1));
        c[l][l] = co.into();
        c[l][r] = (-s).into();
        c[r][l] = s.into();
        c[r][r] = co.into();
    }
    c
}

fn shift(m: i64) -> Dense {
    let mut s = zeros(8 * m as usize);
    for x in -2 * m..2 * m {
        s[idx(m, x - 1, 0)][idx(m, x, 0)] = 1.0.into();
        s[idx(m, x + 1, 1)][idx(m, x, 1)] = 1.0.into();
    }
    s
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != Complex64::new(0.0, 0.0) {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

fn apply(a: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn u1(m: i64, t0: f64) -> Dense {
    let c = coin(m, |x| profile(m, t0, x) / 2.0);
    mul(&c, &mul(&shift(m), &c))
}

fn u2a(m: i64, t1: f64, t2: f64) -> Dense {
    mul(
        &coin(m, |x| profile(m, t2, x) / 2.0),
        &mul(&shift(m), &coin(m, |x| profile(m, t1, x) / 2.0)),
    )
}

fn u2b(m: i64, t1: f64, t2: f64) -> Dense {
    mul(
        &coin(m, |x| profile(m, t1, x) / 2.0),
        &mul(&shift(m), &coin(m, |x| profile(m, t2, x) / 2.0)),
    )
}

fn nonlinear_coin(m: i64, v: &[Complex64], k: f64) -> Dense {
    coin(m, |x| {
        let (l, r) = (v[idx(m, x, 0)], v[idx(m, x, 1)]);
        k * (l.norm_sqr() - r.norm_sqr())
    })
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn state(m: usize, amps: &[(f64, f64)]) -> WalkerState {
    let lat = Lattice::new(m).unwrap();
    let v = amps[..lat.dim()]
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    let mut s = WalkerState::from_amplitudes(lat, v).unwrap();
    s.normalize();
    s
}

fn half_width() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(4), Just(6)]
}

fn raw_amps() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 48)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn in_place_linear_walk_matches_dense_oracle(
        m in half_width(), amps in raw_amps(), t1 in -1.5..1.5f64, t2 in -1.5..1.5f64,
    ) {
        let s = state(m, &amps);
        let mi = m as i64;
        let lat = s.lattice();

        let walk = LinearWalk::new(CoinProfile::single(lat, t1));
        let mut v = s.amplitudes().to_vec();
        walk.apply(Factor::U1, &mut v);
        prop_assert!(max_diff(&v, &apply(&u1(mi, t1), s.amplitudes())) < 1e-12);

        let walk = LinearWalk::new(CoinProfile::two(lat, t1, t2));
        let oracle = mul(&u2b(mi, t1, t2), &u2a(mi, t1, t2));
        let mut v = s.amplitudes().to_vec();
        walk.apply_period(&mut v);
        prop_assert!(max_diff(&v, &apply(&oracle, s.amplitudes())) < 1e-12);
    }

    #[test]
    fn dense_unitary_matches_oracle(m in half_width(), t1 in -1.5..1.5f64, t2 in -1.5..1.5f64) {
        let lat = Lattice::new(m).unwrap();
        let mi = m as i64;
        let cases = [
            (Factor::U1, CoinProfile::single(lat, t1), u1(mi, t1)),
            (Factor::U2a, CoinProfile::two(lat, t1, t2), u2a(mi, t1, t2)),
            (Factor::U2b, CoinProfile::two(lat, t1, t2), u2b(mi, t1, t2)),
            (Factor::U2, CoinProfile::two(lat, t1, t2), mul(&u2b(mi, t1, t2), &u2a(mi, t1, t2))),
        ];
        for (factor, prof, oracle) in cases {
            let d = dense_unitary(factor, prof);
            for (i, row) in oracle.iter().enumerate() {
                for (j, want) in row.iter().enumerate() {
                    prop_assert!((d[(i, j)] - want).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn nonlinear_steps_match_dense_oracle(
        m in half_width(), amps in raw_amps(),
        t1 in -1.5..1.5f64, t2 in -1.5..1.5f64, k in 0.0..10.0f64,
    ) {
        let s = state(m, &amps);
        let mi = m as i64;
        let kappa = Kappa::new(k).unwrap();
        let psi = s.amplitudes().to_vec();

        let mut a = s.clone();
        step_single(&mut a, t1, kappa);
        let want = apply(&u1(mi, t1), &apply(&nonlinear_coin(mi, &psi, k), &psi));
        prop_assert!(max_diff(a.amplitudes(), &want) < 1e-12);

        let mut b = s.clone();
        step_two(&mut b, t1, t2, kappa);
        let tilde = apply(&u2a(mi, t1, t2), &apply(&nonlinear_coin(mi, &psi, k), &psi));
        let want = apply(&u2b(mi, t1, t2), &apply(&nonlinear_coin(mi, &tilde, -k), &tilde));
        prop_assert!(max_diff(b.amplitudes(), &want) < 1e-12);
    }

    #[test]
    fn nonlinear_steps_conserve_norm(
        m in half_width(), amps in raw_amps(),
        t1 in -1.5..1.5f64, t2 in -1.5..1.5f64, k in 0.0..50.0f64,
    ) {
        let mut s = state(m, &amps);
        let kappa = Kappa::new(k).unwrap();
        for _ in 0..20 {
            let before = s.norm2();
            step_single(&mut s, t1, kappa);
            prop_assert!((s.norm2() - before).abs() < 1e-12);
            let before = s.norm2();
            step_two(&mut s, t1, t2, kappa);
            prop_assert!((s.norm2() - before).abs() < 1e-12);
        }
    }

    #[test]
    fn real_states_stay_real(
        m in half_width(), amps in raw_amps(), t1 in -1.5..1.5f64, t2 in -1.5..1.5f64, k in 0.0..10.0f64,
    ) {
        let real: Vec<(f64, f64)> = amps.iter().map(|&(re, _)| (re, 0.0)).collect();
        let mut a = state(m, &real);
        let mut b = a.clone();
        let kappa = Kappa::new(k).unwrap();
        for _ in 0..200 {
            step_single(&mut a, t1, kappa);
            step_two(&mut b, t1, t2, kappa);
        }
        prop_assert!(a.max_imag() < 1e-12);
        prop_assert!(b.max_imag() < 1e-12);
    }

    #[test]
    fn two_step_preserves_support_parity(
        m in half_width(), amps in raw_amps(), odd in any::<bool>(),
        t1 in -1.5..1.5f64, t2 in -1.5..1.5f64, k in 0.0..10.0f64,
    ) {
        let keep = if odd { Sublattice::Odd } else { Sublattice::Even };
        let mut s = state(m, &amps);
        s.project_sublattice(keep);
        s.normalize();
        let before = s.support_parity();
        prop_assert_eq!(before, if odd { SupportParity::Odd } else { SupportParity::Even });
        for _ in 0..10 {
            step_two(&mut s, t1, t2, Kappa::new(k).unwrap());
            prop_assert_eq!(s.support_parity(), before);
        }
    }

    #[test]
    fn two_step_dense_has_no_cross_parity_elements(m in half_width(), t1 in -1.5..1.5f64, t2 in -1.5..1.5f64) {
        let lat = Lattice::new(m).unwrap();
        let d = dense_unitary(Factor::U2, CoinProfile::two(lat, t1, t2));
        for i in 0..lat.dim() {
            for j in 0..lat.dim() {
                if (i / 2) % 2 != (j / 2) % 2 {
                    prop_assert_eq!(d[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }
}

#[test]
fn shift_has_period_4m() {
    let lat = Lattice::new(6).unwrap();
    let s = WalkerState::from_fn(lat, |x| (Complex64::new(x as f64, 1.0), Complex64::new(-1.0, x as f64)));
    let mut t = s.clone();
    for step in 1..=lat.sites() {
        nlqw_core::apply_shift(&mut t);
        if step < lat.sites() {
            assert_ne!(t, s);
        }
    }
    assert_eq!(t, s);
}

#[test]
fn gaussian_stays_real_for_a_thousand_steps() {
    let lat = Lattice::new(20).unwrap();
    let mut a = gaussian_initial(50.0, lat, None).unwrap();
    let mut b = gaussian_initial(50.0, lat, Some(Sublattice::Even)).unwrap();
    let kappa = Kappa::new(3.9).unwrap();
    for _ in 0..1000 {
        step_single(&mut a, std::f64::consts::FRAC_PI_8, kappa);
        step_two(&mut b, -std::f64::consts::FRAC_PI_4, 0.4 * std::f64::consts::PI, kappa);
    }
    assert!(a.max_imag() < 1e-12);
    assert!(b.max_imag() < 1e-12);
    assert!((a.norm2() - 1.0).abs() < 1e-12);
}

#[test]
fn theta_of_balanced_state_is_zero() {
    let lat = Lattice::new(4).unwrap();
    let s = WalkerState::from_fn(lat, |x| {
        let a = Complex64::new(0.1 * x as f64, 0.0);
        (a, -a)
    });
    assert!(nonlinear_theta(&s).iter().all(|&t| t == 0.0));
}
