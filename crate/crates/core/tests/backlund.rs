use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgkink::backlund::*;
use sgkink::conserved::{manifold_momentum, momentum};
use sgkink::exact::{breather, kink, kink_profile, wobbler, KinkParams, KinkProfile, Sampler, WobblerParams};
use sgkink::field::{
    energy_norm, max_abs, max_abs_diff, parity_check, quadrature, FieldState, Grid, Parity, ParityTag,
    PerturbationPair,
};

fn grid() -> Grid {
    Grid::standard()
}

fn pair(g: &Grid, first: Vec<f64>, second: Vec<f64>) -> PerturbationPair {
    PerturbationPair::untagged(*g, first, second).unwrap()
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

/// Random smooth data with given parity built from a few Gaussians.
fn random_bump(g: &Grid, rng: &mut ChaCha8Rng, amp: f64, parity: Parity) -> Vec<f64> {
    let mut out = vec![0.0; g.n];
    for _ in 0..3 {
        let c = rng.gen_range(-3.0..3.0);
        let w = rng.gen_range(0.7..2.0);
        let a = amp * rng.gen_range(-1.0..1.0);
        for (i, o) in out.iter_mut().enumerate() {
            let x = g.x(i);
            let f = |z: f64| (-((z - c) / w).powi(2)).exp();
            *o += a * match parity {
                Parity::Even => f(x) + f(-x),
                Parity::Odd => f(x) - f(-x),
            };
        }
    }
    out
}

#[test]
fn bt_residual_vanishes_on_exact_pairs() {
    let g = grid();
    let q = kink(KinkParams::static_kink()).unwrap().state(&g, 0.0).unwrap();
    let z = FieldState::zeros(0.0, g);
    let a1 = BtParameter::new(1.0).unwrap();
    let (f1, f2) = bt_residual(&z, &q, a1).unwrap();
    assert!(max_abs(&f1) < 1e-9 && max_abs(&f2) < 1e-9);

    let w = wobbler(WobblerParams { beta: 0.3 }).unwrap();
    let b = breather(0.3).unwrap();
    for t in [0.0, 1.3, 5.0] {
        let (f1, f2) = bt_residual(&b.state(&g, t).unwrap(), &w.state(&g, t).unwrap(), a1).unwrap();
        assert!(max_abs(&f1) < 1e-8, "t={t}: {}", max_abs(&f1));
        assert!(max_abs(&f2) < 1e-8, "t={t}: {}", max_abs(&f2));
    }
}

#[test]
fn bt_residual_moving_kink_uses_matching_parameter() {
    let g = grid();
    for beta in [-0.4, 0.2, 0.6] {
        let q = kink(KinkParams::new(beta, 0.5).unwrap()).unwrap().state(&g, 0.0).unwrap();
        let a = BtParameter::from_beta(beta).unwrap();
        let (f1, f2) = bt_residual(&FieldState::zeros(0.0, g), &q, a).unwrap();
        assert!(max_abs(&f1) < 1e-8 && max_abs(&f2) < 1e-8);
    }
}

#[test]
fn bt_residual_non_pair_fixture() {
    let g = grid();
    let q = kink(KinkParams::static_kink()).unwrap().state(&g, 0.0).unwrap();
    let b = breather(0.5).unwrap().state(&g, 1.0).unwrap();
    let (f1, f2) = bt_residual(&b, &q, BtParameter::new(1.0).unwrap()).unwrap();
    let m = max_abs(&f1).max(max_abs(&f2));
    assert!(m > 0.1);
    assert!((m - 1.489_94).abs() < 1e-4, "fixture moved: {m}");
}

#[test]
fn bt_residual_grid_mismatch() {
    let a = FieldState::zeros(0.0, Grid::standard());
    let b = FieldState::zeros(0.0, Grid::symmetric(20.0, 0.02).unwrap());
    assert!(bt_residual(&a, &b, BtParameter::new(1.0).unwrap()).is_err());
}

#[test]
fn tilde_residual_zero_and_parity() {
    let g = grid();
    let p = kink_profile(KinkParams::static_kink()).unwrap();
    let z = PerturbationPair::zeros(g, ParityTag::None);
    let (f1, f2) = tilde_residual(&z, &z, 0.0, &p).unwrap();
    assert!(max_abs(&f1) < 1e-9 && max_abs(&f2) < 1e-9);
    assert!(tilde_residual(&z, &z, -1.0, &p).is_err());

    // Odd ũ, odd y: both functionals even.
    let u = g.sample(|x| 0.1 * x * (-x * x).exp());
    let s = g.sample(|x| 0.05 * (-x * x).exp());
    let y = g.sample(|x| 0.07 * x.tanh() * sech(x));
    let v = g.sample(|x| 0.03 * sech(x));
    let (f1, f2) = tilde_residual(&pair(&g, u.clone(), s), &pair(&g, y, v), 0.2, &p).unwrap();
    assert!(parity_check(&f1, &g, Parity::Even).unwrap() < 1e-12);
    assert!(parity_check(&f2, &g, Parity::Even).unwrap() < 1e-12);

    // β = 0, (ũ, s̃) odd-odd, (y, v) even-even: F̃₁ even, F̃₂ odd.
    let s = g.sample(|x| 0.05 * x * (-x * x).exp());
    let y = g.sample(|x| 0.07 * sech(x));
    let v = g.sample(|x| 0.02 * sech(2.0 * x));
    let (f1, f2) = tilde_residual(&pair(&g, u, s), &pair(&g, y, v), 0.0, &p).unwrap();
    assert!(parity_check(&f1, &g, Parity::Even).unwrap() < 1e-12);
    assert!(parity_check(&f2, &g, Parity::Odd).unwrap() < 1e-12);
}

#[test]
fn manifold_map_at_origin_is_zero() {
    let g = grid();
    let z = PerturbationPair::zeros(g, ParityTag::OddEven);
    let r = construct_manifold_data(&z, 0.0, &opts()).unwrap();
    assert!(max_abs(&r.result.first) < 1e-14);
    assert!(max_abs(&r.result.second) < 1e-14);
    assert_eq!(r.nu0, 1.0);
}

#[test]
fn manifold_map_reproduces_boosted_kink() {
    let g = grid();
    let z = PerturbationPair::zeros(g, ParityTag::OddEven);
    for beta in [0.1, 0.2, -0.2] {
        let a = BtParameter::from_beta(beta).unwrap();
        let r = construct_manifold_data(&z, a.delta(), &opts()).unwrap();
        let p = kink_profile(KinkParams::new(beta, 0.0).unwrap()).unwrap();
        let q0 = kink_profile(KinkParams::static_kink()).unwrap();
        let eu = (0..g.n).map(|i| (r.result.first[i] - (p.q(g.x(i)) - q0.q(g.x(i)))).abs()).fold(0.0, f64::max);
        let es = (0..g.n).map(|i| (r.result.second[i] - p.q_t(g.x(i))).abs()).fold(0.0, f64::max);
        assert!(eu < 1e-8 && es < 1e-8, "beta={beta}: {eu:e} {es:e}");
        assert!(r.final_residual <= 1e-11);
        assert!((r.nu0 - a.nu()).abs() < 1e-15);
    }
}

#[test]
fn manifold_data_carries_the_predicted_momentum() {
    let g = grid();
    let q0 = kink_profile(KinkParams::static_kink()).unwrap();
    for delta in [0.1, -0.05] {
        let y0 = g.sample(|x| 0.05 * sech(x) * x.tanh());
        let yv = PerturbationPair::new(g, y0, vec![0.0; g.n], ParityTag::OddEven, 1e-12).unwrap();
        let r = construct_manifold_data(&yv, delta, &opts()).unwrap();
        let u: Vec<f64> = (0..g.n).map(|i| q0.q(g.x(i)) + r.result.first[i]).collect();
        let st = FieldState::new(0.0, g, u, r.result.second.clone()).unwrap();
        let p = momentum(&st).unwrap();
        assert!((p - manifold_momentum(delta).unwrap()).abs() < 1e-6, "delta={delta}: {p}");
        assert!(r.bt_defect < 1e-8);
    }
}

#[test]
fn manifold_map_rejects_bad_inputs() {
    let g = grid();
    let even = g.sample(|x| 0.05 * sech(x));
    let bad = pair(&g, even.clone(), vec![0.0; g.n]);
    assert!(matches!(construct_manifold_data(&bad, 0.0, &opts()), Err(sgkink::Error::Parity { .. })));
    let big = pair(&g, g.sample(|x| 2.0 * x.tanh() * sech(x)), vec![0.0; g.n]);
    assert!(construct_manifold_data(&big, 0.0, &opts()).is_err());
    let z = PerturbationPair::zeros(g, ParityTag::OddEven);
    assert!(construct_manifold_data(&z, -1.5, &opts()).is_err());
    let asym = Grid::new(-10.0, 12.0, 1101).unwrap();
    assert!(construct_manifold_data(&PerturbationPair::zeros(asym, ParityTag::None), 0.0, &opts()).is_err());
}

#[test]
fn nonconvergence_reports_history() {
    let g = grid();
    let yv = PerturbationPair::new(g, g.sample(|x| 0.05 * x.tanh() * sech(x)), vec![0.0; g.n], ParityTag::OddEven, 1e-12)
        .unwrap();
    let o = SolverOptions { max_iter: 2, ..opts() };
    match construct_manifold_data(&yv, 0.3, &o) {
        Err(sgkink::Error::NoConvergence { iterations, history, .. }) => {
            assert_eq!(iterations, 2);
            assert_eq!(history.len(), 2);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn zero_lifts_and_descents_are_zero() {
    let g = grid();
    let ee = PerturbationPair::zeros(g, ParityTag::EvenEven);
    let oo = PerturbationPair::zeros(g, ParityTag::OddOdd);
    let r = lift_zero_to_kink(&ee, &opts()).unwrap();
    assert!(max_abs(&r.result.first) < 1e-15 && max_abs(&r.result.second) < 1e-15);
    let r = descend_kink_to_zero(&oo, &opts()).unwrap();
    assert!(max_abs(&r.result.first) < 1e-15 && max_abs(&r.result.second) < 1e-15);
    for t in [0.0, 0.9] {
        let r = lift_breather_to_wobbler(&ee, 0.3, t, &opts()).unwrap();
        assert!(max_abs(&r.result.first) < 1e-9 && max_abs(&r.result.second) < 1e-9);
        let r = descend_wobbler_to_breather(&oo, 0.3, t, &opts()).unwrap();
        assert!(max_abs(&r.result.first) < 1e-9 && max_abs(&r.result.second) < 1e-9);
    }
}

#[test]
fn breather_lifts_to_wobbler_over_the_kink() {
    let g = grid();
    let (beta, t) = (0.1, 0.7);
    let b = breather(beta).unwrap().state(&g, t).unwrap();
    let w = wobbler(WobblerParams { beta }).unwrap().state(&g, t).unwrap();
    let q = kink(KinkParams::static_kink()).unwrap().state(&g, 0.0).unwrap();
    let yv = PerturbationPair::new(g, b.u, b.v, ParityTag::EvenEven, 1e-12).unwrap();
    let r = lift_zero_to_kink(&yv, &opts()).unwrap();
    let eu = (0..g.n).map(|i| (r.result.first[i] - (w.u[i] - q.u[i])).abs()).fold(0.0, f64::max);
    let es = max_abs_diff(&r.result.second, &w.v);
    assert!(eu < 1e-7 && es < 1e-7, "{eu:e} {es:e}");
    assert!(parity_check(&r.result.first, &g, Parity::Odd).unwrap() < 1e-9);
    assert!(parity_check(&r.result.second, &g, Parity::Odd).unwrap() < 1e-9);
}

#[test]
fn wobbler_descends_to_breather_over_zero() {
    let g = grid();
    let beta = 0.1;
    let w = wobbler(WobblerParams { beta }).unwrap().state(&g, 0.0).unwrap();
    let q = kink(KinkParams::static_kink()).unwrap().state(&g, 0.0).unwrap();
    let b = breather(beta).unwrap().state(&g, 0.0).unwrap();
    let u: Vec<f64> = (0..g.n).map(|i| w.u[i] - q.u[i]).collect();
    let us = PerturbationPair::new(g, u, w.v, ParityTag::OddOdd, 1e-12).unwrap();
    let r = descend_kink_to_zero(&us, &opts()).unwrap();
    assert!(max_abs_diff(&r.result.first, &b.u) < 1e-7);
    assert!(max_abs_diff(&r.result.second, &b.v) < 1e-7);
    let (compat, mismatch) = r.compatibility.unwrap();
    assert!(compat < 1e-10 && mismatch < 1e-10);
}

#[test]
fn kink_lift_descent_round_trip() {
    let g = grid();
    let yv = PerturbationPair::new(g, g.sample(|x| 0.05 * sech(x)), vec![0.0; g.n], ParityTag::EvenEven, 0.0).unwrap();
    let up = lift_zero_to_kink(&yv, &opts()).unwrap();
    let down = descend_kink_to_zero(&up.result, &opts()).unwrap();
    assert!(down.result.max_distance(&yv) < 1e-8, "{:e}", down.result.max_distance(&yv));
}

#[test]
fn wobbler_family_lift_and_descent() {
    // Breather tails decay like e^{−β|x|}; the descent starts from zero at the ends.
    let g = Grid::symmetric(60.0, 0.02).unwrap();
    let (beta, beta2) = (0.3, 0.31);
    let b1 = breather(beta).unwrap();
    let b2 = breather(beta2).unwrap();
    let w1 = wobbler(WobblerParams { beta }).unwrap();
    let w2 = wobbler(WobblerParams { beta: beta2 }).unwrap();
    for t in [0.0, 1.1] {
        let (s1, s2) = (b1.state(&g, t).unwrap(), b2.state(&g, t).unwrap());
        let (k1, k2) = (w1.state(&g, t).unwrap(), w2.state(&g, t).unwrap());
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<f64>>();
        let yv = PerturbationPair::new(g, diff(&s2.u, &s1.u), diff(&s2.v, &s1.v), ParityTag::EvenEven, 1e-12).unwrap();
        let want = pair(&g, diff(&k2.u, &k1.u), diff(&k2.v, &k1.v));
        let r = lift_breather_to_wobbler(&yv, beta, t, &opts()).unwrap();
        assert!(r.result.max_distance(&want) < 1e-6, "t={t}: {:e}", r.result.max_distance(&want));
        assert!(r.bt_defect < 1e-8);
        let want_us = PerturbationPair::new(g, want.first, want.second, ParityTag::OddOdd, 1e-12).unwrap();
        let d = descend_wobbler_to_breather(&want_us, beta, t, &opts()).unwrap();
        assert!(d.result.max_distance(&yv) < 1e-6, "t={t}: {:e}", d.result.max_distance(&yv));
    }
}

#[test]
fn wobbler_round_trip_on_random_data() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4 {
        let y = random_bump(&g, &mut rng, 0.05, Parity::Even);
        let v = random_bump(&g, &mut rng, 0.05, Parity::Even);
        let yv = PerturbationPair::new(g, y, v, ParityTag::EvenEven, 1e-12).unwrap();
        let up = lift_breather_to_wobbler(&yv, 0.4, 1.1, &opts()).unwrap();
        let down = descend_wobbler_to_breather(&up.result, 0.4, 1.1, &opts()).unwrap();
        assert!(down.result.max_distance(&yv) < 1e-7, "{:e}", down.result.max_distance(&yv));
    }
}

#[test]
fn wobbler_lift_is_l2_stable() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let y = random_bump(&g, &mut rng, 0.03, Parity::Even);
        let v = random_bump(&g, &mut rng, 0.03, Parity::Even);
        let yv = PerturbationPair::new(g, y, v, ParityTag::EvenEven, 1e-12).unwrap();
        let beta = rng.gen_range(0.2..0.6);
        let t = rng.gen_range(0.0..3.0);
        let r = lift_breather_to_wobbler(&yv, beta, t, &opts()).unwrap();
        let z = PerturbationPair::zeros(g, ParityTag::EvenEven);
        let base = lift_breather_to_wobbler(&z, beta, t, &opts()).unwrap();
        let du: Vec<f64> = r.result.first.iter().zip(&base.result.first).map(|(a, b)| a - b).collect();
        let l2 = quadrature(&du.iter().map(|d| d * d).collect::<Vec<_>>(), &g).unwrap().sqrt();
        worst = worst.max(l2 / energy_norm(&yv).unwrap());
    }
    assert!(worst <= 10.0, "stability constant {worst}");
}

#[test]
fn wobbler_descent_rejects_broken_parity() {
    let g = grid();
    let u = g.sample(|x| 0.02 * x * (-x * x).exp() + 1e-3 * (-x * x).exp());
    let us = pair(&g, u, vec![0.0; g.n]);
    assert!(descend_wobbler_to_breather(&us, 0.3, 0.0, &opts()).is_err());
}

#[test]
fn orthogonal_lift_of_zero_is_zero() {
    let g = grid();
    let z = PerturbationPair::zeros(g, ParityTag::None);
    let r = lift_with_orthogonality(&z, 0.0, 0.0, 0.0, 0.0, &opts()).unwrap();
    assert!(max_abs(&r.result.first) < 1e-14 && max_abs(&r.result.second) < 1e-14);
    assert!(r.orthogonality.unwrap().abs() < 1e-10);
}

#[test]
fn orthogonal_lift_matches_manifold_map_for_odd_data() {
    let g = grid();
    let y0 = g.sample(|x| 0.04 * x.tanh() * sech(x));
    let v0 = g.sample(|x| 0.02 * sech(x));
    let yv = PerturbationPair::new(g, y0, v0, ParityTag::OddEven, 1e-12).unwrap();
    let phi = construct_manifold_data(&yv, 0.05, &opts()).unwrap();
    let r = lift_with_orthogonality(&yv, 0.05, 0.0, 0.0, 0.0, &opts()).unwrap();
    assert!(r.result.max_distance(&phi.result) < 1e-10);
    assert!(r.orthogonality.unwrap().abs() < 1e-10);
}

#[test]
fn orthogonal_lift_consistent_with_initial_data() {
    let g = grid();
    let delta = 0.08;
    let beta = final_speed_from_delta(delta).unwrap();
    let y0 = g.sample(|x| 0.05 * x.tanh() * sech(x));
    let yv = PerturbationPair::new(g, y0, vec![0.0; g.n], ParityTag::OddEven, 1e-12).unwrap();
    let phi = construct_manifold_data(&yv, delta, &opts()).unwrap();
    let r = lift_with_orthogonality(&yv, delta, beta, 0.0, 0.0, &opts()).unwrap();
    let qb = KinkProfile::centered(beta, 0.0).unwrap();
    let q0 = KinkProfile::centered(0.0, 0.0).unwrap();
    let eu = (0..g.n)
        .map(|i| (r.result.first[i] - (q0.q(g.x(i)) - qb.q(g.x(i)) + phi.result.first[i])).abs())
        .fold(0.0, f64::max);
    let es = (0..g.n).map(|i| (r.result.second[i] - (phi.result.second[i] - qb.q_t(g.x(i)))).abs()).fold(0.0, f64::max);
    assert!(eu < 1e-7 && es < 1e-7, "{eu:e} {es:e}");
    assert!(r.orthogonality.unwrap().abs() < 1e-10);
    assert!(r.final_residual <= 1e-9);
    assert!((r.nu0 - BtParameter::from_delta(delta).unwrap().nu() / qb.gamma).abs() < 1e-14);
}

#[test]
fn orthogonal_lift_moving_frame_enforces_orthogonality() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let y = random_bump(&g, &mut rng, 0.03, Parity::Even);
    let v: Vec<f64> = random_bump(&g, &mut rng, 0.03, Parity::Odd);
    let yv = pair(&g, y, v);
    let r = lift_with_orthogonality(&yv, 0.1, 0.2, 0.4, 1.5, &opts()).unwrap();
    assert!(r.orthogonality.unwrap().abs() < 1e-10);
    assert!(r.bt_defect < 1e-7, "{:e}", r.bt_defect);
}

#[test]
fn final_speed_examples() {
    assert_eq!(final_speed_from_momentum(0.0), 0.0);
    assert!((final_speed_from_momentum(-3.0) - 0.6).abs() < 1e-15);
    assert_eq!(final_speed_from_delta(0.0).unwrap(), 0.0);
    assert!((final_speed_from_delta(1.0).unwrap() - 0.6).abs() < 1e-15);
    assert!(final_speed_from_delta(-1.0).is_err());
    for d in [-0.3, 0.05, 0.5] {
        let b1 = final_speed_from_momentum(manifold_momentum(d).unwrap());
        assert!((b1 - final_speed_from_delta(d).unwrap()).abs() < 1e-12);
    }
    let g = grid();
    for beta in [-0.5, -0.1, 0.1, 0.5] {
        let s = kink(KinkParams::new(beta, 0.0).unwrap()).unwrap().state(&g, 0.0).unwrap();
        assert!((final_speed_from_momentum(momentum(&s).unwrap()) - beta).abs() < 1e-8);
    }
}

#[test]
fn report_residual_is_reproducible() {
    let g = grid();
    let yv = PerturbationPair::new(g, g.sample(|x| 0.05 * sech(x)), g.sample(|x| 0.02 * sech(x)), ParityTag::EvenEven, 0.0)
        .unwrap();
    let a = lift_zero_to_kink(&yv, &opts()).unwrap();
    let b = lift_zero_to_kink(&yv, &opts()).unwrap();
    assert_eq!(a, b);
    assert!(a.final_residual <= opts().tol);
    assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn final_speed_identity(d in -0.9..9.0f64) {
        let b1 = final_speed_from_momentum(manifold_momentum(d).unwrap());
        prop_assert!((b1 - final_speed_from_delta(d).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bt_parameter_round_trip(beta in -0.99..0.99f64) {
        prop_assert!((BtParameter::from_beta(beta).unwrap().beta() - beta).abs() < 1e-14);
    }

    #[test]
    fn manifold_map_parity_contract(a in -0.05..0.05f64, b in -0.05..0.05f64, delta in -0.2..0.2f64) {
        let g = Grid::symmetric(30.0, 0.02).unwrap();
        let y = g.sample(|x| a * x.tanh() * sech(x));
        let v = g.sample(|x| b * sech(1.5 * x));
        let yv = PerturbationPair::new(g, y, v, ParityTag::OddEven, 0.0).unwrap();
        let r = construct_manifold_data(&yv, delta, &SolverOptions::default()).unwrap();
        prop_assert!(parity_check(&r.result.first, &g, Parity::Odd).unwrap() <= 1e-9);
        prop_assert!(parity_check(&r.result.second, &g, Parity::Even).unwrap() <= 1e-9);
        prop_assert!(r.final_residual <= 1e-11);
    }

    #[test]
    fn kink_round_trip_random(seed in 0u64..1000) {
        let g = Grid::symmetric(30.0, 0.02).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random_bump(&g, &mut rng, 0.04, Parity::Even);
        let v = random_bump(&g, &mut rng, 0.04, Parity::Even);
        let yv = PerturbationPair::new(g, y, v, ParityTag::EvenEven, 1e-12).unwrap();
        let up = lift_zero_to_kink(&yv, &SolverOptions::default()).unwrap();
        let down = descend_kink_to_zero(&up.result, &SolverOptions::default()).unwrap();
        prop_assert!(down.result.max_distance(&yv) < 1e-7);
    }
}
