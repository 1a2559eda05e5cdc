use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgkink::backlund::{construct_manifold_data, SolverOptions};
use sgkink::evolver::{EvolveConfig, Stencil};
use sgkink::exact::{kink, three_soliton, wobbler, KinkParams, KinkProfile, Sampler, ThreeSolitonParams, WobblerParams};
use sgkink::field::{max_abs, FieldState, Grid, ParityTag, PerturbationPair};
use sgkink::modulation::*;
use sgkink::Error;

fn grid() -> Grid {
    Grid::standard()
}

/// Kink centred at `c` (speed `beta`, time `t`) plus `pert(x − c)`.
fn kink_plus(g: &Grid, beta: f64, c: f64, t: f64, pert: impl Fn(f64) -> (f64, f64)) -> FieldState {
    let p = KinkProfile::centered(beta, c).unwrap();
    let u = g.sample(|x| p.q(x) + pert(x - c).0);
    let v = g.sample(|x| p.q_t(x) + pert(x - c).1);
    FieldState::new(t, *g, u, v).unwrap()
}

fn generic(z: f64) -> (f64, f64) {
    let e = (-(z - 0.4) * (z - 0.4)).exp();
    (0.05 * (1.0 + z) * e, 0.03 * z * z * e)
}

#[test]
fn shift_of_exact_kink() {
    let g = grid();
    let s = kink_plus(&g, 0.0, 0.37, 0.0, |_| (0.0, 0.0));
    assert!((solve_shift(&s, 0.0, 0.0).unwrap() - 0.37).abs() < 1e-9);
    let s = kink_plus(&g, 0.3, 0.6 + 0.3 * 2.0, 2.0, |_| (0.0, 0.0));
    assert!((solve_shift(&s, 0.3, 0.0).unwrap() - 0.6).abs() < 1e-9);
}

#[test]
fn odd_perturbation_gives_zero_shift() {
    let g = grid();
    let s = kink_plus(&g, 0.0, 0.0, 0.0, |z| (0.1 * z * (-z * z).exp(), 0.05 * z * (-z * z).exp()));
    assert!(solve_shift(&s, 0.0, 0.3).unwrap().abs() < 1e-9);
}

#[test]
fn root_is_independent_of_the_guess() {
    let g = grid();
    let s = kink_plus(&g, 0.0, 0.0, 0.0, generic);
    let roots: Vec<f64> = [-0.2, 0.0, 0.4].iter().map(|&r| solve_shift(&s, 0.0, r).unwrap()).collect();
    assert!(roots[0].abs() > 1e-4);
    assert!(roots.iter().all(|r| (r - roots[0]).abs() < 1e-9), "{roots:?}");
    let sol = solve_shift_with(&s, 0.0, 0.0, &ShiftOptions::default()).unwrap();
    assert!(sol.residual <= 1e-10 && sol.distance < 0.5);
}

#[test]
fn shift_is_translation_equivariant() {
    let g = grid();
    let r0 = solve_shift(&kink_plus(&g, 0.0, 0.0, 0.0, generic), 0.0, 0.0).unwrap();
    for d in [-1.3, 0.25, 2.0] {
        let r = solve_shift(&kink_plus(&g, 0.0, d, 0.0, generic), 0.0, d).unwrap();
        assert!((r - r0 - d).abs() < 1e-9, "{d}: {}", r - r0 - d);
    }
}

#[test]
fn leaving_the_tube_is_reported() {
    let g = grid();
    let s = kink_plus(&g, 0.0, 0.0, 0.0, |z| (0.8 * (-z * z).exp(), 0.0));
    assert!(matches!(solve_shift(&s, 0.0, 0.0), Err(Error::TubeExit { .. })));
    let zero = FieldState::zeros(1.5, g);
    match solve_shift(&zero, 0.0, 0.0) {
        Err(Error::TubeExit { t, .. }) => assert_eq!(t, 1.5),
        r => panic!("{r:?}"),
    }
}

#[test]
fn decomposition_of_kink_and_wobbler() {
    let g = grid();
    let s = kink_plus(&g, 0.0, -0.8, 0.0, |_| (0.0, 0.0));
    let p = decompose(&s, 0.0, -0.8).unwrap();
    assert!(max_abs(&p.first) < 1e-14 && max_abs(&p.second) < 1e-14);

    let w = wobbler(WobblerParams { beta: 0.1 }).unwrap().state(&g, 0.0).unwrap();
    // The wobbler sits far from the kink in energy norm; widen the tube.
    let opts = ShiftOptions { tube: 10.0, ..ShiftOptions::default() };
    let rho = solve_shift_with(&w, 0.0, 0.2, &opts).unwrap().rho;
    assert!(rho.abs() < 1e-9);
    let p = decompose(&w, 0.0, rho).unwrap();
    let q = kink(KinkParams::static_kink()).unwrap().state(&g, 0.0).unwrap();
    for i in 0..g.n {
        assert!((p.first[i] - (w.u[i] - q.u[i])).abs() < 1e-12);
        assert!((p.second[i] - w.v[i]).abs() < 1e-12);
    }
    assert!(orthogonality(&w, 0.0, rho).unwrap().abs() <= 1e-8);
}

#[test]
fn reconstruction_reproduces_nodes() {
    let g = grid();
    let s = kink_plus(&g, 0.2, 0.3, 1.0, generic);
    let rho = solve_shift(&s, 0.2, 0.0).unwrap();
    let p = decompose(&s, 0.2, rho).unwrap();
    let r = reconstruct(&p, 0.2, rho, 1.0).unwrap();
    let exact = (0..g.n).filter(|&i| r.u[i] == s.u[i] && r.v[i] == s.v[i]).count();
    assert!(exact as f64 > 0.9 * g.n as f64);
    for i in 0..g.n {
        assert!((r.u[i] - s.u[i]).abs() <= 2.0 * f64::EPSILON * s.u[i].abs().max(1.0));
        assert!((r.v[i] - s.v[i]).abs() <= 2.0 * f64::EPSILON);
    }
}

fn manifold_data(g: &Grid, y0: Vec<f64>) -> (FieldState, FieldState, PerturbationPair) {
    let yv = PerturbationPair::new(*g, y0, vec![0.0; g.n], ParityTag::OddEven, 1e-12).unwrap();
    let rep = construct_manifold_data(&yv, 0.0, &SolverOptions::default()).unwrap();
    let q = kink(KinkParams::static_kink()).unwrap().state(g, 0.0).unwrap();
    let u = q.u.iter().zip(&rep.result.first).map(|(a, b)| a + b).collect();
    let ks = FieldState::new(0.0, *g, u, rep.result.second.clone()).unwrap();
    let zs = FieldState::new(0.0, *g, yv.first.clone(), yv.second.clone()).unwrap();
    (ks, zs, rep.result)
}

fn gauss_odd(g: &Grid, eta: f64) -> Vec<f64> {
    g.sample(|x| eta * x * (-x * x).exp())
}

fn run(g: &Grid, y0: Vec<f64>, t_end: f64, keep: bool) -> TrackRun {
    run_every(g, y0, t_end, keep, TrackConfig::default().record_every)
}

fn run_every(g: &Grid, y0: Vec<f64>, t_end: f64, keep: bool, every: usize) -> TrackRun {
    let (ks, zs, _) = manifold_data(g, y0);
    let cfg = EvolveConfig::new(0.015, t_end).with_stencil(Stencil::Fourth);
    let tc = TrackConfig { record_every: every, ..TrackConfig::default() };
    track(&ks, Some(&zs), &cfg, &tc, keep).unwrap()
}

#[test]
fn tracking_keeps_orthogonality() {
    let g = grid();
    let r = run(&g, gauss_odd(&g, 0.08), 10.0, false);
    assert!(r.stopped.is_none());
    assert!(r.records.len() > 60);
    assert!(r.records.iter().all(|x| x.ortho_residual <= 1e-8));
    assert!(r.records.iter().all(|x| x.momentum.abs() < 1e-5));
    assert!(r.records.iter().any(|x| x.rho.abs() > 1e-9));
}

#[test]
fn modulation_equation_is_consistent() {
    // ũ_t = s̃ + ρ′Q′ in the static frame, checked by centred differences.
    let g = grid();
    let r = run_every(&g, gauss_odd(&g, 0.08), 3.0, true, 1);
    let k = r.records.len() / 2;
    let dt = r.records[k + 1].t - r.records[k - 1].t;
    let q = KinkProfile::centered(0.0, r.records[k].rho).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..g.n {
        let ut = (r.kink_pairs[k + 1].first[i] - r.kink_pairs[k - 1].first[i]) / dt;
        let want = r.kink_pairs[k].second[i] + r.records[k].rho_rate * q.q_x(g.x(i));
        worst = worst.max((ut - want).abs());
    }
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn zero_perturbation_gives_zero_rates() {
    let g = grid();
    let r = run(&g, vec![0.0; g.n], 3.0, false);
    let rep = rho_rate_check(&r.records, 0.1);
    // Only rounding left in the shift.
    assert!(rep.max_lhs < 1e-14, "{}", rep.max_lhs);
    assert_eq!(rep.max_rhs, 0.0);
}

#[test]
fn rate_is_cubic_in_odd_amplitude() {
    // Odd data keeps the quadratic part of the rate at zero.
    let g = grid();
    let a = rho_rate_check(&run(&g, gauss_odd(&g, 0.08), 10.0, false).records, 0.1);
    let b = rho_rate_check(&run(&g, gauss_odd(&g, 0.04), 10.0, false).records, 0.1);
    let ratio = a.max_lhs / b.max_lhs;
    assert!((6.0..=10.0).contains(&ratio), "{ratio}");
}

#[test]
fn rate_ratio_bounded_across_seeds() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ratios = vec![];
    for _ in 0..5 {
        let (c, w, a) = (rng.gen_range(0.5..2.0), rng.gen_range(0.7..1.5), rng.gen_range(0.03..0.08));
        let y0 = g.sample(|x| a * ((-((x - c) / w).powi(2)).exp() - (-((x + c) / w).powi(2)).exp()));
        let rep = rho_rate_check(&run(&g, y0, 10.0, false).records, 0.1);
        ratios.push(rep.ratio_rate_zero_side);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(max > 0.0 && max < 1.0, "{ratios:?}");
}

#[test]
fn recomputed_terms_match_recorded_ones() {
    let g = grid();
    let r = run(&g, gauss_odd(&g, 0.05), 2.0, true);
    let a = rho_rate_check(&r.records, 0.1);
    let b = rho_rate_check_pairs(&r.records, &r.kink_pairs, &r.zero_pairs, 0.1).unwrap();
    assert_eq!(a, b);
    let c = rho_rate_check_pairs(&r.records, &r.kink_pairs, &r.zero_pairs, 0.3).unwrap();
    assert!(c.ratio_sech > 0.0);
    assert!(rho_rate_check_pairs(&r.records, &r.kink_pairs[1..], &r.zero_pairs, 0.1).is_err());
}

#[test]
fn stilde_identity_and_bound() {
    let g = grid();
    let z = PerturbationPair::zeros(g, ParityTag::None);
    let rep = stilde_bound_check(&z, &z, 0.0).unwrap();
    assert_eq!(rep.identity_residual, 0.0);
    assert_eq!(rep.bound_constant, 0.0);

    let (_, zs, us) = manifold_data(&g, gauss_odd(&g, 0.08));
    let yv = PerturbationPair::from_state(&zs);
    let rep = stilde_bound_check(&us, &yv, 0.0).unwrap();
    assert!(rep.identity_residual <= 1e-8, "{}", rep.identity_residual);
    assert!(rep.bound_constant <= 3.0);
}

#[test]
fn odd_perturbation_converges_to_zero_shift() {
    let g = grid();
    let s = kink_plus(&g, 0.0, 0.0, 0.0, |z| (0.1 * z * (-z * z).exp(), 0.05 * z * (-z * z).exp()));
    let r = track(&s, None, &EvolveConfig::new(0.015, 20.0), &TrackConfig::default(), false).unwrap();
    match convergence_classifier(&r.records).class {
        Classification::BoundedConverging { rho_bar, .. } => assert!(rho_bar.abs() < 1e-9),
        c => panic!("{c:?}"),
    }
}

#[test]
fn breather_collision_moves_the_kink() {
    // Kink with an attached breather of speed 0.3 moving away from it.
    let g = grid();
    let w = three_soliton(ThreeSolitonParams { beta: 0.5, v: 0.3 }).unwrap();
    let s = w.state(&g, 0.0).unwrap();
    let mut tc = TrackConfig::default();
    tc.shift.tube = 10.0;
    let r = track(&s, None, &EvolveConfig::new(0.015, 40.0), &tc, false).unwrap();
    assert!(r.stopped.is_none(), "{:?}", r.stopped);
    let rep = convergence_classifier(&r.records);
    match rep.class {
        Classification::BoundedConverging { rho_bar, .. } => assert!(rho_bar.abs() > 1e-3, "{rho_bar}"),
        Classification::Excursion { rhos, .. } => assert!(!rhos.is_empty()),
    }
    assert_eq!(rep.local_norms.len(), r.records.len());
}
