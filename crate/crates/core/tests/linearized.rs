use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgkink::exact::{linear_mode, phi4_resonance, y1, ComplexSampler, LinearMode, Phi4Kink, Sampler};
use sgkink::field::{max_abs, quadrature, DiffOrder, Grid};
use sgkink::linearized::*;
use sgkink::par::Exec;

const SQ2: f64 = std::f64::consts::SQRT_2;

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn mode(name: &str) -> LinearMode {
    linear_mode(name).unwrap()
}

fn max_interior(v: &[f64], skip: usize) -> f64 {
    max_abs(&v[skip..v.len() - skip])
}

/// `|⟨a, b⟩| / (‖a‖‖b‖)` on the grid.
fn overlap(a: &[f64], b: &[f64], g: &Grid) -> f64 {
    let ab = quadrature(&a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>(), g).unwrap();
    let aa = quadrature(&a.iter().map(|x| x * x).collect::<Vec<_>>(), g).unwrap();
    let bb = quadrature(&b.iter().map(|x| x * x).collect::<Vec<_>>(), g).unwrap();
    ab.abs() / (aa * bb).sqrt()
}

#[test]
fn operators_reach_their_thresholds() {
    let g = Grid::standard();
    for op in [
        SchrodingerOperator::SineGordonKink,
        SchrodingerOperator::Phi4Kink,
        SchrodingerOperator::Phi4Dual,
        SchrodingerOperator::Flat { mass_sq: 2.0 },
    ] {
        op.check_threshold(&g).unwrap();
    }
    let short = Grid::symmetric(3.0, 0.01).unwrap();
    assert!(SchrodingerOperator::Phi4Kink.check_threshold(&short).is_err());
}

#[test]
fn kernels_and_internal_modes() {
    let g = Grid::standard();
    let qp = g.sample(|x| 2.0 * sech(x));
    let r = apply_operator(&SchrodingerOperator::SineGordonKink, &qp, &g).unwrap();
    assert!(max_abs(&r) < 1e-3, "{}", max_abs(&r));

    let y = g.sample(y1);
    let r = apply_operator(&SchrodingerOperator::Phi4Kink, &y, &g).unwrap();
    let d: Vec<f64> = r.iter().zip(&y).map(|(a, b)| a - 1.5 * b).collect();
    assert!(max_abs(&d) < 1e-3);

    let res = g.sample(phi4_resonance);
    let r = apply_operator(&SchrodingerOperator::Phi4Kink, &res, &g).unwrap();
    let d: Vec<f64> = r.iter().zip(&res).map(|(a, b)| a - 2.0 * b).collect();
    assert!(max_interior(&d, 1) < 1e-3);
    // The Dirichlet closure shows up at the ends for a non-decaying function.
    assert!(d[0].abs() > 1.0);
}

#[test]
fn sine_gordon_kink_has_only_the_translation_mode() {
    let g = Grid::new(-30.0, 30.0, 4001).unwrap();
    let sp = discrete_spectrum(&SchrodingerOperator::SineGordonKink, &g).unwrap();
    assert_eq!(sp.len(), 1);
    assert!(sp[0].value.abs() <= 1e-4, "{}", sp[0].value);
    let s = g.sample(|x| sech(x) / SQ2);
    assert!(overlap(&sp[0].vector, &s, &g) > 1.0 - 1e-8);
    let nrm = quadrature(&sp[0].vector.iter().map(|v| v * v).collect::<Vec<_>>(), &g).unwrap();
    assert!((nrm - 1.0).abs() < 1e-10);
    let dmax = sp[0].vector.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dmax < 1e-4);
}

#[test]
fn phi4_kink_spectrum() {
    let g = Grid::new(-30.0, 30.0, 4001).unwrap();
    let sp = discrete_spectrum(&SchrodingerOperator::Phi4Kink, &g).unwrap();
    assert_eq!(sp.len(), 2);
    assert!(sp[0].value.abs() < 2e-3);
    assert!((sp[1].value - 1.5).abs() < 2e-3);
    assert!(overlap(&sp[0].vector, &g.sample(Phi4Kink::h_prime), &g) > 1.0 - 1e-8);
    assert!(overlap(&sp[1].vector, &g.sample(y1), &g) > 1.0 - 1e-8);
}

#[test]
fn dual_operator_has_no_zero_mode() {
    let g = Grid::new(-30.0, 30.0, 4001).unwrap();
    let sp = discrete_spectrum(&SchrodingerOperator::Phi4Dual, &g).unwrap();
    assert_eq!(sp.len(), 1);
    assert!((sp[0].value - 1.5).abs() < 2e-3);
    assert!(overlap(&sp[0].vector, &g.sample(|x| sech(x / SQ2)), &g) > 1.0 - 1e-8);
}

#[test]
fn sequential_and_parallel_spectra_agree() {
    let g = Grid::new(-30.0, 30.0, 4001).unwrap();
    let a = discrete_spectrum_with(&SchrodingerOperator::Phi4Kink, &g, Exec::Sequential).unwrap();
    let b = discrete_spectrum_with(&SchrodingerOperator::Phi4Kink, &g, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn spectrum_preconditions() {
    let small = Grid::symmetric(10.0, 0.02).unwrap();
    assert!(discrete_spectrum(&SchrodingerOperator::SineGordonKink, &small).is_err());
    let asym = Grid::new(-30.0, 31.0, 4001).unwrap();
    assert!(discrete_spectrum(&SchrodingerOperator::SineGordonKink, &asym).is_err());
}

#[test]
fn internal_mode_eigenvalue_converges_at_second_order() {
    let err = |n: usize| {
        let g = Grid::new(-40.0, 40.0, n).unwrap();
        let sp = discrete_spectrum(&SchrodingerOperator::Phi4Kink, &g).unwrap();
        (sp[1].value - 1.5).abs()
    };
    let (e1, e2, e3) = (err(2001), err(4001), err(8001));
    let p1 = (e1 / e2).log2();
    let p2 = (e2 / e3).log2();
    assert!((p1 - 2.0).abs() < 0.1 && (p2 - 2.0).abs() < 0.1, "orders {p1} {p2}");
}

#[test]
fn resonances_are_not_normalizable() {
    for f in [f64::tanh as fn(f64) -> f64, phi4_resonance] {
        let n = |l: f64| {
            let g = Grid::symmetric(l, 0.02).unwrap();
            quadrature(&g.sample(|x| f(x) * f(x)), &g).unwrap().sqrt()
        };
        let r = n(80.0) / n(40.0);
        assert!((r - SQ2).abs() < 0.05, "ratio {r}");
    }
}

#[test]
fn sine_gordon_lbt_solutions() {
    let g = Grid::standard();
    let zero = mode("Qprime");
    for t in [0.0, 0.9] {
        for (a, b) in [("L", "M"), ("L-alt", "M-alt")] {
            let (r1, r2) = lbt_residual_sg(&mode(a), &mode(b), t, &g).unwrap();
            assert!(max_abs(&r1) < 1e-8 && max_abs(&r2) < 1e-8, "{a},{b} at t={t}");
        }
        let (r1, r2) = lbt_residual_sg(&zero, &Null, t, &g).unwrap();
        assert!(max_abs(&r1) < 1e-8 && max_abs(&r2) < 1e-8);
    }
    // A wrong pairing does not solve the system.
    let (r1, _) = lbt_residual_sg(&mode("L"), &mode("M-alt"), 0.4, &g).unwrap();
    assert!(max_abs(&r1) > 0.1);
}

#[test]
fn phi4_lbt_solutions() {
    let g = Grid::standard();
    for t in [0.0, 0.7, 2.3] {
        let (r1, r2) = lbt_residual_phi4(&mode("Hprime"), &Null, t, &g).unwrap();
        assert!(max_abs(&r1) < 1e-8 && max_abs(&r2) < 1e-8);
        for (a, b) in [("Y1", "Y0"), ("Y1-alt", "Y0-alt"), ("L4", "M4"), ("L4-alt", "M4-alt")] {
            let (r1, r2) = lbt_residual_phi4(&mode(a), &mode(b), t, &g).unwrap();
            assert!(max_abs(&r1) < 1e-8 && max_abs(&r2) < 1e-8, "{a},{b} at t={t}");
        }
    }
}

struct Null;

impl Sampler for Null {
    fn eval(&self, _t: f64, _x: f64) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn label(&self) -> String {
        "zero".into()
    }
}

impl ComplexSampler for Null {
    fn eval_c(&self, _t: f64, _x: f64) -> ([f64; 2], [f64; 2]) {
        ([0.0; 2], [0.0; 2])
    }
}

#[test]
fn dual_lbt_with_matching_sign() {
    let g = Grid::standard();
    for t in [0.0, 0.6, 1.9] {
        for (n4, sign) in [("N4-plus", DualSign::Upper), ("N4-minus", DualSign::Lower)] {
            let (r1, r2) = lbt_residual_phi4_dual(&mode("M4-complex"), &mode(n4), sign, t, &g).unwrap();
            assert!(r1.max_abs() < 1e-8 && r2.max_abs() < 1e-8, "{n4} t={t}");
        }
        let (r1, r2) = lbt_residual_phi4_dual(&Null, &Null, DualSign::Upper, t, &g).unwrap();
        assert_eq!(r1.max_abs() + r2.max_abs(), 0.0);
    }
}

#[test]
fn dual_lbt_with_mismatched_sign_fixture() {
    let g = Grid::standard();
    // The mismatch leaves 2λ₀ψ̃ and 2λ₀φ̃: |r₁| = √6 k, |r₂| = √6 |H|.
    let hmax = Phi4Kink::h(40.0);
    let s6 = 6f64.sqrt();
    for (n4, sign, k) in [("N4-plus", DualSign::Lower, 2.0 + 3f64.sqrt()), ("N4-minus", DualSign::Upper, 2.0 - 3f64.sqrt())] {
        let (r1, r2) = lbt_residual_phi4_dual(&mode("M4-complex"), &mode(n4), sign, 0.3, &g).unwrap();
        assert!((r1.max_abs() - s6 * k).abs() < 1e-8, "{n4}: {}", r1.max_abs());
        assert!((r2.max_abs() - s6 * hmax).abs() < 1e-8, "{n4}: {}", r2.max_abs());
    }
    let (r1, _) = lbt_residual_phi4_dual(&mode("M4-complex"), &mode("N4-minus"), DualSign::Upper, 0.0, &g).unwrap();
    assert!((r1.max_abs() - 0.656_339_1).abs() < 1e-6, "{}", r1.max_abs());
}

#[test]
fn wave_residuals_of_modes() {
    let g = Grid::standard();
    let dt = 1e-3;
    let cases: [(&str, SchrodingerOperator); 6] = [
        ("L", SchrodingerOperator::SineGordonKink),
        ("Qprime", SchrodingerOperator::SineGordonKink),
        ("M", SchrodingerOperator::Flat { mass_sq: 1.0 }),
        ("Y1", SchrodingerOperator::Phi4Kink),
        ("M4", SchrodingerOperator::Phi4Dual),
        ("N4-plus", SchrodingerOperator::Flat { mass_sq: 2.0 }),
    ];
    for (name, op) in cases {
        for t in [0.0, 1.3] {
            let r = wave_residual(&mode(name), &op, t, &g, dt).unwrap();
            assert!(max_abs(&r) < 1e-3, "{name} t={t}: {}", max_abs(&r));
        }
    }
    assert!(wave_residual(&mode("L"), &SchrodingerOperator::SineGordonKink, 0.0, &g, 0.0).is_err());
}

#[test]
fn wave_residuals_with_sixth_order_stencil() {
    let g = Grid::standard();
    let cases: [(&str, SchrodingerOperator); 8] = [
        ("L", SchrodingerOperator::SineGordonKink),
        ("M", SchrodingerOperator::Flat { mass_sq: 1.0 }),
        ("Y1", SchrodingerOperator::Phi4Kink),
        ("M4", SchrodingerOperator::Phi4Dual),
        ("M4-alt", SchrodingerOperator::Phi4Dual),
        ("M4-complex", SchrodingerOperator::Phi4Dual),
        ("N4-plus", SchrodingerOperator::Flat { mass_sq: 2.0 }),
        ("N4-minus", SchrodingerOperator::Flat { mass_sq: 2.0 }),
    ];
    for (name, op) in cases {
        for t in [0.0, 1.3, 5.0] {
            let r = wave_residual_with(&mode(name), &op, t, &g, 2e-4, DiffOrder::Sixth).unwrap();
            assert!(max_abs(&r) < 5e-6, "{name} t={t}: {}", max_abs(&r));
        }
    }
}

/// `Σ cᵢ mᵢ + ε·bump(x)·cos t` on the first component.
struct Combo {
    parts: Vec<(f64, LinearMode)>,
    eps: f64,
    center: f64,
    width: f64,
}

impl Sampler for Combo {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        let z = (x - self.center) / self.width;
        let b = if z.abs() < 1.0 { (1.0 - z * z).powi(4) } else { 0.0 };
        let mut out = (self.eps * b * t.cos(), -self.eps * b * t.sin());
        for (c, m) in &self.parts {
            let (a, at) = m.eval(t, x);
            out.0 += c * a;
            out.1 += c * at;
        }
        out
    }
    fn label(&self) -> String {
        "combo".into()
    }
}

#[test]
fn lbt_controls_the_second_order_residual() {
    let g = Grid::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let eps = 10f64.powf(rng.gen_range(-6.0..-2.0));
        let phi = Combo {
            parts: vec![(c[0], mode("Qprime")), (c[1], mode("L")), (c[2], mode("L-alt"))],
            eps,
            center: rng.gen_range(-3.0..3.0),
            width: rng.gen_range(2.0..5.0),
        };
        let psi = Combo { parts: vec![(c[1], mode("M")), (c[2], mode("M-alt"))], eps: 0.0, center: 0.0, width: 1.0 };
        let t = rng.gen_range(0.0..3.0);
        let (r1, r2) = lbt_residual_sg(&phi, &psi, t, &g).unwrap();
        let lbt = max_abs(&r1).max(max_abs(&r2));
        let wave = max_abs(&wave_residual(&phi, &SchrodingerOperator::SineGordonKink, t, &g, 1e-3).unwrap());
        assert!(lbt > 0.0);
        worst = worst.max((wave - 1e-3).max(0.0) / lbt);
    }
    assert!(worst < 20.0, "constant {worst}");
}
