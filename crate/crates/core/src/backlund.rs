//! Bäcklund functionals, lifting/descent maps and the manifold constructor.
//!
//! All maps solve the same pair of functionals around a background pair
//! (kink side `K̃`, zero side `Z`) with parameter `a`:
//!
//! ```text
//! F₁ = K̃_x + ũ_x − (Z_t + v) − (1/a) cos((K̃+ũ+Z+y)/2) − a cos((K̃+ũ−Z−y)/2)
//! F₂ = K̃_t + s̃ − (Z_x + y_x) − (1/a) cos((K̃+ũ+Z+y)/2) + a cos((K̃+ũ−Z−y)/2)
//! ```
//!
//! with `(K̃, Z) = (Q̃, 0)` around the kink and `(W̃_β, B_β)`, `a = 1` around
//! the wobbler. A lift solves `F₁ = 0` for `ũ` and reads `s̃` off `F₂ = 0`; a
//! descent solves `F₂ = 0` for `y` and reads `v` off `F₁ = 0`.
//!
//! The scalar ODE for the unknown is written as `u_x + c(x)u = F(x, u)` where
//! `c` is the linearisation at the background, and iterated as
//! `u ← L_c⁻¹ F(u)` (Newton with the Jacobian frozen at the background). Each
//! linear solve is a sweep with the integrating factor `e^{Λ}`, `Λ' = c`,
//! along directions in which the kernel `e^{−(Λ(x)−Λ(s))}` stays ≤ 1:
//! outward from the centre for lifts, inward from both ends for descents.
//! Cell integrals use four-point (cubic) weights, so the discrete solution is
//! fourth-order accurate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{breather, wobbler, KinkProfile, Sampler, WobblerParams};
use crate::field::{
    derivative_with, max_abs, max_abs_diff, parity_check, quadrature, DiffOrder, FieldState, Grid, Parity,
    ParityTag, PerturbationPair,
};

/// Bäcklund parameter `a`; `β = (a² − 1)/(a² + 1)`, `δ = a − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BtParameter {
    pub a: f64,
}

impl BtParameter {
    pub fn new(a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Parameter(format!("Backlund parameter must be finite and nonzero, got {a}")));
        }
        Ok(BtParameter { a })
    }

    /// `a(β) = ((1 + β)/(1 − β))^{1/2}`.
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(beta.abs() < 1.0) {
            return Err(Error::Parameter(format!("need |beta| < 1, got {beta}")));
        }
        Self::new(((1.0 + beta) / (1.0 - beta)).sqrt())
    }

    pub fn from_delta(delta: f64) -> Result<Self> {
        Self::new(1.0 + delta)
    }

    pub fn beta(&self) -> f64 {
        let a2 = self.a * self.a;
        (a2 - 1.0) / (a2 + 1.0)
    }

    pub fn delta(&self) -> f64 {
        self.a - 1.0
    }

    /// `½(1/a + a)`.
    pub fn nu(&self) -> f64 {
        0.5 * (1.0 / self.a + self.a)
    }
}

/// Solver controls. Defaults: residual tolerance 1e−11, 50 iterations,
/// parity tolerance 1e−9.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub parity_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-11, max_iter: 50, parity_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub result: PerturbationPair,
    pub iterations: usize,
    /// `‖u − L_c⁻¹F(u)‖_∞` at the returned point.
    pub final_residual: f64,
    /// Exponent of the integrating factor (`ν₀`, or `ν₀/γ` for moving kinks);
    /// 1 for the wobbler maps.
    pub nu0: f64,
    pub history: Vec<f64>,
    /// Max of `|F₁|, |F₂|` with sixth-order derivatives.
    pub bt_defect: f64,
    /// Descents: `|∫μf|` with `μ(0) = 1`, and the mismatch of the two inward
    /// sweeps at the centre.
    pub compatibility: Option<(f64, f64)>,
    /// Orthogonal lift: value of the orthogonality integral.
    pub orthogonality: Option<f64>,
}

/// Per-node background data for the unified functionals.
#[derive(Debug, Clone)]
pub struct Background {
    pub grid: Grid,
    pub a: f64,
    pub k: Vec<f64>,
    pub k_x: Vec<f64>,
    pub k_t: Vec<f64>,
    pub z: Vec<f64>,
    pub z_x: Vec<f64>,
    pub z_t: Vec<f64>,
    /// Linearisation coefficient of the lift equation.
    pub c: Vec<f64>,
    /// `Λ` with `Λ' = c`.
    pub lambda: Vec<f64>,
    /// Node used as the outward anchor.
    pub center: usize,
    pub nu0: f64,
}

/// `log cosh z` without overflow.
fn log_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl Background {
    /// Kink profile `Q(·; β, x₀)` against the zero solution.
    pub fn kink(grid: &Grid, profile: &KinkProfile, a: BtParameter) -> Self {
        let n = grid.n;
        let nu = a.nu();
        let g = profile.gamma;
        let mut bg = Background {
            grid: *grid,
            a: a.a,
            k: grid.sample(|x| profile.q_tilde(x)),
            k_x: grid.sample(|x| profile.q_x(x)),
            k_t: grid.sample(|x| profile.q_t(x)),
            z: vec![0.0; n],
            z_x: vec![0.0; n],
            z_t: vec![0.0; n],
            c: grid.sample(|x| nu * profile.sin_half_tilde(x)),
            lambda: grid.sample(|x| nu / g * log_cosh(g * (x - profile.x0))),
            center: grid.index_of(profile.x0),
            nu0: nu / g,
        };
        bg.center = bg.center.min(n - 1);
        bg
    }

    /// Wobbler `W_β` against the breather `B_β` at time `t`, `a = 1`.
    pub fn wobbler(grid: &Grid, beta: f64, t: f64) -> Result<Self> {
        let w = wobbler(WobblerParams { beta })?;
        let b = breather(beta)?;
        let n = grid.n;
        let pi = std::f64::consts::PI;
        let mut bg = Background {
            grid: *grid,
            a: 1.0,
            k: grid.sample(|x| w.value(t, x) - pi),
            k_x: grid.sample(|x| w.dx(t, x)),
            k_t: grid.sample(|x| w.time_derivative(t, x)),
            z: grid.sample(|x| b.value(t, x)),
            z_x: grid.sample(|x| b.dx(t, x)),
            z_t: grid.sample(|x| b.time_derivative(t, x)),
            c: vec![0.0; n],
            lambda: vec![0.0; n],
            center: grid.center()?,
            nu0: 1.0,
        };
        for i in 0..n {
            bg.c[i] = (0.5 * bg.k[i]).sin() * (0.5 * bg.z[i]).cos();
        }
        bg.lambda = cumulative_from(&bg.c, grid.h(), bg.center);
        Ok(bg)
    }

    fn cos_pm(&self, i: usize, u: f64, y: f64) -> (f64, f64) {
        let base = self.k[i] + u;
        let zz = self.z[i] + y;
        ((0.5 * (base + zz)).cos(), (0.5 * (base - zz)).cos())
    }

    fn sin_pm(&self, i: usize, u: f64, y: f64) -> (f64, f64) {
        let base = self.k[i] + u;
        let zz = self.z[i] + y;
        ((0.5 * (base + zz)).sin(), (0.5 * (base - zz)).sin())
    }

    /// Right side of `ũ_x = G` from `F₁ = 0`.
    fn lift_rhs(&self, i: usize, u: f64, y: f64, v: f64) -> f64 {
        let (cp, cm) = self.cos_pm(i, u, y);
        self.z_t[i] + v - self.k_x[i] + cp / self.a + self.a * cm
    }

    /// `s̃` from `F₂ = 0`.
    fn lift_s(&self, i: usize, u: f64, y: f64, y_x: f64) -> f64 {
        let (cp, cm) = self.cos_pm(i, u, y);
        self.z_x[i] + y_x - self.k_t[i] + cp / self.a - self.a * cm
    }

    /// Right side of `y_x = G` from `F₂ = 0`.
    fn descend_rhs(&self, i: usize, u: f64, s: f64, y: f64) -> f64 {
        let (cp, cm) = self.cos_pm(i, u, y);
        self.k_t[i] + s - self.z_x[i] - cp / self.a + self.a * cm
    }

    /// `v` from `F₁ = 0`.
    fn descend_v(&self, i: usize, u: f64, u_x: f64, y: f64) -> f64 {
        let (cp, cm) = self.cos_pm(i, u, y);
        self.k_x[i] + u_x - self.z_t[i] - cp / self.a - self.a * cm
    }

    /// `∂s̃/∂ũ` at fixed `y`.
    fn lift_s_du(&self, i: usize, u: f64, y: f64) -> f64 {
        let (sp, sm) = self.sin_pm(i, u, y);
        -0.5 * sp / self.a + 0.5 * self.a * sm
    }

    /// `(F₁, F₂)` at the given perturbations, sixth-order derivatives.
    pub fn functionals(&self, us: &PerturbationPair, yv: &PerturbationPair) -> Result<(Vec<f64>, Vec<f64>)> {
        let g = &self.grid;
        if !us.grid.same_as(g) || !yv.grid.same_as(g) {
            return Err(Error::GridMismatch);
        }
        let ux = derivative_with(&us.first, g, DiffOrder::Sixth)?;
        let yx = derivative_with(&yv.first, g, DiffOrder::Sixth)?;
        let mut f1 = vec![0.0; g.n];
        let mut f2 = vec![0.0; g.n];
        for i in 0..g.n {
            let (cp, cm) = self.cos_pm(i, us.first[i], yv.first[i]);
            f1[i] = self.k_x[i] + ux[i] - (self.z_t[i] + yv.second[i]) - cp / self.a - self.a * cm;
            f2[i] = self.k_t[i] + us.second[i] - (self.z_x[i] + yx[i]) - cp / self.a + self.a * cm;
        }
        Ok((f1, f2))
    }
}

const W_FIRST: [f64; 4] = [9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0];
const W_MID: [f64; 4] = [-1.0 / 24.0, 13.0 / 24.0, 13.0 / 24.0, -1.0 / 24.0];
const W_LAST: [f64; 4] = [1.0 / 24.0, -5.0 / 24.0, 19.0 / 24.0, 9.0 / 24.0];

fn cell(k: usize, m: usize) -> (usize, &'static [f64; 4]) {
    if k == 0 {
        (0, &W_FIRST)
    } else if k + 1 == m {
        (m - 3, &W_LAST)
    } else {
        (k - 1, &W_MID)
    }
}

fn path(from: usize, to: usize) -> Vec<usize> {
    if from <= to {
        (from..=to).collect()
    } else {
        (to..=from).rev().collect()
    }
}

/// Cumulative fourth-order integral of `c` outward from `center`.
fn cumulative_from(c: &[f64], h: f64, center: usize) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    for (p, step) in [(path(center, n - 1), h), (path(center, 0), -h)] {
        let m = p.len() - 1;
        if m < 3 {
            continue;
        }
        let mut acc = 0.0;
        for k in 0..m {
            let (base, w) = cell(k, m);
            let s: f64 = w.iter().enumerate().map(|(q, wq)| wq * c[p[base + q]]).sum();
            acc += step * s;
            out[p[k + 1]] = acc;
        }
    }
    out
}

/// Solves `u_x + c u = f` along `p` with `u(p[0]) = u0`.
fn sweep(p: &[usize], lambda: &[f64], f: &[f64], step: f64, u0: f64, out: &mut [f64]) {
    let m = p.len() - 1;
    out[p[0]] = u0;
    if m == 0 {
        return;
    }
    let mut u = u0;
    for k in 0..m {
        let l1 = lambda[p[k + 1]];
        let acc: f64 = if m >= 3 {
            let (base, w) = cell(k, m);
            w.iter().enumerate().map(|(q, wq)| wq * (lambda[p[base + q]] - l1).exp() * f[p[base + q]]).sum()
        } else {
            0.5 * ((lambda[p[k]] - l1).exp() * f[p[k]] + f[p[k + 1]])
        };
        u = (lambda[p[k]] - l1).exp() * u + step * acc;
        out[p[k + 1]] = u;
    }
}

fn check_symmetric(grid: &Grid) -> Result<usize> {
    grid.center()
}

fn require_parity(values: &[f64], grid: &Grid, kind: Parity, what: &str, tol: f64) -> Result<()> {
    let d = parity_check(values, grid, kind)?;
    let scale = max_abs(values).max(1.0);
    if d > tol * scale {
        return Err(Error::Parity { what: what.to_string(), defect: d, tol: tol * scale });
    }
    Ok(())
}

fn fixed_point<F>(u0: Vec<f64>, opts: &SolverOptions, mut map: F) -> Result<(Vec<f64>, usize, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let mut u = u0;
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        let next = map(&u);
        let r = max_abs_diff(&u, &next);
        history.push(r);
        if !r.is_finite() || r > 1e6 {
            return Err(Error::NoConvergence { iterations: it, residual: r, history });
        }
        u = next;
        if r <= opts.tol {
            let check = map(&u);
            let fin = max_abs_diff(&u, &check);
            return Ok((u, it, fin, history));
        }
    }
    let r = *history.last().unwrap_or(&f64::NAN);
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: r, history })
}

/// Lift around `bg`: solve `F₁ = 0` for `ũ` (outward from the anchor with
/// `ũ(anchor) = anchor_value(...)`), then `s̃` from `F₂ = 0`.
fn lift_core(bg: &Background, yv: &PerturbationPair, opts: &SolverOptions) -> Result<(Vec<f64>, Vec<f64>, usize, f64, Vec<f64>)> {
    let g = &bg.grid;
    let n = g.n;
    let h = g.h();
    let y = &yv.first;
    let v = &yv.second;
    let right = path(bg.center, n - 1);
    let left = path(bg.center, 0);
    let (u, iters, res, hist) = fixed_point(vec![0.0; n], opts, |u| {
        let f: Vec<f64> = (0..n).map(|i| bg.lift_rhs(i, u[i], y[i], v[i]) + bg.c[i] * u[i]).collect();
        let mut out = vec![0.0; n];
        sweep(&right, &bg.lambda, &f, h, 0.0, &mut out);
        sweep(&left, &bg.lambda, &f, -h, 0.0, &mut out);
        out
    })?;
    let yx = derivative_with(y, g, DiffOrder::Sixth)?;
    let s: Vec<f64> = (0..n).map(|i| bg.lift_s(i, u[i], y[i], yx[i])).collect();
    Ok((u, s, iters, res, hist))
}

/// Descent around `bg`: solve `F₂ = 0` for `y` inward from both ends, then
/// `v` from `F₁ = 0`. Returns also `(|∫μf|, centre mismatch)`.
#[allow(clippy::type_complexity)]
fn descend_core(
    bg: &Background,
    us: &PerturbationPair,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, Vec<f64>, usize, f64, Vec<f64>, (f64, f64))> {
    let g = &bg.grid;
    let n = g.n;
    let h = g.h();
    let center = check_symmetric(g)?;
    let u = &us.first;
    let s = &us.second;
    // Descent coefficient is −c: Λ_d = −Λ.
    let lam: Vec<f64> = bg.lambda.iter().map(|l| -l).collect();
    let cd: Vec<f64> = bg.c.iter().map(|c| -c).collect();
    let left = path(0, center);
    let right = path(n - 1, center);
    let mut mismatch = 0.0;
    let (y, iters, res, hist) = fixed_point(vec![0.0; n], opts, |y| {
        let f: Vec<f64> = (0..n).map(|i| bg.descend_rhs(i, u[i], s[i], y[i]) + cd[i] * y[i]).collect();
        let mut out = vec![0.0; n];
        sweep(&left, &lam, &f, h, 0.0, &mut out);
        let from_left = out[center];
        sweep(&right, &lam, &f, -h, 0.0, &mut out);
        mismatch = (from_left - out[center]).abs();
        out[center] = 0.5 * (from_left + out[center]);
        out
    })?;
    // Compatibility ∫μf with μ = e^{−Λ_d} normalised to 1 at the centre.
    let f: Vec<f64> = (0..n).map(|i| bg.descend_rhs(i, u[i], s[i], y[i]) + cd[i] * y[i]).collect();
    let mu: Vec<f64> = lam.iter().map(|l| (l - lam[center]).exp()).collect();
    let compat = quadrature(&(0..n).map(|i| mu[i] * f[i]).collect::<Vec<_>>(), g)?.abs();
    let ux = derivative_with(u, g, DiffOrder::Sixth)?;
    let v: Vec<f64> = (0..n).map(|i| bg.descend_v(i, u[i], ux[i], y[i])).collect();
    Ok((y, v, iters, res, hist, (compat, mismatch)))
}

fn defect(bg: &Background, us: &PerturbationPair, yv: &PerturbationPair) -> Result<f64> {
    let (f1, f2) = bg.functionals(us, yv)?;
    Ok(max_abs(&f1).max(max_abs(&f2)))
}

/// `(F₁, F₂)` of the plain Bäcklund transformation between `phi` (zero side)
/// and `psi` (kink side), sixth-order spatial derivatives.
pub fn bt_residual(phi: &FieldState, psi: &FieldState, a: BtParameter) -> Result<(Vec<f64>, Vec<f64>)> {
    if !phi.grid.same_as(&psi.grid) {
        return Err(Error::GridMismatch);
    }
    let g = &phi.grid;
    let px = derivative_with(&psi.u, g, DiffOrder::Sixth)?;
    let fx = derivative_with(&phi.u, g, DiffOrder::Sixth)?;
    let a = a.a;
    let mut f1 = vec![0.0; g.n];
    let mut f2 = vec![0.0; g.n];
    for i in 0..g.n {
        let sp = (0.5 * (psi.u[i] + phi.u[i])).sin();
        let sm = (0.5 * (psi.u[i] - phi.u[i])).sin();
        f1[i] = px[i] - phi.v[i] - sp / a - a * sm;
        f2[i] = psi.v[i] - fx[i] - sp / a + a * sm;
    }
    Ok((f1, f2))
}

/// Kink-centred functionals `(F̃₁, F̃₂)` around `Q(·; β, x₀)` with
/// parameter `1 + δ`.
pub fn tilde_residual(
    us: &PerturbationPair,
    yv: &PerturbationPair,
    delta: f64,
    profile: &KinkProfile,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let a = BtParameter::from_delta(delta)?;
    Background::kink(&us.grid, profile, a).functionals(us, yv)
}

/// Functionals around the wobbler/breather pair at time `t`.
pub fn wobbler_residual(us: &PerturbationPair, yv: &PerturbationPair, beta: f64, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    Background::wobbler(&us.grid, beta, t)?.functionals(us, yv)
}

fn static_profile() -> KinkProfile {
    KinkProfile { beta: 0.0, gamma: 1.0, x0: 0.0 }
}

fn norm_guard(yv: &PerturbationPair, limit: f64) -> Result<()> {
    let nrm = crate::field::energy_norm(yv)?;
    if nrm >= limit {
        return Err(Error::Parameter(format!("input norm {nrm} exceeds the small-data guard {limit}")));
    }
    Ok(())
}

/// The map `Φ(y₀, v₀, δ)`: `(odd, even)` data near zero ↦ `(odd, even)`
/// perturbation of the static kink solving `F̃₁ = F̃₂ = 0` with parameter
/// `1 + δ`.
pub fn construct_manifold_data(yv: &PerturbationPair, delta: f64, opts: &SolverOptions) -> Result<LiftReport> {
    let g = &yv.grid;
    check_symmetric(g)?;
    let a = BtParameter::from_delta(delta)?;
    if !(a.a > 0.0) {
        return Err(Error::Parameter(format!("need 1 + delta > 0, got {delta}")));
    }
    require_parity(&yv.first, g, Parity::Odd, "y0", opts.parity_tol)?;
    require_parity(&yv.second, g, Parity::Even, "v0", opts.parity_tol)?;
    norm_guard(yv, 0.5)?;
    let bg = Background::kink(g, &static_profile(), a);
    let (u, s, iterations, final_residual, history) = lift_core(&bg, yv, opts)?;
    let result = PerturbationPair::new(*g, u, s, ParityTag::OddEven, opts.parity_tol)?;
    let bt_defect = defect(&bg, &result, yv)?;
    Ok(LiftReport {
        result,
        iterations,
        final_residual,
        nu0: bg.nu0,
        history,
        bt_defect,
        compatibility: None,
        orthogonality: None,
    })
}

/// Lift `(even, even)` data near zero to the `(odd, odd)` perturbation of the
/// static kink (parameter `a = 1`).
pub fn lift_zero_to_kink(yv: &PerturbationPair, opts: &SolverOptions) -> Result<LiftReport> {
    let g = &yv.grid;
    check_symmetric(g)?;
    require_parity(&yv.first, g, Parity::Even, "y", opts.parity_tol)?;
    require_parity(&yv.second, g, Parity::Even, "v", opts.parity_tol)?;
    let bg = Background::kink(g, &static_profile(), BtParameter { a: 1.0 });
    let (u, s, iterations, final_residual, history) = lift_core(&bg, yv, opts)?;
    let result = PerturbationPair::new(*g, u, s, ParityTag::OddOdd, opts.parity_tol)?;
    let bt_defect = defect(&bg, &result, yv)?;
    Ok(LiftReport { result, iterations, final_residual, nu0: 1.0, history, bt_defect, compatibility: None, orthogonality: None })
}

/// Descend an `(odd, odd)` perturbation of the static kink to `(even, even)`
/// data near zero.
pub fn descend_kink_to_zero(us: &PerturbationPair, opts: &SolverOptions) -> Result<LiftReport> {
    let g = &us.grid;
    check_symmetric(g)?;
    require_parity(&us.first, g, Parity::Odd, "u", opts.parity_tol)?;
    require_parity(&us.second, g, Parity::Odd, "s", opts.parity_tol)?;
    let bg = Background::kink(g, &static_profile(), BtParameter { a: 1.0 });
    let (y, v, iterations, final_residual, history, compat) = descend_core(&bg, us, opts)?;
    let result = PerturbationPair::new(*g, y, v, ParityTag::EvenEven, opts.parity_tol)?;
    let bt_defect = defect(&bg, us, &result)?;
    Ok(LiftReport { result, iterations, final_residual, nu0: 1.0, history, bt_defect, compatibility: Some(compat), orthogonality: None })
}

/// Lift `(even, even)` data around the breather `B_β(t)` to the `(odd, odd)`
/// perturbation around the wobbler `W_β(t)`.
pub fn lift_breather_to_wobbler(yv: &PerturbationPair, beta: f64, t: f64, opts: &SolverOptions) -> Result<LiftReport> {
    let g = &yv.grid;
    check_symmetric(g)?;
    require_parity(&yv.first, g, Parity::Even, "y", opts.parity_tol)?;
    require_parity(&yv.second, g, Parity::Even, "v", opts.parity_tol)?;
    let bg = Background::wobbler(g, beta, t)?;
    let (u, s, iterations, final_residual, history) = lift_core(&bg, yv, opts)?;
    let result = PerturbationPair::new(*g, u, s, ParityTag::OddOdd, opts.parity_tol)?;
    let bt_defect = defect(&bg, &result, yv)?;
    Ok(LiftReport { result, iterations, final_residual, nu0: 1.0, history, bt_defect, compatibility: None, orthogonality: None })
}

/// Descend an `(odd, odd)` perturbation of the wobbler to `(even, even)` data
/// around the breather. Fails if the parity compatibility `∫μf = 0` is not
/// met to 1e−10.
pub fn descend_wobbler_to_breather(us: &PerturbationPair, beta: f64, t: f64, opts: &SolverOptions) -> Result<LiftReport> {
    let g = &us.grid;
    check_symmetric(g)?;
    require_parity(&us.first, g, Parity::Odd, "u", opts.parity_tol)?;
    require_parity(&us.second, g, Parity::Odd, "s", opts.parity_tol)?;
    let bg = Background::wobbler(g, beta, t)?;
    let (y, v, iterations, final_residual, history, compat) = descend_core(&bg, us, opts)?;
    if compat.0 > 1e-10 {
        return Err(Error::Contract(format!("compatibility integral {:e} exceeds 1e-10", compat.0)));
    }
    let result = PerturbationPair::new(*g, y, v, ParityTag::EvenEven, opts.parity_tol)?;
    let bt_defect = defect(&bg, us, &result)?;
    Ok(LiftReport { result, iterations, final_residual, nu0: 1.0, history, bt_defect, compatibility: Some(compat), orthogonality: None })
}

/// Lift `(y, v)` to `(û, ŝ)` around `Q(·; β, βt + ρ)` with parameter
/// `1 + δ`, with the free constant along `cosh^{−ν₀}` fixed by
/// `∫ û Q̃_x + ŝ Q̃_{t,x} = 0`.
pub fn lift_with_orthogonality(
    yv: &PerturbationPair,
    delta: f64,
    beta: f64,
    rho: f64,
    t: f64,
    opts: &SolverOptions,
) -> Result<LiftReport> {
    let g = &yv.grid;
    let a = BtParameter::from_delta(delta)?;
    if !(a.a > 0.0) {
        return Err(Error::Parameter(format!("need 1 + delta > 0, got {delta}")));
    }
    let profile = KinkProfile::centered(beta, beta * t + rho)?;
    let bg = Background::kink(g, &profile, a);
    let n = g.n;
    let h = g.h();
    let y = &yv.first;
    let v = &yv.second;
    let yx = derivative_with(y, g, DiffOrder::Sixth)?;
    let qx = bg.k_x.clone();
    let qtx = g.sample(|x| profile.q_tx(x));
    let norm = quadrature(&(0..n).map(|i| qx[i] * qx[i] + qtx[i] * qtx[i]).collect::<Vec<_>>(), g)?;
    if !(norm > 1e-8) {
        return Err(Error::Contract(format!("orthogonality normalisation {norm:e} too small")));
    }
    let homog: Vec<f64> = bg.lambda.iter().map(|l| (bg.lambda[bg.center] - l).exp()).collect();
    let ortho = |u: &[f64]| -> Result<f64> {
        let d: Vec<f64> = (0..n).map(|i| u[i] * qx[i] + bg.lift_s(i, u[i], y[i], yx[i]) * qtx[i]).collect();
        quadrature(&d, g)
    };
    let right = path(bg.center, n - 1);
    let left = path(bg.center, 0);
    let mut k_const = 0.0;
    let mut err: Option<Error> = None;
    let (u, iterations, final_residual, history) = fixed_point(vec![0.0; n], opts, |u| {
        let f: Vec<f64> = (0..n).map(|i| bg.lift_rhs(i, u[i], y[i], v[i]) + bg.c[i] * u[i]).collect();
        let mut p = vec![0.0; n];
        sweep(&right, &bg.lambda, &f, h, 0.0, &mut p);
        sweep(&left, &bg.lambda, &f, -h, 0.0, &mut p);
        // Scalar Newton for the constant along the homogeneous solution.
        for _ in 0..30 {
            let w: Vec<f64> = (0..n).map(|i| p[i] + k_const * homog[i]).collect();
            let val = match ortho(&w) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    break;
                }
            };
            let dd: Vec<f64> = (0..n).map(|i| homog[i] * (qx[i] + bg.lift_s_du(i, w[i], y[i]) * qtx[i])).collect();
            let slope = quadrature(&dd, g).unwrap_or(f64::NAN);
            let step = val / slope;
            k_const -= step;
            if step.abs() <= 1e-15 * (1.0 + k_const.abs()) {
                break;
            }
        }
        (0..n).map(|i| p[i] + k_const * homog[i]).collect()
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let s: Vec<f64> = (0..n).map(|i| bg.lift_s(i, u[i], y[i], yx[i])).collect();
    let orth = ortho(&u)?;
    let result = PerturbationPair { grid: *g, first: u, second: s, tag: ParityTag::None };
    let bt_defect = defect(&bg, &result, yv)?;
    Ok(LiftReport {
        result,
        iterations,
        final_residual,
        nu0: bg.nu0,
        history,
        bt_defect,
        compatibility: None,
        orthogonality: Some(orth),
    })
}

/// `β₁` solving `−4β/√(1−β²) = P`: `β₁ = −P/√(P² + 16)`.
pub fn final_speed_from_momentum(p: f64) -> f64 {
    -p / (p * p + 16.0).sqrt()
}

/// `β₂` with `a(β₂) = 1 + δ`.
pub fn final_speed_from_delta(delta: f64) -> Result<f64> {
    let a = 1.0 + delta;
    if !(a > 0.0) {
        return Err(Error::Parameter(format!("need 1 + delta > 0, got {delta}")));
    }
    Ok((a * a - 1.0) / (a * a + 1.0))
}
