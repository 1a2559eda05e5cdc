//! Kick-drift-kick leapfrog for `φ_tt = φ_xx − N(φ)`.
//!
//! Topological data is evolved as a perturbation `u = φ − K` of a kink
//! profile `K` (static or translated at fixed speed), with
//! `u_tt = Δu − (N(K + u) − N(K))` and `u = 0` at both ends. For the
//! sine-Gordon model the bracket is evaluated as
//! `sin K (cos u − 1) + cos K sin u`. The discrete residual of `K` itself is
//! dropped, so a static kink stays exactly static.

use serde::{Deserialize, Serialize};

use crate::conserved::{energy, momentum};
use crate::error::{Error, Result};
use crate::exact::{KinkProfile, Sampler};
use crate::field::{
    local_energy_norm, weighted_norm_sq, FieldState, Grid, Model, ParityTag, PerturbationPair, WeightSpec,
};
use crate::par::{self, Exec};

const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BackgroundKind {
    /// Full field; switches to the static-kink frame for kink data.
    None,
    StaticKink,
    /// Kink profile `Q(γ(x − βt + x₀))`, the convention of the kink sampler.
    MovingKink { beta: f64, x0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    pub background: BackgroundKind,
    /// Steps between stored snapshots (0: initial and final only).
    pub snapshot_every: usize,
    /// Steps between energy/momentum log entries (0: initial and final).
    pub log_every: usize,
    pub stencil: Stencil,
}

/// Spatial Laplacian. The fourth-order stencil closes at the ends by odd
/// reflection about the boundary value, which keeps the operator symmetric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    #[default]
    Second,
    Fourth,
}

impl Stencil {
    /// Largest accepted `dt / h`.
    pub fn courant(self) -> f64 {
        match self {
            Stencil::Second => 0.9,
            Stencil::Fourth => 0.8,
        }
    }
}

#[inline]
fn laplacian(stencil: Stencil, u: &[f64], i: usize, ih2: f64) -> f64 {
    let n = u.len();
    match stencil {
        Stencil::Second => (u[i - 1] - 2.0 * u[i] + u[i + 1]) * ih2,
        Stencil::Fourth => {
            let l2 = if i >= 2 { u[i - 2] } else { 2.0 * u[0] - u[1] };
            let r2 = if i + 2 < n { u[i + 2] } else { 2.0 * u[n - 1] - u[n - 2] };
            (-l2 + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - r2) * ih2 / 12.0
        }
    }
}

/// Discrete gradient energy whose gradient is `−h·Δu` at interior nodes.
fn gradient_energy(stencil: Stencil, u: &[f64], h: f64) -> f64 {
    let n = u.len();
    let near: f64 = u.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() * 0.5 / h;
    match stencil {
        Stencil::Second => near,
        Stencil::Fourth => {
            let wide: f64 = u.windows(3).map(|w| (w[2] - w[0]) * (w[2] - w[0])).sum::<f64>() * 0.125 / h;
            let ghost = 0.25 * ((u[1] - u[0]).powi(2) + (u[n - 1] - u[n - 2]).powi(2)) / h;
            (4.0 * near - wide - ghost) / 3.0
        }
    }
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            dt: 0.015,
            t_end: 1.0,
            background: BackgroundKind::None,
            snapshot_every: 0,
            log_every: 0,
            stencil: Stencil::Second,
        }
    }
}

impl EvolveConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        EvolveConfig { dt, t_end, ..Default::default() }
    }

    pub fn with_background(mut self, b: BackgroundKind) -> Self {
        self.background = b;
        self
    }

    pub fn with_stencil(mut self, s: Stencil) -> Self {
        self.stencil = s;
        self
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let limit = self.stencil.courant() * grid.h();
        if !(self.dt > 0.0) || self.dt > limit {
            return Err(Error::Cfl { dt: self.dt, limit });
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Parameter(format!("t_end must be finite and >= 0, got {}", self.t_end)));
        }
        if let BackgroundKind::MovingKink { beta, .. } = self.background {
            if !(beta.abs() < 1.0) {
                return Err(Error::Parameter(format!("moving background needs |beta| < 1, got {beta}")));
            }
        }
        Ok(())
    }

    /// Step count and the step that lands exactly on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }
}

/// Kink profile of the model, translated to `x₀ + βt`.
#[derive(Debug, Clone, Copy)]
struct Frame {
    model: Model,
    profile: Option<KinkProfile>,
}

impl Frame {
    /// `(K, K_t, sin-like, cos-like)` at one node. For SG the last two are
    /// `sin K, cos K`; for φ⁴ they are unused.
    fn eval(&self, t: f64, x: f64) -> (f64, f64, f64, f64) {
        let Some(p) = self.profile else {
            return (0.0, 0.0, 0.0, 1.0);
        };
        let z = x - p.beta * t;
        match self.model {
            Model::SineGordon => {
                let s = p.sin_half_tilde(z);
                let c = p.cos_half_tilde(z);
                // sin Q = −2 sin(Q̃/2)cos(Q̃/2), cos Q = 1 − 2cos²(Q̃/2).
                (p.q(z), p.q_t(z), -2.0 * s * c, 1.0 - 2.0 * c * c)
            }
            Model::Phi4 => {
                let g = p.gamma / std::f64::consts::SQRT_2;
                let th = (g * (z - p.x0)).tanh();
                let ht = -p.beta * g * (1.0 - th * th);
                (th, ht, 0.0, 0.0)
            }
        }
    }

    fn is_moving(&self) -> bool {
        self.profile.is_some_and(|p| p.beta != 0.0)
    }
}

/// Reduced nonlinearity `N(K + u) − N(K)`.
#[inline]
fn reduced_force(model: Model, k: f64, sk: f64, ck: f64, u: f64, framed: bool) -> f64 {
    if !framed {
        return model.nonlinearity(u);
    }
    match model {
        Model::SineGordon => sk * (u.cos() - 1.0) + ck * u.sin(),
        Model::Phi4 => -u + 3.0 * k * k * u + 3.0 * k * u * u + u * u * u,
    }
}

/// Reduced potential `V(K + u) − V(K) − N(K)u`.
#[inline]
fn reduced_potential(model: Model, k: f64, sk: f64, ck: f64, u: f64, framed: bool) -> f64 {
    if !framed {
        return model.potential(u);
    }
    match model {
        Model::SineGordon => {
            let hs = (0.5 * u).sin();
            2.0 * ck * hs * hs + sk * (u.sin() - u)
        }
        Model::Phi4 => {
            let u2 = u * u;
            0.5 * (3.0 * k * k - 1.0) * u2 + k * u2 * u + 0.25 * u2 * u2
        }
    }
}

/// Leapfrog state. Holds the perturbation in the frame and the cached force.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub grid: Grid,
    pub model: Model,
    pub exec: Exec,
    frame: Frame,
    framed: bool,
    stencil: Stencil,
    dt: f64,
    t: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    acc: Vec<f64>,
    k: Vec<f64>,
    sk: Vec<f64>,
    ck: Vec<f64>,
}

fn looks_topological(s: &FieldState, model: Model) -> bool {
    let (a, b) = (s.u[0], s.u[s.u.len() - 1]);
    match model {
        Model::SineGordon => a.abs() < 1e-6 && (b - TAU).abs() < 1e-6,
        Model::Phi4 => (a + 1.0).abs() < 1e-6 && (b - 1.0).abs() < 1e-6,
    }
}

impl Stepper {
    pub fn new(initial: &FieldState, model: Model, cfg: &EvolveConfig) -> Result<Self> {
        Self::with_exec(initial, model, cfg, Exec::default())
    }

    pub fn with_exec(initial: &FieldState, model: Model, cfg: &EvolveConfig, exec: Exec) -> Result<Self> {
        cfg.validate(&initial.grid)?;
        initial.check_finite()?;
        let grid = initial.grid;
        let profile = match cfg.background {
            BackgroundKind::None if looks_topological(initial, model) => Some(KinkProfile::centered(0.0, 0.0)?),
            BackgroundKind::None => None,
            BackgroundKind::StaticKink => Some(KinkProfile::centered(0.0, 0.0)?),
            BackgroundKind::MovingKink { beta, x0 } => Some(KinkProfile::centered(beta, -x0)?),
        };
        let frame = Frame { model, profile };
        let framed = profile.is_some();
        let n = grid.n;
        let mut st = Stepper {
            grid,
            model,
            exec,
            frame,
            framed,
            stencil: cfg.stencil,
            dt: cfg.steps().1,
            t: initial.t,
            u: initial.u.clone(),
            v: initial.v.clone(),
            acc: vec![0.0; n],
            k: vec![0.0; n],
            sk: vec![0.0; n],
            ck: vec![1.0; n],
        };
        st.refresh_frame();
        if framed {
            for i in 0..n {
                let (k, kt, _, _) = frame.eval(st.t, grid.x(i));
                st.u[i] -= k;
                st.v[i] -= kt;
            }
            st.u[0] = 0.0;
            st.u[n - 1] = 0.0;
        }
        st.v[0] = 0.0;
        st.v[n - 1] = 0.0;
        st.compute_force();
        Ok(st)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Whether the state is evolved as a perturbation of a kink.
    pub fn is_framed(&self) -> bool {
        self.framed
    }

    fn refresh_frame(&mut self) {
        if !self.framed {
            return;
        }
        let (f, t, g) = (self.frame, self.t, self.grid);
        let vals: Vec<(f64, f64, f64, f64)> = par::map_range(self.exec, g.n, |i| f.eval(t, g.x(i)));
        for (i, (k, _, s, c)) in vals.into_iter().enumerate() {
            self.k[i] = k;
            self.sk[i] = s;
            self.ck[i] = c;
        }
    }

    fn compute_force(&mut self) {
        let n = self.grid.n;
        let ih2 = 1.0 / (self.grid.h() * self.grid.h());
        let (u, k, sk, ck) = (&self.u, &self.k, &self.sk, &self.ck);
        let (model, framed, stencil) = (self.model, self.framed, self.stencil);
        par::fill(self.exec, &mut self.acc, |i| {
            if i == 0 || i == n - 1 {
                return 0.0;
            }
            laplacian(stencil, u, i, ih2) - reduced_force(model, k[i], sk[i], ck[i], u[i], framed)
        });
    }

    fn kdk(&mut self, dt: f64) -> Result<()> {
        let n = self.grid.n;
        let half = 0.5 * dt;
        for i in 1..n - 1 {
            self.v[i] += half * self.acc[i];
            self.u[i] += dt * self.v[i];
        }
        self.t += dt;
        if self.frame.is_moving() {
            self.refresh_frame();
        }
        self.compute_force();
        let mut finite = true;
        for i in 1..n - 1 {
            self.v[i] += half * self.acc[i];
            finite &= self.u[i].is_finite() && self.v[i].is_finite();
        }
        if !finite {
            return Err(Error::Blowup { t: self.t });
        }
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        self.kdk(self.dt)
    }

    /// Exact inverse of [`Stepper::step`] up to rounding.
    pub fn step_back(&mut self) -> Result<()> {
        self.kdk(-self.dt)
    }

    /// Full field `(φ, φ_t)`.
    pub fn state(&self) -> FieldState {
        let mut u = self.u.clone();
        let mut v = self.v.clone();
        if self.framed {
            for i in 0..self.grid.n {
                let (k, kt, _, _) = self.frame.eval(self.t, self.grid.x(i));
                u[i] += k;
                v[i] += kt;
            }
        }
        FieldState { t: self.t, grid: self.grid, u, v }
    }

    /// `(u, u_t)` relative to the frame (the full field when unframed).
    pub fn perturbation(&self) -> PerturbationPair {
        PerturbationPair { grid: self.grid, first: self.u.clone(), second: self.v.clone(), tag: ParityTag::None }
    }

    /// Modified energy conserved by the scheme to `O(dt⁴)` on static frames:
    /// `H + dt²(⟨v, (−Δ + N′)v⟩/12 − |Δu − N|²/24)`, with `H` the discrete
    /// energy of the evolved variable. Not meaningful on a moving frame.
    pub fn shadow_energy(&self) -> f64 {
        let n = self.grid.n;
        let h = self.grid.h();
        let ih2 = 1.0 / (h * h);
        let (model, framed, stencil) = (self.model, self.framed, self.stencil);
        let (u, v) = (&self.u, &self.v);
        let (k, sk, ck) = (&self.k, &self.sk, &self.ck);
        let terms: Vec<(f64, f64)> = par::map_range(self.exec, n, |i| {
            let base = 0.5 * v[i] * v[i] + reduced_potential(model, k[i], sk[i], ck[i], u[i], framed);
            let mut corr = 0.0;
            if i > 0 && i + 1 < n {
                let np = if framed { model.nonlinearity_prime(k[i] + u[i]) } else { model.nonlinearity_prime(u[i]) };
                let lv = laplacian(stencil, v, i, ih2);
                let f = laplacian(stencil, u, i, ih2) - reduced_force(model, k[i], sk[i], ck[i], u[i], framed);
                corr = v[i] * (-lv + np * v[i]) / 12.0 - f * f / 24.0;
            }
            (base, corr)
        });
        let (b, c) = terms.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        h * b + gradient_energy(stencil, u, h) + self.dt * self.dt * h * c
    }

    pub fn reverse_velocity(&mut self) {
        for v in &mut self.v {
            *v = -*v;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub t: f64,
    pub energy: f64,
    pub momentum: f64,
    /// Scheme-conserved energy; `None` on a moving frame.
    pub shadow: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub model: Model,
    pub dt: f64,
    pub snapshots: Vec<FieldState>,
    pub log: Vec<LogEntry>,
}

impl Trajectory {
    pub fn final_state(&self) -> &FieldState {
        self.snapshots.last().expect("trajectory holds the initial snapshot")
    }

    /// `max |E(t) − E(0)| / |E(0)|` with the scheme-conserved energy when
    /// available, the physical energy otherwise.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.log[0].energy.abs().max(f64::MIN_POSITIVE);
        match self.log[0].shadow {
            Some(s0) => self.log.iter().map(|l| (l.shadow.unwrap_or(s0) - s0).abs()).fold(0.0, f64::max) / e0,
            None => self.physical_drift(),
        }
    }

    /// Same with the quadrature energy of the reconstructed field.
    pub fn physical_drift(&self) -> f64 {
        let e0 = self.log[0].energy;
        self.log.iter().map(|l| (l.energy - e0).abs()).fold(0.0, f64::max) / e0.abs().max(f64::MIN_POSITIVE)
    }
}

fn log_entry(st: &Stepper) -> Result<LogEntry> {
    let s = st.state();
    Ok(LogEntry {
        t: st.t(),
        energy: energy(&s, st.model)?,
        momentum: momentum(&s)?,
        shadow: if st.frame.is_moving() { None } else { Some(st.shadow_energy()) },
    })
}

pub fn evolve(initial: &FieldState, model: Model, cfg: &EvolveConfig) -> Result<Trajectory> {
    evolve_with(initial, model, cfg, Exec::default())
}

pub fn evolve_with(initial: &FieldState, model: Model, cfg: &EvolveConfig, exec: Exec) -> Result<Trajectory> {
    let mut st = Stepper::with_exec(initial, model, cfg, exec)?;
    let (n, _) = cfg.steps();
    let mut traj = Trajectory { model, dt: st.dt(), snapshots: vec![st.state()], log: vec![log_entry(&st)?] };
    for k in 1..=n {
        st.step()?;
        if k == n || (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) {
            traj.snapshots.push(st.state());
        }
        if k == n || (cfg.log_every > 0 && k % cfg.log_every == 0) {
            traj.log.push(log_entry(&st)?);
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Probe {
    Energy,
    Momentum,
    /// H¹×L² norm of the perturbation on `[a, b]`.
    LocalEnergyNorm(f64, f64),
    /// Squared weighted norm of the perturbation.
    WeightedNorm(WeightSpec),
    /// Kink shift `ρ` (position `βt + ρ`) for a kink of speed `beta`.
    Modulation { beta: f64 },
}

impl Probe {
    pub fn name(&self) -> String {
        match self {
            Probe::Energy => "energy".into(),
            Probe::Momentum => "momentum".into(),
            Probe::LocalEnergyNorm(a, b) => format!("local_norm[{a},{b}]"),
            Probe::WeightedNorm(w) => format!("weighted_norm[{}]", w.rate),
            Probe::Modulation { .. } => "rho".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSeries {
    pub t: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl ProbeSeries {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// Evolves `initial` sampled at `t = 0` and records each probe every
/// `cfg.log_every` steps (and at both ends).
pub fn evolve_probe(
    initial: &dyn Sampler,
    grid: &Grid,
    model: Model,
    cfg: &EvolveConfig,
    probes: &[Probe],
) -> Result<ProbeSeries> {
    evolve_probe_state(&initial.state(grid, 0.0)?, model, cfg, probes)
}

/// [`evolve_probe`] from a sampled state.
pub fn evolve_probe_state(s0: &FieldState, model: Model, cfg: &EvolveConfig, probes: &[Probe]) -> Result<ProbeSeries> {
    let mut st = Stepper::new(s0, model, cfg)?;
    let mut out = ProbeSeries { t: vec![], columns: probes.iter().map(|p| (p.name(), vec![])).collect() };
    let mut guess = vec![0.0; probes.len()];
    let mut record = |st: &Stepper, out: &mut ProbeSeries| -> Result<()> {
        out.t.push(st.t());
        let full = st.state();
        let pert = st.perturbation();
        for (j, p) in probes.iter().enumerate() {
            let val = match p {
                Probe::Energy => energy(&full, model)?,
                Probe::Momentum => momentum(&full)?,
                Probe::LocalEnergyNorm(a, b) => local_energy_norm(&pert, (*a, *b))?,
                Probe::WeightedNorm(w) => weighted_norm_sq(&pert, w)?,
                Probe::Modulation { beta } => {
                    let r = crate::modulation::solve_shift(&full, *beta, guess[j])?;
                    guess[j] = r;
                    r
                }
            };
            out.columns[j].1.push(val);
        }
        Ok(())
    };
    record(&st, &mut out)?;
    let (n, _) = cfg.steps();
    for k in 1..=n {
        st.step()?;
        if k == n || (cfg.log_every > 0 && k % cfg.log_every == 0) {
            record(&st, &mut out)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_terms_match_differences() {
        for &(q, u) in &[(0.3, 0.01), (2.0, -0.2), (5.5, 0.7)] {
            let (s, c) = (f64::sin(q), f64::cos(q));
            let want = f64::sin(q + u) - s;
            assert!((reduced_force(Model::SineGordon, q, s, c, u, true) - want).abs() < 1e-14);
            let wv = (1.0 - f64::cos(q + u)) - (1.0 - c) - s * u;
            assert!((reduced_potential(Model::SineGordon, q, s, c, u, true) - wv).abs() < 1e-14);
        }
        for &(k, u) in &[(0.2, 0.1), (-0.9, 0.3)] {
            let m = Model::Phi4;
            let want = m.nonlinearity(k + u) - m.nonlinearity(k);
            assert!((reduced_force(m, k, 0.0, 0.0, u, true) - want).abs() < 1e-14);
            let wv = m.potential(k + u) - m.potential(k) - m.nonlinearity(k) * u;
            assert!((reduced_potential(m, k, 0.0, 0.0, u, true) - wv).abs() < 1e-14);
        }
    }

    #[test]
    fn step_count_lands_on_t_end() {
        let c = EvolveConfig::new(0.015, 1.0);
        let (n, dt) = c.steps();
        assert!((n as f64 * dt - 1.0).abs() < 1e-14 && dt <= 0.015);
        assert_eq!(EvolveConfig::new(0.01, 0.0).steps().0, 0);
    }
}
