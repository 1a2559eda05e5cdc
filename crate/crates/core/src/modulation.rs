//! Kink shift `ρ(t)` under the orthogonality condition, decomposition
//! `φ = Q(·; β, βt + ρ) + ũ`, tracking during evolution and the decay
//! diagnostics built on top of it.

use serde::{Deserialize, Serialize};

use crate::conserved::{energy, momentum};
use crate::error::{Error, Result};
use crate::evolver::{BackgroundKind, EvolveConfig, Stepper};
use crate::exact::KinkProfile;
use crate::field::{
    derivative_with, energy_norm, local_energy_norm, quadrature, DiffOrder, FieldState, Grid, Model, ParityTag,
    PerturbationPair,
};
use crate::tolerances::{CONVERGED_TV, RATE_EPS, SHIFT_RESIDUAL, TUBE_RADIUS};

fn sech(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Largest accepted H¹×L² distance to the kink family.
    pub tube: f64,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        ShiftOptions { tol: SHIFT_RESIDUAL, max_iter: 40, tube: TUBE_RADIUS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftSolution {
    pub rho: f64,
    /// `|Y(ρ)|` at the root.
    pub residual: f64,
    pub iterations: usize,
    /// `‖(ũ, s̃)‖_{H¹×L²}` at the root.
    pub distance: f64,
}

fn profile_at(beta: f64, t: f64, rho: f64) -> Result<KinkProfile> {
    KinkProfile::centered(beta, beta * t + rho)
}

/// `Y(ρ) = ∫ ũ Q̃_x + s̃ Q_{t,x}` and `dY/dρ` for the kink centred at `βt + ρ`.
fn y_and_slope(state: &FieldState, beta: f64, rho: f64) -> Result<(f64, f64)> {
    let p = profile_at(beta, state.t, rho)?;
    let g = &state.grid;
    let mut y = vec![0.0; g.n];
    let mut dy = vec![0.0; g.n];
    let g3 = 2.0 * p.gamma.powi(3);
    for i in 0..g.n {
        let x = g.x(i);
        let u = state.u[i] - p.q(x);
        let s = state.v[i] - p.q_t(x);
        let (qx, qxx, qtx) = (p.q_x(x), p.q_xx(x), p.q_tx(x));
        let z = p.gamma * (x - p.x0);
        let (th, sh) = (z.tanh(), sech(z));
        let qxxx = g3 * sh * (th * th - sh * sh);
        let qtxx = -beta * qxxx;
        y[i] = u * qx + s * qtx;
        dy[i] = qx * qx - u * qxx + qtx * qtx - s * qtxx;
    }
    Ok((quadrature(&y, g)?, quadrature(&dy, g)?))
}

/// Orthogonality integral `∫(ũ, s̃)·(Q̃_x, Q_{t,x})` at shift `ρ`.
pub fn orthogonality(state: &FieldState, beta: f64, rho: f64) -> Result<f64> {
    Ok(y_and_slope(state, beta, rho)?.0)
}

/// Newton iteration on `Y(ρ) = 0` from `rho_guess`.
pub fn solve_shift(state: &FieldState, beta: f64, rho_guess: f64) -> Result<f64> {
    Ok(solve_shift_with(state, beta, rho_guess, &ShiftOptions::default())?.rho)
}

pub fn solve_shift_with(state: &FieldState, beta: f64, rho_guess: f64, opts: &ShiftOptions) -> Result<ShiftSolution> {
    state.check_finite()?;
    let exit = |rho: f64| -> Error {
        let distance = decompose(state, beta, rho).ok().and_then(|p| energy_norm(&p).ok()).unwrap_or(f64::NAN);
        Error::TubeExit { t: state.t, distance }
    };
    let mut rho = rho_guess;
    for it in 0..=opts.max_iter {
        let (y, dy) = y_and_slope(state, beta, rho)?;
        if y.abs() <= opts.tol {
            // One more step pushes the root to rounding level, which keeps
            // the differenced ρ′ free of solver noise.
            let mut y = y;
            if dy > 0.0 {
                let polished = rho - y / dy;
                let (yp, _) = y_and_slope(state, beta, polished)?;
                if yp.abs() < y.abs() {
                    rho = polished;
                    y = yp;
                }
            }
            let distance = energy_norm(&decompose(state, beta, rho)?)?;
            if !(distance < opts.tube) {
                return Err(Error::TubeExit { t: state.t, distance });
            }
            return Ok(ShiftSolution { rho, residual: y.abs(), iterations: it, distance });
        }
        // Near the family dY/dρ ≈ ∫Q_x² + Q_tx² > 0; losing that sign means
        // the state left the region where the root is unique.
        if !(dy > 0.0) {
            return Err(exit(rho));
        }
        let step = y / dy;
        rho -= step.clamp(-1.0, 1.0);
        if (rho - rho_guess).abs() > 10.0 || !rho.is_finite() {
            return Err(exit(rho));
        }
    }
    Err(exit(rho))
}

/// `(ũ, s̃) = (φ, φ_t) − (Q, Q_t)(·; β, βt + ρ)`.
pub fn decompose(state: &FieldState, beta: f64, rho: f64) -> Result<PerturbationPair> {
    let p = profile_at(beta, state.t, rho)?;
    let g = &state.grid;
    let first = (0..g.n).map(|i| state.u[i] - p.q(g.x(i))).collect();
    let second = (0..g.n).map(|i| state.v[i] - p.q_t(g.x(i))).collect();
    Ok(PerturbationPair { grid: *g, first, second, tag: ParityTag::None })
}

/// Inverse of [`decompose`].
pub fn reconstruct(pair: &PerturbationPair, beta: f64, rho: f64, t: f64) -> Result<FieldState> {
    let p = profile_at(beta, t, rho)?;
    let g = &pair.grid;
    let u = (0..g.n).map(|i| p.q(g.x(i)) + pair.first[i]).collect();
    let v = (0..g.n).map(|i| p.q_t(g.x(i)) + pair.second[i]).collect();
    FieldState::new(t, *g, u, v)
}

/// Weighted integrals entering the `ρ′` bounds, with weights centred at `ρ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RateTerms {
    /// `∫e^{−(1+ε)|x−ρ|}(ũ² + ũ_x²)`.
    pub u_plus: f64,
    /// `∫e^{−(1−ε)|x−ρ|}(y² + y_x²)`.
    pub y_minus: f64,
    /// `∫e^{−(1−ε)|x−ρ|}(v² + y² + y_x²)`.
    pub yv_minus: f64,
    /// `∫e^{−(1+ε)|x−ρ|}ũ_x²`.
    pub ux_plus: f64,
    /// `∫e^{−(1+ε)|x−ρ|}(ũ² + y² + v²)`.
    pub uyv_plus: f64,
    /// `∫ũ² sech^{1+ε}(x−ρ)`.
    pub u_sech: f64,
    /// `∫(y² + y_x² + v²) sech^{1−ε}(x−ρ)`.
    pub yv_sech: f64,
}

pub fn rate_terms(kink: &PerturbationPair, zero: &PerturbationPair, rho: f64, eps: f64) -> Result<RateTerms> {
    let g = &kink.grid;
    if !g.same_as(&zero.grid) {
        return Err(Error::GridMismatch);
    }
    let ux = derivative_with(&kink.first, g, DiffOrder::Sixth)?;
    let yx = derivative_with(&zero.first, g, DiffOrder::Sixth)?;
    let mut cols = vec![vec![0.0; g.n]; 7];
    for i in 0..g.n {
        let r = (g.x(i) - rho).abs();
        let (wp, wm) = ((-(1.0 + eps) * r).exp(), (-(1.0 - eps) * r).exp());
        let (sp, sm) = (sech(r).powf(1.0 + eps), sech(r).powf(1.0 - eps));
        let (u, y, v) = (kink.first[i], zero.first[i], zero.second[i]);
        let (u2, ux2, y2, yx2, v2) = (u * u, ux[i] * ux[i], y * y, yx[i] * yx[i], v * v);
        cols[0][i] = wp * (u2 + ux2);
        cols[1][i] = wm * (y2 + yx2);
        cols[2][i] = wm * (v2 + y2 + yx2);
        cols[3][i] = wp * ux2;
        cols[4][i] = wp * (u2 + y2 + v2);
        cols[5][i] = sp * u2;
        cols[6][i] = sm * (y2 + yx2 + v2);
    }
    let q: Vec<f64> = cols.iter().map(|c| quadrature(c, g)).collect::<Result<_>>()?;
    Ok(RateTerms {
        u_plus: q[0],
        y_minus: q[1],
        yv_minus: q[2],
        ux_plus: q[3],
        uyv_plus: q[4],
        u_sech: q[5],
        yv_sech: q[6],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationRecord {
    pub t: f64,
    pub rho: f64,
    /// Centered difference of `ρ` over neighbouring records.
    pub rho_rate: f64,
    pub ortho_residual: f64,
    pub lhs_rate: f64,
    /// `∫e^{−(1−ε)|x−ρ|}(v² + y² + y_x²)`.
    pub rhs_bound: f64,
    /// `(a, b, ‖(ũ, s̃)‖_{H¹×L²([a,b])})`.
    pub local_norms: Vec<(f64, f64, f64)>,
    pub energy: f64,
    pub momentum: f64,
    /// `∫e^{−c|x−ρ|}(ũ_x² + ũ² + s̃²)`.
    pub weighted_norm: f64,
    pub terms: RateTerms,
}

/// Fills `rho_rate` and `lhs_rate` by centered differences (one-sided at
/// the ends).
pub fn finalize_rates(records: &mut [ModulationRecord]) {
    let n = records.len();
    if n < 2 {
        for r in records.iter_mut() {
            r.rho_rate = 0.0;
            r.lhs_rate = 0.0;
        }
        return;
    }
    let rates: Vec<f64> = (0..n)
        .map(|k| {
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            (records[b].rho - records[a].rho) / (records[b].t - records[a].t)
        })
        .collect();
    for (r, d) in records.iter_mut().zip(rates) {
        r.rho_rate = d;
        r.lhs_rate = d.abs();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub eps: f64,
    pub max_lhs: f64,
    pub max_rhs: f64,
    /// `max |ρ′| / ∫e^{−(1−ε)|x−ρ|}(v² + y² + y_x²)`.
    pub ratio_rate_zero_side: f64,
    /// `max |ρ′| / (u_plus + y_minus)`.
    pub ratio_rate_mixed: f64,
    /// `max ∫e^{−(1+ε)}ũ_x² / ∫e^{−(1+ε)}(ũ² + y² + v²)`.
    pub ratio_ux: f64,
    /// `max ∫ũ² sech^{1+ε} / ∫(y² + y_x² + v²) sech^{1−ε}`.
    pub ratio_sech: f64,
}

fn max_ratio(it: impl Iterator<Item = (f64, f64)>) -> f64 {
    it.filter(|&(n, d)| d > 0.0 && n.is_finite()).map(|(n, d)| n / d).fold(0.0, f64::max)
}

/// Ratios of the measured `|ρ′|` (and of the intermediate quantities) to
/// their weighted bounds, maximized over the run.
pub fn rho_rate_check(records: &[ModulationRecord], eps: f64) -> RateReport {
    let it = || records.iter();
    RateReport {
        eps,
        max_lhs: it().map(|r| r.lhs_rate).fold(0.0, f64::max),
        max_rhs: it().map(|r| r.rhs_bound).fold(0.0, f64::max),
        ratio_rate_zero_side: max_ratio(it().map(|r| (r.lhs_rate, r.rhs_bound))),
        ratio_rate_mixed: max_ratio(it().map(|r| (r.lhs_rate, r.terms.u_plus + r.terms.y_minus))),
        ratio_ux: max_ratio(it().map(|r| (r.terms.ux_plus, r.terms.uyv_plus))),
        ratio_sech: max_ratio(it().map(|r| (r.terms.u_sech, r.terms.yv_sech))),
    }
}

/// Recomputes the weighted terms of `records` from stored pairs at a new `ε`.
pub fn rho_rate_check_pairs(
    records: &[ModulationRecord],
    kink_pairs: &[PerturbationPair],
    zero_pairs: &[PerturbationPair],
    eps: f64,
) -> Result<RateReport> {
    if kink_pairs.len() != records.len() || zero_pairs.len() != records.len() {
        return Err(Error::LengthMismatch { expected: records.len(), got: kink_pairs.len().min(zero_pairs.len()) });
    }
    let mut recs = records.to_vec();
    for ((r, k), z) in recs.iter_mut().zip(kink_pairs).zip(zero_pairs) {
        r.terms = rate_terms(k, z, r.rho, eps)?;
        r.rhs_bound = r.terms.yv_minus;
    }
    Ok(rho_rate_check(&recs, eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StildeReport {
    /// `max |s̃ − y_x + 2 sin((Q̃ + ũ)/2) sin(y/2)|`.
    pub identity_residual: f64,
    /// `max |s̃| / (|y_x| + |y|)` over nodes where the denominator is not
    /// negligible.
    pub bound_constant: f64,
}

/// Checks the static-frame identity linking `s̃` to the zero-side pair and
/// the pointwise bound `|s̃| ≤ C(|y_x| + |y|)`.
pub fn stilde_bound_check(kink: &PerturbationPair, zero: &PerturbationPair, rho: f64) -> Result<StildeReport> {
    let g = &kink.grid;
    if !g.same_as(&zero.grid) {
        return Err(Error::GridMismatch);
    }
    let p = KinkProfile::centered(0.0, rho)?;
    let yx = derivative_with(&zero.first, g, DiffOrder::Sixth)?;
    let mut identity = 0.0_f64;
    let mut den_max = 0.0_f64;
    let dens: Vec<f64> = (0..g.n).map(|i| yx[i].abs() + zero.first[i].abs()).collect();
    for &d in &dens {
        den_max = den_max.max(d);
    }
    let mut c = 0.0_f64;
    for i in 0..g.n {
        let qt = p.q_tilde(g.x(i));
        let s = kink.second[i];
        let rhs = yx[i] - 2.0 * (0.5 * (qt + kink.first[i])).sin() * (0.5 * zero.first[i]).sin();
        identity = identity.max((s - rhs).abs());
        if dens[i] > 1e-6 * den_max {
            c = c.max(s.abs() / dens[i]);
        }
    }
    Ok(StildeReport { identity_residual: identity, bound_constant: c })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classification {
    BoundedConverging { rho_bar: f64, total_variation: f64 },
    /// Times and values where `|ρ|` sets a new running maximum.
    Excursion { times: Vec<f64>, rhos: Vec<f64>, total_variation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub class: Classification,
    /// `(t, first local norm)` per record.
    pub local_norms: Vec<(f64, f64)>,
}

pub fn convergence_classifier(records: &[ModulationRecord]) -> ClassifierReport {
    let local_norms = records.iter().map(|r| (r.t, r.local_norms.first().map_or(f64::NAN, |l| l.2))).collect();
    if records.is_empty() {
        return ClassifierReport {
            class: Classification::Excursion { times: vec![], rhos: vec![], total_variation: f64::NAN },
            local_norms,
        };
    }
    let (t0, t1) = (records[0].t, records[records.len() - 1].t);
    let cut = t0 + 0.75 * (t1 - t0);
    let tail: Vec<&ModulationRecord> = records.iter().filter(|r| r.t >= cut).collect();
    let tv: f64 = tail.windows(2).map(|w| (w[1].rho - w[0].rho).abs()).sum();
    let class = if tv < CONVERGED_TV {
        let rho_bar = tail.iter().map(|r| r.rho).sum::<f64>() / tail.len() as f64;
        Classification::BoundedConverging { rho_bar, total_variation: tv }
    } else {
        let (mut times, mut rhos, mut best) = (vec![], vec![], -1.0);
        for r in records {
            if r.rho.abs() > best {
                best = r.rho.abs();
                times.push(r.t);
                rhos.push(r.rho);
            }
        }
        Classification::Excursion { times, rhos, total_variation: tv }
    };
    ClassifierReport { class, local_norms }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackConfig {
    pub beta: f64,
    pub eps: f64,
    pub intervals: Vec<(f64, f64)>,
    /// Rate `c` of the weighted norm column.
    pub weight_rate: f64,
    /// Steps between records (at least 1).
    pub record_every: usize,
    pub shift: ShiftOptions,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig {
            beta: 0.0,
            eps: RATE_EPS,
            intervals: vec![(-5.0, 5.0)],
            weight_rate: 0.5,
            record_every: 10,
            shift: ShiftOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackRun {
    pub records: Vec<ModulationRecord>,
    /// Set when tracking stopped early (tube exit or blow-up).
    pub stopped: Option<String>,
    /// Per-record pairs, kept only when requested.
    #[serde(skip)]
    pub kink_pairs: Vec<PerturbationPair>,
    #[serde(skip)]
    pub zero_pairs: Vec<PerturbationPair>,
}

fn record_at(
    st: &Stepper,
    zero: Option<&Stepper>,
    grid: &Grid,
    tc: &TrackConfig,
    guess: f64,
) -> Result<(ModulationRecord, PerturbationPair, PerturbationPair)> {
    let full = st.state();
    let sol = solve_shift_with(&full, tc.beta, guess, &tc.shift)?;
    let pair = decompose(&full, tc.beta, sol.rho)?;
    let zp = match zero {
        Some(z) => z.perturbation(),
        None => PerturbationPair::zeros(*grid, ParityTag::None),
    };
    let terms = rate_terms(&pair, &zp, sol.rho, tc.eps)?;
    let local_norms =
        tc.intervals.iter().map(|&(a, b)| Ok((a, b, local_energy_norm(&pair, (a, b))?))).collect::<Result<_>>()?;
    let w = crate::field::WeightSpec::new(tc.weight_rate, sol.rho)?;
    let rec = ModulationRecord {
        t: full.t,
        rho: sol.rho,
        rho_rate: 0.0,
        ortho_residual: sol.residual,
        lhs_rate: 0.0,
        rhs_bound: terms.yv_minus,
        local_norms,
        energy: energy(&full, Model::SineGordon)?,
        momentum: momentum(&full)?,
        weighted_norm: crate::field::weighted_norm_sq(&pair, &w)?,
        terms,
    };
    Ok((rec, pair, zp))
}

/// Evolves the sine-Gordon kink-side state (and optionally the zero-side
/// state) and records the modulation data every `record_every` steps. A tube
/// exit or blow-up stops the run; the records so far are returned.
pub fn track(
    kink_state: &FieldState,
    zero_state: Option<&FieldState>,
    cfg: &EvolveConfig,
    tc: &TrackConfig,
    keep_pairs: bool,
) -> Result<TrackRun> {
    let frame = if tc.beta == 0.0 {
        BackgroundKind::StaticKink
    } else {
        BackgroundKind::MovingKink { beta: tc.beta, x0: 0.0 }
    };
    let mut st = Stepper::new(kink_state, Model::SineGordon, &cfg.with_background(frame))?;
    let mut zst = match zero_state {
        Some(z) => Some(Stepper::new(z, Model::SineGordon, &cfg.with_background(BackgroundKind::None))?),
        None => None,
    };
    let grid = kink_state.grid;
    let every = tc.record_every.max(1);
    let (n, _) = cfg.steps();
    let mut run = TrackRun { records: vec![], stopped: None, kink_pairs: vec![], zero_pairs: vec![] };
    let mut guess = 0.0;
    for k in 0..=n {
        if k > 0 {
            let r = st.step().and_then(|_| zst.as_mut().map_or(Ok(()), |z| z.step()));
            if let Err(e) = r {
                run.stopped = Some(e.to_string());
                break;
            }
        }
        if k % every != 0 && k != n {
            continue;
        }
        match record_at(&st, zst.as_ref(), &grid, tc, guess) {
            Ok((rec, p, z)) => {
                guess = rec.rho;
                run.records.push(rec);
                if keep_pairs {
                    run.kink_pairs.push(p);
                    run.zero_pairs.push(z);
                }
            }
            Err(e @ Error::TubeExit { .. }) => {
                run.stopped = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    finalize_rates(&mut run.records);
    Ok(run)
}
