//! End-to-end experiment recipes shared by the CLI and the acceptance suite.
//!
//! Every recipe returns a [`Report`]: a list of [`Check`]s (measured value,
//! the tolerance it was judged against and where the expected value comes
//! from) plus numeric [`Table`]s. Solver failures propagate as errors; a
//! failed check is data, not an error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backlund::{
    construct_manifold_data, descend_kink_to_zero, descend_wobbler_to_breather, final_speed_from_delta,
    final_speed_from_momentum, lift_breather_to_wobbler, lift_zero_to_kink, BtParameter, SolverOptions,
};
use crate::conserved::{energy, kink_momentum, manifold_momentum, momentum};
use crate::error::{Error, Result};
use crate::evolver::{evolve, evolve_probe_state, BackgroundKind, EvolveConfig, Probe, Stencil, Stepper};
use crate::exact::{
    breather, kink, kink_profile, linear_mode, phi4_kink, three_soliton, two_kink, wobbler, KinkParams, Sampler,
    ThreeSolitonParams, Wobbler, WobblerParams, Zero,
};
use crate::field::{
    energy_norm, max_abs, max_abs_diff, parity_check, pde_residual, DiffOrder, FieldState, Grid, Model, Parity,
    ParityTag, PerturbationPair, WeightSpec,
};
use crate::linearized::{
    discrete_spectrum, lbt_residual_phi4, lbt_residual_phi4_dual, lbt_residual_sg, wave_residual_with, DualSign,
    SchrodingerOperator,
};
use crate::modulation::{convergence_classifier, rho_rate_check, track, Classification, TrackConfig, TrackRun};
use crate::par::{self, Exec};
use crate::tolerances::*;

/// Where the expected value of a check comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Closed-form value of an exact solution or identity.
    ClosedForm,
    /// Independent numerical reference (refinement study, second solver).
    Oracle,
    /// Consistency between two computed quantities.
    Identity,
    /// Scaling law predicted by the analysis.
    Predicted,
    /// Value measured by this code and pinned.
    Regression,
    /// Threshold chosen for the experiment.
    Artifact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bound {
    AtMost,
    AtLeast,
    Near { target: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub basis: Basis,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, tolerance: f64, bound: Bound, basis: Basis) -> Self {
        let passed = match bound {
            Bound::AtMost => measured <= tolerance,
            Bound::AtLeast => measured >= tolerance,
            Bound::Near { target } => (measured - target).abs() <= tolerance,
        };
        Check { name: name.into(), measured, tolerance, bound, basis, passed }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, basis: Basis) -> Self {
        Check::new(name, measured, tolerance, Bound::AtMost, basis)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64, basis: Basis) -> Self {
        Check::new(name, measured, tolerance, Bound::AtLeast, basis)
    }

    pub fn near(name: impl Into<String>, measured: f64, target: f64, tolerance: f64, basis: Basis) -> Self {
        Check::new(name, measured, tolerance, Bound::Near { target }, basis)
    }
}

/// Numeric table. `labels`, when non-empty, names each row and is written as
/// a leading `case` column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            labels: vec![],
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_labeled(&mut self, label: impl Into<String>, row: Vec<f64>) {
        self.labels.push(label.into());
        self.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// CSV with a header line, `\n` line ends and shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let labeled = !self.labels.is_empty();
        let mut out = String::new();
        if labeled {
            out.push_str("case,");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            if labeled {
                out.push_str(&self.labels[i]);
                out.push(',');
            }
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), checks: vec![], tables: vec![], notes: vec![] }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.tables.extend(other.tables);
        self.notes.extend(other.notes);
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Run-wide switches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Divide all tolerances by 10.
    pub strict: bool,
    /// Base seed for randomized inputs.
    pub seed: u64,
    pub exec: Exec,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { strict: false, seed: 0, exec: Exec::default() }
    }
}

impl Settings {
    fn tol(&self, t: f64) -> f64 {
        scaled(t, self.strict)
    }
}

/// Smooth random profile of the given parity: three mirrored Gaussians,
/// rescaled to `max|f| = amplitude`.
pub fn random_profile(grid: &Grid, rng: &mut ChaCha8Rng, parity: Parity, amplitude: f64) -> Vec<f64> {
    let bumps: Vec<(f64, f64, f64)> =
        (0..3).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.7..2.0), rng.gen_range(-1.0..1.0))).collect();
    let f = grid.sample(|x| {
        bumps
            .iter()
            .map(|&(c, w, a)| {
                let g = |z: f64| (-((z - c) / w).powi(2)).exp();
                a * match parity {
                    Parity::Even => g(x) + g(-x),
                    Parity::Odd => g(x) - g(-x),
                }
            })
            .sum()
    });
    let m = max_abs(&f);
    if m == 0.0 {
        return f;
    }
    f.iter().map(|v| amplitude * v / m).collect()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn add_pair(s: &FieldState, du: &[f64], dv: &[f64]) -> Result<FieldState> {
    let u = s.u.iter().zip(du).map(|(a, b)| a + b).collect();
    let v = s.v.iter().zip(dv).map(|(a, b)| a + b).collect();
    FieldState::new(s.t, s.grid, u, v)
}

fn log2_ratio(a: f64, b: f64) -> f64 {
    (a / b).log2()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Exact solutions

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactOptions {
    pub half_width: f64,
    /// Coarsest spacing; each level halves `h` and `dt`.
    pub h: f64,
    pub levels: usize,
    /// `dt = dt_ratio · h`.
    pub dt_ratio: f64,
    pub t: f64,
    pub kink_beta: f64,
    pub breather_beta: f64,
    pub wobbler_beta: f64,
    pub two_kink_beta: f64,
    pub three_soliton: ThreeSolitonParams,
    /// Speeds of the per-β wobbler table.
    pub wobbler_betas: Vec<f64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            half_width: 40.0,
            h: 0.02,
            levels: 3,
            dt_ratio: 0.5,
            t: 1.3,
            kink_beta: 0.3,
            breather_beta: 0.5,
            wobbler_beta: 0.3,
            two_kink_beta: 0.3,
            three_soliton: ThreeSolitonParams { beta: 0.3, v: 0.2 },
            wobbler_betas: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        }
    }
}

fn refinement(s: &dyn Sampler, model: Model, o: &ExactOptions) -> Result<Vec<(f64, f64)>> {
    let mut out = vec![];
    let mut h = o.h;
    for _ in 0..o.levels.max(2) {
        let g = Grid::symmetric(o.half_width, h)?;
        out.push((h, max_abs(&pde_residual(s, model, o.t, &g, o.dt_ratio * h)?)));
        h *= 0.5;
    }
    Ok(out)
}

pub fn verify_exact(o: &ExactOptions, s: &Settings) -> Result<Report> {
    let families: Vec<(Box<dyn Sampler>, Model)> = vec![
        (Box::new(kink(KinkParams::new(o.kink_beta, 0.0)?)?), Model::SineGordon),
        (Box::new(breather(o.breather_beta)?), Model::SineGordon),
        (Box::new(wobbler(WobblerParams { beta: o.wobbler_beta })?), Model::SineGordon),
        (Box::new(two_kink(o.two_kink_beta)?), Model::SineGordon),
        (Box::new(three_soliton(o.three_soliton)?), Model::SineGordon),
        (Box::new(phi4_kink()), Model::Phi4),
    ];
    for &b in &o.wobbler_betas {
        wobbler(WobblerParams { beta: b })?;
    }
    let mut rep = Report::new("exact-solution residuals");
    let studies = par::map(s.exec, &families, |(f, m)| refinement(f.as_ref(), *m, o));
    let mut tab = Table::new("exact_residuals", &["h", "dt", "residual", "order"]);
    for ((f, _), study) in families.iter().zip(studies) {
        let study = study?;
        let label = f.label();
        let mut min_order = f64::INFINITY;
        for (k, &(h, r)) in study.iter().enumerate() {
            let order = if k == 0 { f64::NAN } else { log2_ratio(study[k - 1].1, r) };
            if k > 0 {
                min_order = min_order.min(order);
            }
            tab.push_labeled(label.clone(), vec![h, o.dt_ratio * h, r, order]);
        }
        rep.check(Check::at_least(format!("order {label}"), min_order, MIN_ORDER, Basis::Oracle));
        let finest = study.last().map_or(f64::NAN, |p| p.1);
        rep.check(Check::at_most(format!("finest residual {label}"), finest, s.tol(EXACT_RESIDUAL), Basis::ClosedForm));
    }
    rep.tables.push(tab);

    let mut wt = Table::new("wobbler_beta", &["beta", "residual_coarse", "residual_fine", "order"]);
    let wobblers: Vec<Wobbler> = o.wobbler_betas.iter().map(|&b| wobbler(WobblerParams { beta: b })).collect::<Result<_>>()?;
    let studies = par::map(s.exec, &wobblers, |w| refinement(w, Model::SineGordon, o));
    for (w, study) in wobblers.iter().zip(studies) {
        let study = study?;
        let (r0, r1) = (study[0].1, study[study.len() - 1].1);
        let order = log2_ratio(r0, r1) / (study.len() - 1) as f64;
        wt.push(vec![w.beta, r0, r1, order]);
        rep.check(Check::at_least(format!("order wobbler beta={}", w.beta), order, MIN_ORDER, Basis::Oracle));
    }
    rep.tables.push(wt);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Bäcklund identities

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BtOptions {
    pub half_width: f64,
    pub h: f64,
    pub betas: Vec<f64>,
    pub times: Vec<f64>,
    /// Time step of the centered second difference in the wave checks.
    pub wave_dt: f64,
}

impl Default for BtOptions {
    fn default() -> Self {
        BtOptions { half_width: 40.0, h: 0.02, betas: vec![0.1, 0.3, 0.5, 0.7], times: vec![0.0, 1.3, 5.0], wave_dt: 2e-4 }
    }
}

fn pair_max(r: (Vec<f64>, Vec<f64>)) -> f64 {
    max_abs(&r.0).max(max_abs(&r.1))
}

/// Nonlinear transformation: vacuum ↔ moving kink and breather ↔ wobbler.
pub fn bt_identities(o: &BtOptions, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let mut rep = Report::new("Backlund identities");
    let mut tab = Table::new("bt_residuals", &["beta", "t", "residual"]);
    let tol = s.tol(BT_IDENTITY);
    for &beta in &o.betas {
        let q = kink(KinkParams::new(beta, 0.0)?)?;
        let a = BtParameter::from_beta(beta)?;
        let b = breather(beta)?;
        let w = wobbler(WobblerParams { beta })?;
        let one = BtParameter::new(1.0)?;
        let (mut worst_k, mut worst_w) = (0.0_f64, 0.0_f64);
        for &t in &o.times {
            let rk = pair_max(crate::backlund::bt_residual(&FieldState::zeros(t, g), &q.state(&g, t)?, a)?);
            let rw = pair_max(crate::backlund::bt_residual(&b.state(&g, t)?, &w.state(&g, t)?, one)?);
            tab.push_labeled("vacuum-kink", vec![beta, t, rk]);
            tab.push_labeled("breather-wobbler", vec![beta, t, rw]);
            worst_k = worst_k.max(rk);
            worst_w = worst_w.max(rw);
        }
        rep.check(Check::at_most(format!("bt vacuum-kink beta={beta}"), worst_k, tol, Basis::ClosedForm));
        rep.check(Check::at_most(format!("bt breather-wobbler beta={beta}"), worst_w, tol, Basis::ClosedForm));
    }
    rep.tables.push(tab);
    Ok(rep)
}

/// The explicit solution pairs of the linearized transformations.
pub const LBT_PAIRS: [(&str, &str, &str); 9] = [
    ("sine-gordon", "L", "M"),
    ("sine-gordon", "L-alt", "M-alt"),
    ("sine-gordon", "Qprime", "zero"),
    ("phi4", "Hprime", "zero"),
    ("phi4", "Y1", "Y0"),
    ("phi4", "Y1-alt", "Y0-alt"),
    ("phi4", "L4", "M4"),
    ("phi4", "L4-alt", "M4-alt"),
    ("phi4-dual", "M4-complex", "N4-plus|N4-minus"),
];

/// Wave equations solved by the linear modes: `(mode, operator)`.
pub fn wave_cases() -> Vec<(&'static str, SchrodingerOperator)> {
    vec![
        ("L", SchrodingerOperator::SineGordonKink),
        ("Qprime", SchrodingerOperator::SineGordonKink),
        ("M", SchrodingerOperator::Flat { mass_sq: 1.0 }),
        ("Y1", SchrodingerOperator::Phi4Kink),
        ("M4", SchrodingerOperator::Phi4Dual),
        ("M4-alt", SchrodingerOperator::Phi4Dual),
        ("M4-complex", SchrodingerOperator::Phi4Dual),
        ("N4-plus", SchrodingerOperator::Flat { mass_sq: 2.0 }),
        ("N4-minus", SchrodingerOperator::Flat { mass_sq: 2.0 }),
    ]
}

fn lbt_pair_residual(system: &str, a: &str, b: &str, t: f64, g: &Grid) -> Result<f64> {
    let phi = linear_mode(a)?;
    match system {
        "phi4-dual" => {
            let mut worst = 0.0_f64;
            for (n4, sign) in [("N4-plus", DualSign::Upper), ("N4-minus", DualSign::Lower)] {
                let (r1, r2) = lbt_residual_phi4_dual(&phi, &linear_mode(n4)?, sign, t, g)?;
                worst = worst.max(r1.max_abs()).max(r2.max_abs());
            }
            Ok(worst)
        }
        _ => {
            let psi: Box<dyn Sampler> = if b == "zero" { Box::new(Zero) } else { Box::new(linear_mode(b)?) };
            let r = if system == "sine-gordon" {
                lbt_residual_sg(&phi, psi.as_ref(), t, g)?
            } else {
                lbt_residual_phi4(&phi, psi.as_ref(), t, g)?
            };
            Ok(pair_max(r))
        }
    }
}

/// Linearized transformations and the wave equations of their solutions.
pub fn lbt_identities(o: &BtOptions, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let mut rep = Report::new("linearized Backlund identities");
    let tol = s.tol(LBT_IDENTITY);
    let mut tab = Table::new("lbt_residuals", &["t", "residual"]);
    for (system, a, b) in LBT_PAIRS {
        let mut worst = 0.0_f64;
        for &t in &o.times {
            let r = lbt_pair_residual(system, a, b, t, &g)?;
            tab.push_labeled(format!("{a}/{b}"), vec![t, r]);
            worst = worst.max(r);
        }
        rep.check(Check::at_most(format!("lbt {a}/{b}"), worst, tol, Basis::ClosedForm));
    }
    rep.tables.push(tab);
    let mut wt = Table::new("wave_residuals", &["t", "residual"]);
    for (name, op) in wave_cases() {
        let m = linear_mode(name)?;
        let mut worst = 0.0_f64;
        for &t in &o.times {
            let r = max_abs(&wave_residual_with(&m, &op, t, &g, o.wave_dt, DiffOrder::Sixth)?);
            wt.push_labeled(format!("{name} {}", op.name()), vec![t, r]);
            worst = worst.max(r);
        }
        rep.check(Check::at_most(format!("wave {name}"), worst, tol, Basis::ClosedForm));
    }
    rep.tables.push(wt);
    Ok(rep)
}

pub fn verify_bt(o: &BtOptions, s: &Settings) -> Result<Report> {
    let mut rep = bt_identities(o, s)?;
    rep.merge(lbt_identities(o, s)?);
    rep.title = "Backlund and linearized Backlund identities".into();
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Spectra

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumOptions {
    pub half_width: f64,
    /// Node counts of the refinement study; the middle one is the reference.
    pub sizes: Vec<usize>,
    /// Window that must stay empty for the dual operator.
    pub gap: (f64, f64),
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { half_width: 40.0, sizes: vec![2001, 4001, 8001], gap: (-0.1, 1.3) }
    }
}

pub fn spectrum(o: &SpectrumOptions, s: &Settings) -> Result<Report> {
    if o.sizes.len() < 2 {
        return Err(Error::Parameter("spectrum needs at least two grid sizes".into()));
    }
    let cases: [(SchrodingerOperator, &[f64]); 3] = [
        (SchrodingerOperator::SineGordonKink, &[0.0]),
        (SchrodingerOperator::Phi4Kink, &[0.0, 1.5]),
        (SchrodingerOperator::Phi4Dual, &[1.5]),
    ];
    let mut rep = Report::new("discrete spectra");
    let mut tab = Table::new("eigenvalues", &["n", "index", "value", "exact", "error", "order"]);
    let reference = o.sizes[o.sizes.len() / 2];
    for (op, exact) in cases {
        let name = op.name();
        let spectra = par::map(s.exec, &o.sizes, |&n| {
            let g = Grid::new(-o.half_width, o.half_width, n)?;
            discrete_spectrum(&op, &g)
        });
        let spectra: Vec<_> = spectra.into_iter().collect::<Result<_>>()?;
        for (k, &n) in o.sizes.iter().enumerate() {
            rep.check(Check::near(
                format!("count {name} n={n}"),
                spectra[k].len() as f64,
                exact.len() as f64,
                0.0,
                Basis::ClosedForm,
            ));
        }
        for (j, &lam) in exact.iter().enumerate() {
            let errs: Vec<f64> =
                spectra.iter().map(|sp| sp.get(j).map_or(f64::INFINITY, |e| (e.value - lam).abs())).collect();
            let mut min_order = f64::INFINITY;
            for (k, &n) in o.sizes.iter().enumerate() {
                let order = if k == 0 { f64::NAN } else { log2_ratio(errs[k - 1], errs[k]) };
                if k > 0 {
                    min_order = min_order.min(order);
                }
                let value = spectra[k].get(j).map_or(f64::NAN, |e| e.value);
                tab.push_labeled(name.clone(), vec![n as f64, j as f64, value, lam, errs[k], order]);
                if n == reference {
                    rep.check(Check::at_most(
                        format!("eigenvalue {name} lambda={lam} n={n}"),
                        errs[k],
                        s.tol(EIGENVALUE),
                        Basis::ClosedForm,
                    ));
                }
            }
            rep.check(Check::at_least(format!("order {name} lambda={lam}"), min_order, MIN_ORDER, Basis::Oracle));
        }
        if op == SchrodingerOperator::Phi4Dual {
            let inside = spectra
                .iter()
                .flat_map(|sp| sp.iter())
                .filter(|e| e.value >= o.gap.0 && e.value <= o.gap.1)
                .count();
            rep.check(Check::at_most(
                format!("eigenvalues of {name} in [{}, {}]", o.gap.0, o.gap.1),
                inside as f64,
                0.0,
                Basis::ClosedForm,
            ));
        }
    }
    rep.tables.push(tab);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Manifold constructor

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManifoldOptions {
    pub half_width: f64,
    pub h: f64,
    /// Boost speeds for the boosted-kink consistency check.
    pub betas: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Amplitude of the odd `y₀` used for the momentum check.
    pub amplitude: f64,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        ManifoldOptions { half_width: 40.0, h: 0.02, betas: vec![0.1, 0.2], deltas: vec![-0.2, 0.0, 0.1, 0.5], amplitude: 0.05 }
    }
}

pub fn manifold(o: &ManifoldOptions, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let opts = SolverOptions::default();
    let mut rep = Report::new("manifold constructor");
    let z = PerturbationPair::zeros(g, ParityTag::OddEven);
    let r = construct_manifold_data(&z, 0.0, &opts)?;
    let origin = max_abs(&r.result.first).max(max_abs(&r.result.second));
    rep.check(Check::at_most("map at origin", origin, s.tol(PHI_AT_ZERO), Basis::ClosedForm));

    let q0 = kink_profile(KinkParams::static_kink())?;
    for &beta in &o.betas {
        let a = BtParameter::from_beta(beta)?;
        let r = construct_manifold_data(&z, a.delta(), &opts)?;
        let p = kink_profile(KinkParams::new(beta, 0.0)?)?;
        let mut err = 0.0_f64;
        for i in 0..g.n {
            let x = g.x(i);
            err = err.max((r.result.first[i] - (p.q(x) - q0.q(x))).abs()).max((r.result.second[i] - p.q_t(x)).abs());
        }
        rep.check(Check::at_most(format!("boosted kink beta={beta}"), err, s.tol(CONSISTENCY), Basis::ClosedForm));
    }

    let mut tab = Table::new("manifold_momentum", &["delta", "momentum", "predicted", "beta_from_momentum", "beta_from_delta"]);
    let y0 = g.sample(|x| o.amplitude * x.tanh() / x.cosh());
    let yv = PerturbationPair::new(g, y0, vec![0.0; g.n], ParityTag::OddEven, 1e-12)?;
    let q = kink(KinkParams::static_kink())?.state(&g, 0.0)?;
    let rows = par::map(s.exec, &o.deltas, |&d| -> Result<Vec<f64>> {
        let r = construct_manifold_data(&yv, d, &opts)?;
        let st = add_pair(&q, &r.result.first, &r.result.second)?;
        let p = manifold_momentum(d)?;
        Ok(vec![d, momentum(&st)?, p, final_speed_from_momentum(p), final_speed_from_delta(d)?])
    });
    for row in rows {
        let row = row?;
        let d = row[0];
        rep.check(Check::at_most(
            format!("momentum identity delta={d}"),
            (row[1] - row[2]).abs(),
            s.tol(MOMENTUM_IDENTITY),
            Basis::ClosedForm,
        ));
        rep.check(Check::at_most(
            format!("final speed delta={d}"),
            (row[3] - row[4]).abs(),
            s.tol(FINAL_SPEED),
            Basis::Identity,
        ));
        tab.push(row);
    }
    rep.tables.push(tab);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Lifting / descent round trips

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoundTripOptions {
    pub half_width: f64,
    pub h: f64,
    pub samples: usize,
    pub amplitude: f64,
    pub wobbler_beta: f64,
    pub t: f64,
}

impl Default for RoundTripOptions {
    fn default() -> Self {
        RoundTripOptions { half_width: 40.0, h: 0.02, samples: 20, amplitude: 0.04, wobbler_beta: 0.4, t: 1.1 }
    }
}

/// The four maps composed with their inverses.
pub const ROUND_TRIPS: [&str; 4] = ["zero-kink-zero", "kink-zero-kink", "breather-wobbler-breather", "wobbler-breather-wobbler"];

fn pair_parity(p: &PerturbationPair, a: Parity, b: Parity) -> Result<f64> {
    Ok(parity_check(&p.first, &p.grid, a)?.max(parity_check(&p.second, &p.grid, b)?))
}

/// `(distance, parity defect of the intermediate result)` of one round trip.
fn round_trip(kind: &str, g: &Grid, o: &RoundTripOptions, seed: u64, stream: u64) -> Result<(f64, f64)> {
    let opts = SolverOptions::default();
    let mut rng = rng_for(seed, stream);
    let even = matches!(kind, "zero-kink-zero" | "breather-wobbler-breather");
    let par = if even { Parity::Even } else { Parity::Odd };
    let tag = if even { ParityTag::EvenEven } else { ParityTag::OddOdd };
    let a = random_profile(g, &mut rng, par, o.amplitude);
    let b = random_profile(g, &mut rng, par, o.amplitude);
    let input = PerturbationPair::new(*g, a, b, tag, 1e-12)?;
    let (mid, back) = match kind {
        "zero-kink-zero" => {
            let up = lift_zero_to_kink(&input, &opts)?;
            let down = descend_kink_to_zero(&up.result, &opts)?;
            (up.result, down.result)
        }
        "kink-zero-kink" => {
            let down = descend_kink_to_zero(&input, &opts)?;
            let up = lift_zero_to_kink(&down.result, &opts)?;
            (down.result, up.result)
        }
        "breather-wobbler-breather" => {
            let up = lift_breather_to_wobbler(&input, o.wobbler_beta, o.t, &opts)?;
            let down = descend_wobbler_to_breather(&up.result, o.wobbler_beta, o.t, &opts)?;
            (up.result, down.result)
        }
        "wobbler-breather-wobbler" => {
            let down = descend_wobbler_to_breather(&input, o.wobbler_beta, o.t, &opts)?;
            let up = lift_breather_to_wobbler(&down.result, o.wobbler_beta, o.t, &opts)?;
            (down.result, up.result)
        }
        other => return Err(Error::Parameter(format!("unknown round trip `{other}`"))),
    };
    // The intermediate data has the opposite parity.
    let mid_par = if even { Parity::Odd } else { Parity::Even };
    let parity = pair_parity(&mid, mid_par, mid_par)?.max(pair_parity(&back, par, par)?);
    Ok((back.max_distance(&input), parity))
}

pub fn round_trips(o: &RoundTripOptions, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let mut rep = Report::new("lifting and descent round trips");
    let mut tab = Table::new("round_trips", &["sample", "distance", "parity_defect"]);
    for (k, kind) in ROUND_TRIPS.iter().enumerate() {
        let cells: Vec<u64> = (0..o.samples as u64).collect();
        let out = par::map(s.exec, &cells, |&j| round_trip(kind, &g, o, s.seed.wrapping_add(j), k as u64));
        let (mut dist, mut parity) = (0.0_f64, 0.0_f64);
        for (j, r) in out.into_iter().enumerate() {
            let (d, p) = r?;
            tab.push_labeled(*kind, vec![j as f64, d, p]);
            dist = dist.max(d);
            parity = parity.max(p);
        }
        rep.check(Check::at_most(format!("round trip {kind}"), dist, s.tol(ROUND_TRIP), Basis::Identity));
        rep.check(Check::at_most(format!("parity {kind}"), parity, s.tol(PARITY), Basis::Identity));
    }
    rep.tables.push(tab);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Conservation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConservationOptions {
    pub half_width: f64,
    pub h: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Steps forward (then back) in the reversal check.
    pub reversal_steps: usize,
}

impl Default for ConservationOptions {
    fn default() -> Self {
        ConservationOptions { half_width: 40.0, h: 0.02, dt: 0.015, t_end: 50.0, reversal_steps: 2000 }
    }
}

fn drift_cases() -> Result<Vec<(Box<dyn Sampler>, Model, BackgroundKind)>> {
    Ok(vec![
        (Box::new(kink(KinkParams::static_kink())?), Model::SineGordon, BackgroundKind::None),
        (Box::new(kink(KinkParams::new(0.5, 10.0)?)?), Model::SineGordon, BackgroundKind::MovingKink { beta: 0.5, x0: 10.0 }),
        (Box::new(breather(0.5)?), Model::SineGordon, BackgroundKind::None),
        (Box::new(wobbler(WobblerParams { beta: 0.3 })?), Model::SineGordon, BackgroundKind::None),
        (Box::new(two_kink(0.5)?), Model::SineGordon, BackgroundKind::None),
        (Box::new(three_soliton(ThreeSolitonParams { beta: 0.4, v: 0.3 })?), Model::SineGordon, BackgroundKind::None),
        (Box::new(phi4_kink()), Model::Phi4, BackgroundKind::None),
    ])
}

/// `|slope| · T / |E₀|` of a least-squares line through the physical energy:
/// the secular part of the drift, without the bounded `O(dt²)` oscillation.
fn secular_trend(traj: &crate::evolver::Trajectory) -> f64 {
    let n = traj.log.len() as f64;
    let mt = traj.log.iter().map(|l| l.t).sum::<f64>() / n;
    let me = traj.log.iter().map(|l| l.energy).sum::<f64>() / n;
    let ste: f64 = traj.log.iter().map(|l| (l.t - mt) * (l.energy - me)).sum();
    let stt: f64 = traj.log.iter().map(|l| (l.t - mt) * (l.t - mt)).sum();
    let span = traj.log.last().map_or(0.0, |l| l.t) - traj.log[0].t;
    if stt == 0.0 {
        return 0.0;
    }
    (ste / stt * span).abs() / traj.log[0].energy.abs().max(f64::MIN_POSITIVE)
}

fn reversal_error(s0: &FieldState, cfg: &EvolveConfig, steps: usize, flip: bool) -> Result<f64> {
    let mut st = Stepper::new(s0, Model::SineGordon, cfg)?;
    let start = st.state();
    for _ in 0..steps {
        st.step()?;
    }
    if flip {
        st.reverse_velocity();
    }
    for _ in 0..steps {
        if flip {
            st.step()?;
        } else {
            st.step_back()?;
        }
    }
    if flip {
        st.reverse_velocity();
    }
    let end = st.state();
    Ok(max_abs_diff(&end.u, &start.u).max(max_abs_diff(&end.v, &start.v)))
}

pub fn conservation(o: &ConservationOptions, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let mut rep = Report::new("conservation and reversibility");
    let q = kink(KinkParams::static_kink())?.state(&g, 0.0)?;
    let e = energy(&q, Model::SineGordon)?;
    rep.check(Check::at_most("static kink energy", (e - 8.0).abs(), s.tol(KINK_ENERGY), Basis::ClosedForm));

    let cases = drift_cases()?;
    let mut tab = Table::new("energy_drift", &["shadow_drift", "physical_trend", "physical_deviation"]);
    let out = par::map(s.exec, &cases, |(f, model, bg)| -> Result<[f64; 3]> {
        let mut cfg = EvolveConfig::new(o.dt, o.t_end).with_background(*bg);
        cfg.log_every = 50;
        let traj = evolve(&f.state(&g, 0.0)?, *model, &cfg)?;
        Ok([traj.energy_drift(), secular_trend(&traj), traj.physical_drift()])
    });
    for ((f, _, _), r) in cases.iter().zip(out) {
        let [d, trend, dev] = r?;
        tab.push_labeled(f.label(), vec![d, trend, dev]);
        rep.check(Check::at_most(format!("energy drift {}", f.label()), d, s.tol(ENERGY_DRIFT), Basis::ClosedForm));
        rep.check(Check::at_most(format!("energy trend {}", f.label()), trend, s.tol(ENERGY_DRIFT), Basis::ClosedForm));
    }
    rep.tables.push(tab);

    let bump = |amp: f64, odd: bool| g.sample(|x| amp * if odd { x } else { 1.0 - x * x } * (-x * x).exp());
    let perturbed = add_pair(&q, &bump(0.2, false), &bump(0.1, true))?;
    let cfg = EvolveConfig::new(o.dt, 1.0);
    let mut worst = 0.0_f64;
    for bg in [BackgroundKind::StaticKink, BackgroundKind::MovingKink { beta: 0.3, x0: 0.0 }] {
        worst = worst.max(reversal_error(&perturbed, &cfg.with_background(bg), o.reversal_steps, false)?);
    }
    let b = breather(0.5)?.state(&g, 0.0)?;
    worst = worst.max(reversal_error(&b, &cfg, o.reversal_steps, true)?);
    rep.check(Check::at_most("time reversal", worst, s.tol(REVERSAL), Basis::Identity));
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Wobbler periodicity and orbital stability

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WobblerOptions {
    pub beta: f64,
    pub half_width: f64,
    pub h: f64,
    pub dt: f64,
    /// Size of the odd noise.
    pub eta: f64,
    pub t_end: f64,
    /// Time between distance samples.
    pub sample_every: f64,
    /// Pinned bound on `sup_t dist / η`.
    pub pinned_constant: f64,
}

impl Default for WobblerOptions {
    fn default() -> Self {
        WobblerOptions {
            beta: 0.3,
            half_width: 60.0,
            h: 0.02,
            dt: 0.015,
            eta: 1e-3,
            t_end: 100.0,
            sample_every: 1.0,
            pinned_constant: WOBBLER_ORBITAL_CONSTANT,
        }
    }
}

/// H¹×L² distance from `state` to `W(t + τ)`, minimized over `τ` near
/// `guess`. Returns `(τ, distance)`.
fn best_time_shift(w: &Wobbler, state: &FieldState, guess: f64, half: f64) -> Result<(f64, f64)> {
    let g = state.grid;
    let dist = |tau: f64| -> Result<f64> {
        let ws = w.state(&g, state.t + tau)?;
        let du = state.u.iter().zip(&ws.u).map(|(a, b)| a - b).collect();
        let dv = state.v.iter().zip(&ws.v).map(|(a, b)| a - b).collect();
        energy_norm(&PerturbationPair::untagged(g, du, dv)?)
    };
    let m = 20;
    let step = 2.0 * half / m as f64;
    let mut best = (guess, dist(guess)?);
    for k in 0..=m {
        let tau = guess - half + k as f64 * step;
        let d = dist(tau)?;
        if d < best.1 {
            best = (tau, d);
        }
    }
    // Golden-section refinement inside the bracketing cell.
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (dist(c)?, dist(d)?);
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = dist(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = dist(d)?;
        }
    }
    let tau = 0.5 * (a + b);
    let dm = dist(tau)?;
    Ok(if dm < best.1 { (tau, dm) } else { best })
}

fn orbital_run(w: &Wobbler, s0: &FieldState, o: &WobblerOptions) -> Result<Vec<(f64, f64, f64)>> {
    let mut cfg = EvolveConfig::new(o.dt, o.t_end);
    let (_, dt) = cfg.steps();
    cfg.snapshot_every = ((o.sample_every / dt).round() as usize).max(1);
    cfg.log_every = 0;
    let traj = evolve(s0, Model::SineGordon, &cfg)?;
    let mut out = vec![];
    let mut guess = 0.0;
    for snap in &traj.snapshots {
        let (tau, d) = best_time_shift(w, snap, guess, 0.5)?;
        guess = tau;
        out.push((snap.t, tau, d));
    }
    Ok(out)
}

pub fn wobbler_stability(o: &WobblerOptions, s: &Settings) -> Result<Report> {
    let w = wobbler(WobblerParams { beta: o.beta })?;
    let g = Grid::symmetric(o.half_width, o.h)?;
    let mut rep = Report::new("wobbler periodicity and orbital stability");
    let s0 = w.state(&g, 0.0)?;

    let p = w.period();
    let dt = p / (p / o.dt).ceil();
    let traj = evolve(&s0, Model::SineGordon, &EvolveConfig::new(dt, p))?;
    let f = traj.final_state();
    let per = max_abs_diff(&f.u, &s0.u).max(max_abs_diff(&f.v, &s0.v));
    rep.check(Check::at_most("wobbler periodicity", per, s.tol(PERIODICITY), Basis::ClosedForm));

    let mut rng = rng_for(s.seed, 100);
    // Noise of H¹×L² size η, so the distance starts at η.
    let du = random_profile(&g, &mut rng, Parity::Odd, 1.0);
    let dv = random_profile(&g, &mut rng, Parity::Odd, 1.0);
    let nrm = energy_norm(&PerturbationPair::untagged(g, du.clone(), dv.clone())?)?;
    let scale = |f: Vec<f64>| -> Vec<f64> { f.into_iter().map(|v| o.eta * v / nrm).collect() };
    let noisy = add_pair(&s0, &scale(du), &scale(dv))?;
    let starts = [s0.clone(), noisy];
    let runs = par::map(s.exec, &starts, |st| orbital_run(&w, st, o));
    let mut runs = runs.into_iter();
    let base = runs.next().expect("two runs")?;
    let pert = runs.next().expect("two runs")?;
    let mut tab = Table::new("wobbler_orbit", &["t", "time_shift", "distance", "baseline_distance"]);
    for (a, b) in pert.iter().zip(&base) {
        tab.push(vec![a.0, a.1, a.2, b.2]);
    }
    let sup = pert.iter().map(|r| r.2).fold(0.0, f64::max);
    let sup0 = base.iter().map(|r| r.2).fold(0.0, f64::max);
    let c = sup / o.eta;
    rep.notes.push(format!(
        "orbital constant C = sup dist / eta = {c:.4} (unperturbed discretization floor {:.4})",
        sup0 / o.eta
    ));
    rep.check(Check::at_most("orbital constant", c, o.pinned_constant, Basis::Regression));
    rep.tables.push(tab);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Asymptotic stability on the zero-momentum manifold

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityOptions {
    pub etas: Vec<f64>,
    pub seeds: usize,
    pub half_width: f64,
    pub h: f64,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub interval: (f64, f64),
    pub weight_rate: f64,
    /// Pinned bound on the ratio `max|ρ′| / weighted zero-side norm`.
    pub ratio_constant: f64,
    /// Speed of the moving-kink control.
    pub control_beta: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            etas: vec![0.02, 0.04, 0.08],
            seeds: 3,
            half_width: 120.0,
            h: 0.02,
            dt: 0.015,
            t_end: 200.0,
            record_every: 10,
            interval: (-5.0, 5.0),
            weight_rate: VACUUM_WEIGHT,
            ratio_constant: RATE_RATIO_CONSTANT,
            control_beta: 0.3,
        }
    }
}

/// Kink-side and zero-side data `(Q, 0) + Φ(y₀, 0, 0)` and `(y₀, 0)`.
pub fn manifold_initial_data(g: &Grid, y0: Vec<f64>) -> Result<(FieldState, FieldState)> {
    let yv = PerturbationPair::new(*g, y0, vec![0.0; g.n], ParityTag::OddEven, 1e-12)?;
    let rep = construct_manifold_data(&yv, 0.0, &SolverOptions::default())?;
    let q = kink(KinkParams::static_kink())?.state(g, 0.0)?;
    let ks = add_pair(&q, &rep.result.first, &rep.result.second)?;
    let zs = FieldState::new(0.0, *g, yv.first, yv.second)?;
    Ok((ks, zs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRun {
    pub eta: f64,
    pub seed: u64,
    pub run: TrackRun,
}

/// One tracked run per `(η, seed)`, in row-major order over `etas`.
pub fn stability_runs(o: &StabilityOptions, s: &Settings) -> Result<Vec<StabilityRun>> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let cells: Vec<(f64, u64)> =
        o.etas.iter().flat_map(|&e| (0..o.seeds as u64).map(move |k| (e, k))).collect();
    let cfg = EvolveConfig::new(o.dt, o.t_end).with_stencil(Stencil::Fourth);
    let tc = TrackConfig {
        intervals: vec![o.interval],
        weight_rate: o.weight_rate,
        record_every: o.record_every,
        ..TrackConfig::default()
    };
    par::map(s.exec, &cells, |&(eta, k)| -> Result<StabilityRun> {
        let seed = s.seed.wrapping_add(k);
        let mut rng = rng_for(seed, 200);
        let y0 = random_profile(&g, &mut rng, Parity::Odd, eta);
        let (ks, zs) = manifold_initial_data(&g, y0)?;
        Ok(StabilityRun { eta, seed, run: track(&ks, Some(&zs), &cfg, &tc, false)? })
    })
    .into_iter()
    .collect()
}

/// Time series with the fixed probe header.
pub fn modulation_series(name: impl Into<String>, run: &TrackRun) -> Table {
    let mut t = Table::new(name, &["t", "rho", "rho_rate", "energy", "momentum", "local_norm_I", "weighted_norm"]);
    for r in &run.records {
        let ln = r.local_norms.first().map_or(f64::NAN, |l| l.2);
        t.push(vec![r.t, r.rho, r.rho_rate, r.energy, r.momentum, ln, r.weighted_norm]);
    }
    t
}

pub fn stability(o: &StabilityOptions, s: &Settings) -> Result<Report> {
    let runs = stability_runs(o, s)?;
    stability_report(o, s, &runs)
}

pub fn stability_report(o: &StabilityOptions, s: &Settings, runs: &[StabilityRun]) -> Result<Report> {
    let mut rep = Report::new("asymptotic stability on the zero-momentum manifold");
    let mut summary = Table::new(
        "stability_runs",
        &["eta", "seed", "max_rho_rate", "rate_ratio", "max_momentum", "local_norm_0", "local_norm_T", "rho_final", "stopped"],
    );
    let (mut worst_p, mut worst_ratio, mut worst_decay) = (0.0_f64, 0.0_f64, 0.0_f64);
    for r in runs {
        let rec = &r.run.records;
        if let Some(why) = &r.run.stopped {
            rep.notes.push(format!("eta={} seed={}: stopped early: {why}", r.eta, r.seed));
        }
        let rate = rho_rate_check(rec, RATE_EPS);
        let p = rec.iter().map(|x| x.momentum.abs()).fold(0.0, f64::max);
        let ln = |x: &crate::modulation::ModulationRecord| x.local_norms.first().map_or(f64::NAN, |l| l.2);
        let (n0, n1) = match (rec.first(), rec.last()) {
            (Some(a), Some(b)) => (ln(a), ln(b)),
            _ => (f64::NAN, f64::NAN),
        };
        let reached = rec.last().is_some_and(|x| (x.t - o.t_end).abs() < 1e-6);
        let decay = if reached { n1 / n0 } else { f64::INFINITY };
        worst_p = worst_p.max(p);
        worst_ratio = worst_ratio.max(rate.ratio_rate_zero_side);
        worst_decay = worst_decay.max(decay);
        let rho_final = rec.last().map_or(f64::NAN, |x| x.rho);
        let stopped = if r.run.stopped.is_some() { 1.0 } else { 0.0 };
        summary.push(vec![r.eta, r.seed as f64, rate.max_lhs, rate.ratio_rate_zero_side, p, n0, n1, rho_final, stopped]);
        if let Classification::Excursion { .. } = convergence_classifier(rec).class {
            rep.notes.push(format!("eta={} seed={}: shift did not settle", r.eta, r.seed));
        }
        rep.tables.push(modulation_series(format!("series_eta{}_seed{}", r.eta, r.seed), &r.run));
    }
    rep.check(Check::at_most("zero momentum", worst_p, s.tol(ZERO_MOMENTUM), Basis::ClosedForm));

    // Slope from the per-η geometric mean over seeds.
    let mut scaling = Table::new("rate_scaling", &["eta", "max_rho_rate_geomean"]);
    let mut etas = vec![];
    let mut rates = vec![];
    for &eta in &o.etas {
        let vals: Vec<f64> = summary.rows.iter().filter(|r| r[0] == eta).map(|r| r[2]).collect();
        let gm = (vals.iter().map(|v| v.ln()).sum::<f64>() / vals.len() as f64).exp();
        scaling.push(vec![eta, gm]);
        etas.push(eta);
        rates.push(gm);
    }
    let slope = if etas.len() >= 2 { loglog_slope(&etas, &rates) } else { f64::NAN };
    rep.check(Check::near("rate slope", slope, SLOPE_TARGET, SLOPE_WINDOW, Basis::Predicted));
    rep.check(Check::at_most("rate ratio constant", worst_ratio, o.ratio_constant, Basis::Regression));
    rep.check(Check::at_most("local decay", worst_decay, DECAY_FACTOR, Basis::Artifact));

    // Moving kinks carry momentum −4βγ and are therefore off the manifold.
    let g = Grid::symmetric(o.half_width.min(40.0), o.h)?;
    let b = o.control_beta;
    let pc = momentum(&kink(KinkParams::new(b, 0.0)?)?.state(&g, 0.0)?)?;
    rep.check(Check::at_most(
        format!("moving kink momentum beta={b}"),
        (pc - kink_momentum(b)).abs(),
        s.tol(MOMENTUM_IDENTITY),
        Basis::ClosedForm,
    ));
    rep.tables.push(summary);
    rep.tables.push(scaling);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Vacuum decay

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VacuumOptions {
    pub amplitude: f64,
    pub half_width: f64,
    pub h: f64,
    pub dt: f64,
    pub t_end: f64,
    pub log_every: usize,
    pub interval: (f64, f64),
    pub weight_rate: f64,
    /// Number of windows for the trend check.
    pub windows: usize,
    /// Largest accepted share of the cumulative integral gained in the
    /// second half of the run.
    pub plateau: f64,
}

impl Default for VacuumOptions {
    fn default() -> Self {
        VacuumOptions {
            amplitude: 0.2,
            half_width: 120.0,
            h: 0.02,
            dt: 0.015,
            t_end: 200.0,
            log_every: 20,
            interval: (-5.0, 5.0),
            weight_rate: VACUUM_WEIGHT,
            windows: 5,
            plateau: PLATEAU_SHARE,
        }
    }
}

pub fn vacuum_decay(o: &VacuumOptions, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let mut rng = rng_for(s.seed, 300);
    let y0 = random_profile(&g, &mut rng, Parity::Odd, o.amplitude);
    let v0 = random_profile(&g, &mut rng, Parity::Odd, 0.5 * o.amplitude);
    let s0 = FieldState::new(0.0, g, y0, v0)?;
    let mut cfg = EvolveConfig::new(o.dt, o.t_end);
    cfg.log_every = o.log_every.max(1);
    let probes = [Probe::LocalEnergyNorm(o.interval.0, o.interval.1), Probe::WeightedNorm(WeightSpec::new(o.weight_rate, 0.0)?)];
    let series = evolve_probe_state(&s0, Model::SineGordon, &cfg, &probes)?;
    let local = series.columns[0].1.clone();
    let weighted = series.columns[1].1.clone();
    let t = series.t.clone();

    let mut partial = vec![0.0; t.len()];
    for k in 1..t.len() {
        partial[k] = partial[k - 1] + 0.5 * (t[k] - t[k - 1]) * (weighted[k] + weighted[k - 1]);
    }
    let mut tab = Table::new("vacuum_decay", &["t", "local_norm_I", "weighted_norm", "partial_integral"]);
    for k in 0..t.len() {
        tab.push(vec![t[k], local[k], weighted[k], partial[k]]);
    }

    let mut rep = Report::new("odd vacuum decay");
    let nw = o.windows.max(2);
    let maxima: Vec<f64> = (0..nw)
        .map(|w| {
            let (a, b) = (o.t_end * w as f64 / nw as f64, o.t_end * (w + 1) as f64 / nw as f64);
            t.iter().zip(&local).filter(|(x, _)| **x >= a && **x <= b).map(|(_, v)| *v).fold(0.0, f64::max)
        })
        .collect();
    let growth = maxima.windows(2).map(|p| p[1] / p[0]).fold(0.0, f64::max);
    rep.check(Check::at_most("vacuum window maxima ratio", growth, 1.0, Basis::Artifact));
    let last = local.last().copied().unwrap_or(f64::NAN);
    rep.check(Check::at_most("vacuum local decay", last / local[0], DECAY_FACTOR, Basis::Artifact));
    let half = t.iter().position(|x| *x >= 0.5 * o.t_end).unwrap_or(0);
    let total = partial.last().copied().unwrap_or(f64::NAN);
    let share = (total - partial[half]) / total;
    rep.check(Check::at_most("vacuum integral plateau", share, o.plateau, Basis::Artifact));
    let mut wt = Table::new("window_maxima", &["window", "max_local_norm"]);
    for (k, m) in maxima.iter().enumerate() {
        wt.push(vec![k as f64, *m]);
    }
    rep.tables.push(tab);
    rep.tables.push(wt);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Final speed from the momentum against the one from `δ`.
    FinalSpeed,
    /// Energy drift against the resolution.
    Drift,
    /// 3-soliton against the wobbler as `v → 0`.
    ThreeSoliton,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub kinds: Vec<SweepKind>,
    pub deltas: Vec<f64>,
    pub spacings: Vec<f64>,
    pub drift_t_end: f64,
    pub beta: f64,
    pub speeds: Vec<f64>,
    pub t: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            kinds: vec![SweepKind::FinalSpeed, SweepKind::Drift, SweepKind::ThreeSoliton],
            deltas: vec![-0.5, -0.2, -0.1, 0.0, 0.1, 0.2, 0.5, 1.0, 3.0],
            spacings: vec![0.04, 0.02, 0.01],
            drift_t_end: 20.0,
            beta: 0.3,
            speeds: vec![0.2, 0.1, 0.05, 0.025, 0.0125, 0.0],
            t: 1.0,
        }
    }
}

/// Runs each cell through `f`; failed cells become `NaN` rows plus a note.
fn sweep_cells<F>(s: &Settings, params: &[f64], width: usize, rep: &mut Report, what: &str, f: F) -> Vec<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    par::map(s.exec, params, |&p| f(p))
        .into_iter()
        .zip(params)
        .map(|(r, &p)| match r {
            Ok(row) => row,
            Err(e) => {
                rep.notes.push(format!("{what} cell {p}: {e}"));
                let mut row = vec![f64::NAN; width];
                row[0] = p;
                row
            }
        })
        .collect()
}

pub fn sweep(o: &SweepOptions, s: &Settings) -> Result<Report> {
    let mut rep = Report::new("parameter sweeps");
    for kind in &o.kinds {
        match kind {
            SweepKind::FinalSpeed => {
                let mut tab = Table::new("final_speed", &["delta", "momentum", "beta_from_momentum", "beta_from_delta"]);
                let rows = sweep_cells(s, &o.deltas, 4, &mut rep, "final-speed", |d| {
                    let p = manifold_momentum(d)?;
                    Ok(vec![d, p, final_speed_from_momentum(p), final_speed_from_delta(d)?])
                });
                let worst = rows.iter().map(|r| (r[2] - r[3]).abs()).fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) });
                rep.check(Check::at_most("final speed equivalence", worst, s.tol(FINAL_SPEED), Basis::Identity));
                tab.rows = rows;
                rep.tables.push(tab);
            }
            SweepKind::Drift => {
                let mut tab = Table::new("drift_vs_resolution", &["h", "dt", "shadow_drift", "physical_drift"]);
                let w = wobbler(WobblerParams { beta: o.beta })?;
                let rows = sweep_cells(s, &o.spacings, 4, &mut rep, "drift", |h| {
                    let g = Grid::symmetric(60.0, h)?;
                    let dt = 0.75 * h;
                    let mut cfg = EvolveConfig::new(dt, o.drift_t_end);
                    cfg.log_every = ((0.5 / dt).round() as usize).max(1);
                    let traj = evolve(&w.state(&g, 0.0)?, Model::SineGordon, &cfg)?;
                    Ok(vec![h, dt, traj.energy_drift(), traj.physical_drift()])
                });
                for r in &rows {
                    rep.check(Check::at_most(format!("drift h={}", r[0]), r[2], s.tol(ENERGY_DRIFT), Basis::ClosedForm));
                }
                tab.rows = rows;
                rep.tables.push(tab);
            }
            SweepKind::ThreeSoliton => {
                let mut tab = Table::new("three_soliton_limit", &["v", "max_distance"]);
                let g = Grid::standard();
                let w = wobbler(WobblerParams { beta: o.beta })?.state(&g, o.t)?;
                let rows = sweep_cells(s, &o.speeds, 2, &mut rep, "three-soliton", |v| {
                    let ts = three_soliton(ThreeSolitonParams { beta: o.beta, v })?.state(&g, o.t)?;
                    Ok(vec![v, max_abs_diff(&ts.u, &w.u).max(max_abs_diff(&ts.v, &w.v))])
                });
                let moving: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] != 0.0).collect();
                let growth = moving.windows(2).map(|p| p[1][1] / p[0][1]).fold(0.0, f64::max);
                rep.check(Check::at_most("three-soliton distance ratio", growth, 1.0, Basis::Artifact));
                if let Some(r) = rows.iter().find(|r| r[0] == 0.0) {
                    rep.check(Check::at_most("three-soliton at v=0", r[1], s.tol(CONSISTENCY), Basis::ClosedForm));
                }
                tab.rows = rows;
                rep.tables.push(tab);
            }
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Single evolutions

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Solution {
    Kink { beta: f64, x0: f64 },
    Breather { beta: f64 },
    Wobbler { beta: f64 },
    TwoKink { beta: f64 },
    ThreeSoliton { beta: f64, v: f64 },
    Phi4Kink,
    /// `(Q, 0) + Φ(y₀, 0, 0)` with a seeded odd `y₀` of size `eta`.
    Manifold { eta: f64 },
}

impl Solution {
    pub fn model(&self) -> Model {
        match self {
            Solution::Phi4Kink => Model::Phi4,
            _ => Model::SineGordon,
        }
    }

    /// Speed of the kink whose shift is tracked, if any.
    pub fn tracked_speed(&self) -> Option<f64> {
        match *self {
            Solution::Kink { beta, .. } => Some(beta),
            Solution::Wobbler { .. } | Solution::ThreeSoliton { .. } | Solution::Manifold { .. } => Some(0.0),
            _ => None,
        }
    }

    /// Closed-form sampler, when there is one.
    pub fn sampler(&self) -> Result<Option<Box<dyn Sampler>>> {
        Ok(Some(match *self {
            Solution::Kink { beta, x0 } => Box::new(kink(KinkParams::new(beta, x0)?)?),
            Solution::Breather { beta } => Box::new(breather(beta)?),
            Solution::Wobbler { beta } => Box::new(wobbler(WobblerParams { beta })?),
            Solution::TwoKink { beta } => Box::new(two_kink(beta)?),
            Solution::ThreeSoliton { beta, v } => Box::new(three_soliton(ThreeSolitonParams { beta, v })?),
            Solution::Phi4Kink => Box::new(phi4_kink()),
            Solution::Manifold { .. } => return Ok(None),
        }))
    }

    pub fn initial_state(&self, g: &Grid, seed: u64) -> Result<FieldState> {
        match *self {
            Solution::Manifold { eta } => {
                let mut rng = rng_for(seed, 200);
                let y0 = random_profile(g, &mut rng, Parity::Odd, eta);
                Ok(manifold_initial_data(g, y0)?.0)
            }
            _ => self.sampler()?.expect("closed form").state(g, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveOptions {
    pub solution: Solution,
    pub half_width: f64,
    pub h: f64,
    pub config: EvolveConfig,
    pub interval: (f64, f64),
    pub weight_rate: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        let mut config = EvolveConfig::new(0.015, 20.0);
        config.log_every = 20;
        EvolveOptions {
            solution: Solution::Wobbler { beta: 0.3 },
            half_width: 40.0,
            h: 0.02,
            config,
            interval: (-5.0, 5.0),
            weight_rate: VACUUM_WEIGHT,
        }
    }
}

/// Evolves one solution and records the probe columns
/// `t, rho, rho_rate, energy, momentum, local_norm_I, weighted_norm`.
pub fn evolve_solution(o: &EvolveOptions, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let s0 = o.solution.initial_state(&g, s.seed)?;
    let model = o.solution.model();
    let mut st = Stepper::with_exec(&s0, model, &o.config, s.exec)?;
    let every = o.config.log_every.max(1);
    let (n, _) = o.config.steps();
    let weight = WeightSpec::new(o.weight_rate, 0.0)?;
    let moving = matches!(o.config.background, BackgroundKind::MovingKink { .. });
    let mut series = Table::new("evolve", &["t", "rho", "rho_rate", "energy", "momentum", "local_norm_I", "weighted_norm"]);
    let mut shadow = vec![];
    let mut guess = 0.0;
    for k in 0..=n {
        if k > 0 {
            st.step()?;
        }
        if k % every != 0 && k != n {
            continue;
        }
        let full = st.state();
        let pert = st.perturbation();
        let rho = match o.solution.tracked_speed() {
            Some(beta) => {
                let opts = crate::modulation::ShiftOptions { tube: f64::INFINITY, ..Default::default() };
                let r = crate::modulation::solve_shift_with(&full, beta, guess, &opts)?.rho;
                guess = r;
                r
            }
            None => f64::NAN,
        };
        series.push(vec![
            st.t(),
            rho,
            f64::NAN,
            energy(&full, model)?,
            momentum(&full)?,
            crate::field::local_energy_norm(&pert, o.interval)?,
            crate::field::weighted_norm_sq(&pert, &weight)?,
        ]);
        shadow.push(st.shadow_energy());
    }
    let rows = series.rows.len();
    for k in 0..rows {
        let (a, b) = (k.saturating_sub(1), (k + 1).min(rows - 1));
        if b > a {
            series.rows[k][2] = (series.rows[b][1] - series.rows[a][1]) / (series.rows[b][0] - series.rows[a][0]);
        }
    }
    let mut rep = Report::new(format!("evolution of {}", o.solution_label()));
    let e0 = series.rows[0][3].abs().max(f64::MIN_POSITIVE);
    if !moving {
        let drift = shadow.iter().map(|v| (v - shadow[0]).abs()).fold(0.0, f64::max) / e0;
        rep.check(Check::at_most("energy drift", drift, s.tol(ENERGY_DRIFT), Basis::ClosedForm));
    } else {
        let dev = series.rows.iter().map(|r| (r[3] - series.rows[0][3]).abs()).fold(0.0, f64::max) / e0;
        rep.notes.push(format!("moving frame: physical energy deviation {dev:e}, no shadow energy"));
    }
    if let Some(f) = o.solution.sampler()? {
        let exact = f.state(&g, st.t())?;
        let end = st.state();
        let err = max_abs_diff(&end.u, &exact.u).max(max_abs_diff(&end.v, &exact.v));
        rep.notes.push(format!("max error against the closed form at t = {}: {err:e}", st.t()));
    }
    rep.tables.push(series);
    Ok(rep)
}

impl EvolveOptions {
    fn solution_label(&self) -> String {
        match self.solution {
            Solution::Kink { beta, x0 } => format!("kink(beta={beta}, x0={x0})"),
            Solution::Breather { beta } => format!("breather(beta={beta})"),
            Solution::Wobbler { beta } => format!("wobbler(beta={beta})"),
            Solution::TwoKink { beta } => format!("two_kink(beta={beta})"),
            Solution::ThreeSoliton { beta, v } => format!("three_soliton(beta={beta}, v={v})"),
            Solution::Phi4Kink => "phi4_kink".into(),
            Solution::Manifold { eta } => format!("manifold(eta={eta})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Lifting and descent on given data

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// Vacuum side ↔ static kink side.
    ZeroKink,
    /// Breather side ↔ wobbler side.
    BreatherWobbler,
    /// The manifold map `Φ(y₀, v₀, δ)` (lift only).
    Manifold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapOptions {
    pub map: MapKind,
    pub half_width: f64,
    pub h: f64,
    /// Size of the seeded random input when no data is given.
    pub amplitude: f64,
    pub beta: f64,
    pub t: f64,
    pub delta: f64,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions { map: MapKind::ZeroKink, half_width: 40.0, h: 0.02, amplitude: 0.04, beta: 0.4, t: 1.1, delta: 0.0 }
    }
}

fn random_input(o: &MapOptions, g: &Grid, first: Parity, second: Parity, seed: u64) -> Result<PerturbationPair> {
    let mut rng = rng_for(seed, 400);
    let a = random_profile(g, &mut rng, first, o.amplitude);
    let b = random_profile(g, &mut rng, second, o.amplitude);
    PerturbationPair::untagged(*g, a, b)
}

fn map_report(
    title: &str,
    input: &PerturbationPair,
    out: &crate::backlund::LiftReport,
    back: &PerturbationPair,
    parity: (Parity, Parity),
    s: &Settings,
) -> Result<Report> {
    let mut rep = Report::new(title);
    let g = &input.grid;
    let opts = SolverOptions::default();
    rep.check(Check::at_most("solver residual", out.final_residual, opts.tol, Basis::Identity));
    rep.check(Check::at_most("transformation defect", out.bt_defect, s.tol(CONSISTENCY), Basis::Identity));
    rep.check(Check::at_most("parity", pair_parity(&out.result, parity.0, parity.1)?, s.tol(PARITY), Basis::Identity));
    rep.check(Check::at_most("round trip", back.max_distance(input), s.tol(ROUND_TRIP), Basis::Identity));
    if let Some((c, m)) = out.compatibility {
        rep.notes.push(format!("compatibility integral {c:e}, sweep mismatch {m:e}"));
    }
    rep.notes.push(format!("iterations {}, integrating-factor exponent {}", out.iterations, out.nu0));
    let mut tab = Table::new("result", &["x", "first", "second"]);
    for i in 0..g.n {
        tab.push(vec![g.x(i), out.result.first[i], out.result.second[i]]);
    }
    let mut hist = Table::new("history", &["iteration", "residual"]);
    for (k, r) in out.history.iter().enumerate() {
        hist.push(vec![k as f64, *r]);
    }
    rep.tables.push(tab);
    rep.tables.push(hist);
    Ok(rep)
}

/// Lifts `input` (or seeded random data of the right parity) to the kink
/// side and reports the map together with the round trip through its inverse.
pub fn lift(o: &MapOptions, input: Option<PerturbationPair>, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let opts = SolverOptions::default();
    match o.map {
        MapKind::ZeroKink | MapKind::BreatherWobbler => {
            let yv = match input {
                Some(p) => p,
                None => random_input(o, &g, Parity::Even, Parity::Even, s.seed)?,
            };
            let yv = PerturbationPair::new(yv.grid, yv.first, yv.second, ParityTag::EvenEven, s.tol(PARITY))?;
            let (up, down) = if o.map == MapKind::ZeroKink {
                let up = lift_zero_to_kink(&yv, &opts)?;
                let down = descend_kink_to_zero(&up.result, &opts)?;
                (up, down)
            } else {
                let up = lift_breather_to_wobbler(&yv, o.beta, o.t, &opts)?;
                let down = descend_wobbler_to_breather(&up.result, o.beta, o.t, &opts)?;
                (up, down)
            };
            map_report("lift", &yv, &up, &down.result, (Parity::Odd, Parity::Odd), s)
        }
        MapKind::Manifold => {
            let yv = match input {
                Some(p) => p,
                None => random_input(o, &g, Parity::Odd, Parity::Even, s.seed)?,
            };
            let yv = PerturbationPair::new(yv.grid, yv.first, yv.second, ParityTag::OddEven, s.tol(PARITY))?;
            let r = construct_manifold_data(&yv, o.delta, &opts)?;
            let mut rep = Report::new("manifold map");
            let q = kink(KinkParams::static_kink())?.state(&yv.grid, 0.0)?;
            let st = add_pair(&q, &r.result.first, &r.result.second)?;
            let p = momentum(&st)?;
            let p_in = momentum(&FieldState::new(0.0, yv.grid, yv.first.clone(), yv.second.clone())?)?;
            // The map carries the vacuum-side momentum over unchanged.
            rep.notes.push(format!("kink-side momentum {p:e}, vacuum-side momentum {p_in:e}"));
            rep.check(Check::at_most("solver residual", r.final_residual, opts.tol, Basis::Identity));
            rep.check(Check::at_most("transformation defect", r.bt_defect, s.tol(CONSISTENCY), Basis::Identity));
            rep.check(Check::at_most(
                "parity",
                pair_parity(&r.result, Parity::Odd, Parity::Even)?,
                s.tol(PARITY),
                Basis::Identity,
            ));
            rep.check(Check::at_most(
                "momentum identity",
                (p - p_in - manifold_momentum(o.delta)?).abs(),
                s.tol(MOMENTUM_IDENTITY),
                Basis::ClosedForm,
            ));
            let mut tab = Table::new("result", &["x", "first", "second"]);
            for i in 0..yv.grid.n {
                tab.push(vec![yv.grid.x(i), r.result.first[i], r.result.second[i]]);
            }
            rep.tables.push(tab);
            Ok(rep)
        }
    }
}

/// Descends `input` (or seeded random odd data) to the zero or breather side.
pub fn descend(o: &MapOptions, input: Option<PerturbationPair>, s: &Settings) -> Result<Report> {
    let g = Grid::symmetric(o.half_width, o.h)?;
    let opts = SolverOptions::default();
    let us = match input {
        Some(p) => p,
        None => random_input(o, &g, Parity::Odd, Parity::Odd, s.seed)?,
    };
    let us = PerturbationPair::new(us.grid, us.first, us.second, ParityTag::OddOdd, s.tol(PARITY))?;
    let (down, up) = match o.map {
        MapKind::ZeroKink => {
            let down = descend_kink_to_zero(&us, &opts)?;
            let up = lift_zero_to_kink(&down.result, &opts)?;
            (down, up)
        }
        MapKind::BreatherWobbler => {
            let down = descend_wobbler_to_breather(&us, o.beta, o.t, &opts)?;
            let up = lift_breather_to_wobbler(&down.result, o.beta, o.t, &opts)?;
            (down, up)
        }
        MapKind::Manifold => return Err(Error::Parameter("the manifold map has no descent; use zero-kink".into())),
    };
    map_report("descent", &us, &down, &up.result, (Parity::Even, Parity::Even), s)
}

// ---------------------------------------------------------------------------
// Snapshot tables of the closed forms

/// Snapshots of the wobbler, the breather, the wobbler minus the kink and
/// the 3-soliton, one column per time.
pub fn figure_tables() -> Result<Vec<Table>> {
    let g = Grid::symmetric(20.0, 0.05)?;
    let times = [0.0, 2.0, 6.0];
    let w = wobbler(WobblerParams { beta: 0.5 })?;
    let b = breather(0.5)?;
    let q = kink_profile(KinkParams::static_kink())?;
    let snap = |name: &str, f: &dyn Fn(f64, f64) -> f64, ts: &[f64], grid: &Grid| {
        let cols: Vec<String> = std::iter::once("x".to_string()).chain(ts.iter().map(|t| format!("t={t}"))).collect();
        let refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
        let mut tab = Table::new(name, &refs);
        for i in 0..grid.n {
            let x = grid.x(i);
            tab.push(std::iter::once(x).chain(ts.iter().map(|&t| f(t, x))).collect());
        }
        tab
    };
    let wide = Grid::symmetric(40.0, 0.05)?;
    let ts = three_soliton(ThreeSolitonParams { beta: 0.5, v: 0.4 })?;
    Ok(vec![
        snap("wobbler", &|t, x| w.value(t, x), &times, &g),
        snap("breather", &|t, x| b.value(t, x), &times, &g),
        snap("wobbler_minus_kink", &|t, x| w.value(t, x) - q.q(x), &times, &g),
        snap("wobbler_velocity", &|t, x| w.time_derivative(t, x), &times, &g),
        snap("three_soliton", &|t, x| ts.value(t, x), &[-55.3, 0.0, 55.3], &wide),
    ])
}
