//! Closed-form solutions and linear modes.
//!
//! Every sampler is a pure map `(t, x) ↦ (φ, φ_t)`. Spatial derivatives are
//! analytic where the formulas are short and fall back to a centered
//! difference otherwise.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldState, Grid};

pub trait Sampler: Send + Sync {
    /// `(φ(t, x), φ_t(t, x))`.
    fn eval(&self, t: f64, x: f64) -> (f64, f64);

    fn label(&self) -> String;

    fn value(&self, t: f64, x: f64) -> f64 {
        self.eval(t, x).0
    }

    fn time_derivative(&self, t: f64, x: f64) -> f64 {
        self.eval(t, x).1
    }

    /// `φ_x(t, x)`.
    fn dx(&self, t: f64, x: f64) -> f64 {
        let e = 1e-5 * (1.0 + x.abs()).min(10.0);
        (self.value(t, x + e) - self.value(t, x - e)) / (2.0 * e)
    }

    fn state(&self, grid: &Grid, t: f64) -> Result<FieldState> {
        let mut u = Vec::with_capacity(grid.n);
        let mut v = Vec::with_capacity(grid.n);
        for i in 0..grid.n {
            let (a, b) = self.eval(t, grid.x(i));
            u.push(a);
            v.push(b);
        }
        FieldState::new(t, *grid, u, v)
    }
}

/// Complex-valued modes, stored as `(re, im)` pairs.
pub trait ComplexSampler: Send + Sync {
    /// `([re φ, im φ], [re φ_t, im φ_t])`.
    fn eval_c(&self, t: f64, x: f64) -> ([f64; 2], [f64; 2]);
}

fn sech(x: f64) -> f64 {
    let a = x.abs();
    if a > 700.0 {
        0.0
    } else {
        let e = (-a).exp();
        2.0 * e / (1.0 + e * e)
    }
}

/// `4 arctan(e^z)` without overflow.
fn four_atan_exp(z: f64) -> f64 {
    if z > 0.0 {
        2.0 * PI - 4.0 * (-z).exp().atan()
    } else {
        4.0 * z.exp().atan()
    }
}

/// `m · e^e`, for products of hyperbolic functions far past overflow.
#[derive(Clone, Copy, Debug)]
struct Scaled {
    m: f64,
    e: f64,
}

impl Scaled {
    fn cosh(z: f64) -> Self {
        let a = z.abs();
        Scaled { m: 0.5 * (1.0 + (-2.0 * a).exp()), e: a }
    }

    fn sinh(z: f64) -> Self {
        let a = z.abs();
        Scaled { m: 0.5 * z.signum() * (-(-2.0 * a).exp_m1()), e: a }
    }

    fn plain(v: f64) -> Self {
        Scaled { m: v, e: 0.0 }
    }

    fn mul(self, o: Scaled) -> Self {
        Scaled { m: self.m * o.m, e: self.e + o.e }
    }

    fn scale(self, c: f64) -> Self {
        Scaled { m: self.m * c, e: self.e }
    }

    /// Value times `e^{−s}`.
    fn at(self, s: f64) -> f64 {
        self.m * (self.e - s).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkParams {
    pub beta: f64,
    pub x0: f64,
}

impl KinkParams {
    pub fn new(beta: f64, x0: f64) -> Result<Self> {
        if !(beta.abs() < 1.0) || !x0.is_finite() {
            return Err(Error::Parameter(format!("kink speed must satisfy |beta| < 1, got {beta}")));
        }
        Ok(KinkParams { beta, x0 })
    }

    pub fn static_kink() -> Self {
        KinkParams { beta: 0.0, x0: 0.0 }
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.beta * self.beta).sqrt()
    }
}

/// Travelling kink `4 arctan e^{γ(x − βt + x₀)}`.
#[derive(Debug, Clone, Copy)]
pub struct Kink {
    pub p: KinkParams,
}

pub fn kink(p: KinkParams) -> Result<Kink> {
    KinkParams::new(p.beta, p.x0)?;
    Ok(Kink { p })
}

impl Sampler for Kink {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        let g = self.p.gamma();
        let z = g * (x - self.p.beta * t + self.p.x0);
        (four_atan_exp(z), -2.0 * self.p.beta * g * sech(z))
    }

    fn dx(&self, t: f64, x: f64) -> f64 {
        let g = self.p.gamma();
        2.0 * g * sech(g * (x - self.p.beta * t + self.p.x0))
    }

    fn label(&self) -> String {
        format!("kink(beta={}, x0={})", self.p.beta, self.p.x0)
    }
}

/// Kink profile centred at `x₀`: `Q(x; β, x₀) = 4 arctan e^{γ(x − x₀)}` with
/// its companions `Q_x`, `Q_t` and `Q̃ = Q − π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkProfile {
    pub beta: f64,
    pub gamma: f64,
    pub x0: f64,
}

pub fn kink_profile(p: KinkParams) -> Result<KinkProfile> {
    let p = KinkParams::new(p.beta, p.x0)?;
    Ok(KinkProfile { beta: p.beta, gamma: p.gamma(), x0: p.x0 })
}

impl KinkProfile {
    pub fn centered(beta: f64, x0: f64) -> Result<Self> {
        kink_profile(KinkParams::new(beta, x0)?)
    }

    fn z(&self, x: f64) -> f64 {
        self.gamma * (x - self.x0)
    }

    pub fn q(&self, x: f64) -> f64 {
        four_atan_exp(self.z(x))
    }

    pub fn q_tilde(&self, x: f64) -> f64 {
        let z = self.z(x);
        if z > 0.0 {
            PI - 4.0 * (-z).exp().atan()
        } else {
            4.0 * z.exp().atan() - PI
        }
    }

    pub fn q_x(&self, x: f64) -> f64 {
        2.0 * self.gamma * sech(self.z(x))
    }

    pub fn q_xx(&self, x: f64) -> f64 {
        let z = self.z(x);
        -2.0 * self.gamma * self.gamma * sech(z) * z.tanh()
    }

    pub fn q_t(&self, x: f64) -> f64 {
        -2.0 * self.beta * self.gamma * sech(self.z(x))
    }

    /// `∂_x Q_t`.
    pub fn q_tx(&self, x: f64) -> f64 {
        let z = self.z(x);
        2.0 * self.beta * self.gamma * self.gamma * sech(z) * z.tanh()
    }

    /// `sin(Q̃/2) = tanh(γ(x − x₀))`.
    pub fn sin_half_tilde(&self, x: f64) -> f64 {
        self.z(x).tanh()
    }

    /// `cos(Q̃/2) = sech(γ(x − x₀))`.
    pub fn cos_half_tilde(&self, x: f64) -> f64 {
        sech(self.z(x))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Breather {
    pub beta: f64,
    pub alpha: f64,
}

pub fn breather(beta: f64) -> Result<Breather> {
    if !(beta != 0.0 && beta.abs() < 1.0) {
        return Err(Error::Parameter(format!("breather needs 0 < |beta| < 1, got {beta}")));
    }
    Ok(Breather { beta, alpha: (1.0 - beta * beta).sqrt() })
}

impl Breather {
    pub fn period(&self) -> f64 {
        2.0 * PI / self.alpha
    }

    fn s(&self, t: f64, x: f64) -> f64 {
        self.beta * (self.alpha * t).sin() * sech(self.beta * x) / self.alpha
    }
}

impl Sampler for Breather {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        let s = self.s(t, x);
        let st = self.beta * (self.alpha * t).cos() * sech(self.beta * x);
        (4.0 * s.atan(), 4.0 * st / (1.0 + s * s))
    }

    fn dx(&self, t: f64, x: f64) -> f64 {
        let s = self.s(t, x);
        -4.0 * s * self.beta * (self.beta * x).tanh() / (1.0 + s * s)
    }

    fn label(&self) -> String {
        format!("breather(beta={})", self.beta)
    }
}

/// Wobbling kink, evaluated as `Q(x) + 4·atan2(g, h)`.
#[derive(Debug, Clone, Copy)]
pub struct Wobbler {
    pub beta: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WobblerParams {
    pub beta: f64,
}

pub fn wobbler(p: WobblerParams) -> Result<Wobbler> {
    if !(p.beta.abs() < 1.0) {
        return Err(Error::Parameter(format!("wobbler needs |beta| < 1, got {}", p.beta)));
    }
    Ok(Wobbler { beta: p.beta, alpha: (1.0 - p.beta * p.beta).sqrt() })
}

struct WobblerParts {
    g: f64,
    h: f64,
    g_t: f64,
    h_t: f64,
    g_x: f64,
    h_x: f64,
}

impl Wobbler {
    pub fn period(&self) -> f64 {
        2.0 * PI / self.alpha
    }

    /// `g, h` and derivatives, all multiplied by a common `e^{−|x|−|βx|}`.
    fn parts(&self, t: f64, x: f64) -> WobblerParts {
        let (b, a) = (self.beta, self.alpha);
        let bx = b * x;
        let s = x.abs() + bx.abs();
        let (ca, sa) = ((a * t).cos(), (a * t).sin());
        let chx = Scaled::cosh(x);
        let shx = Scaled::sinh(x);
        let chb = Scaled::cosh(bx);
        let shb = Scaled::sinh(bx);
        let g = b * (shx.at(s) * ca - shb.at(s));
        let h = chx.mul(chb).at(s) - b * shx.mul(shb).at(s) - b * ca * (-s).exp();
        let g_t = -a * b * shx.at(s) * sa;
        let h_t = a * b * sa * (-s).exp();
        let g_x = b * (chx.at(s) * ca - b * chb.at(s));
        let h_x = a * a * shx.mul(chb).at(s);
        WobblerParts { g, h, g_t, h_t, g_x, h_x }
    }

    /// The same solution written as `4·Arg(U + iV)`; agrees with the sampler
    /// modulo `2π` where `e^x` is representable.
    pub fn arg_form(&self, t: f64, x: f64) -> f64 {
        let (b, a) = (self.beta, self.alpha);
        let ca = (a * t).cos();
        let u = (b * x).cosh() + b * (b * x).sinh() - b * x.exp() * ca;
        let v = x.exp() * ((b * x).cosh() - b * (b * x).sinh() - b * (-x).exp() * ca);
        4.0 * v.atan2(u)
    }
}

impl Sampler for Wobbler {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        let p = self.parts(t, x);
        let den = p.g * p.g + p.h * p.h;
        (four_atan_exp(x) + 4.0 * p.g.atan2(p.h), 4.0 * (p.g_t * p.h - p.g * p.h_t) / den)
    }

    fn dx(&self, t: f64, x: f64) -> f64 {
        let p = self.parts(t, x);
        let den = p.g * p.g + p.h * p.h;
        2.0 * sech(x) + 4.0 * (p.g_x * p.h - p.g * p.h_x) / den
    }

    fn label(&self) -> String {
        format!("wobbler(beta={})", self.beta)
    }
}

/// Kink-kink collision `4 arctan(β sinh(γx)/cosh(γβt))`.
#[derive(Debug, Clone, Copy)]
pub struct TwoKink {
    pub beta: f64,
    pub gamma: f64,
}

pub fn two_kink(beta: f64) -> Result<TwoKink> {
    if !(beta != 0.0 && beta.abs() < 1.0) {
        return Err(Error::Parameter(format!("2-kink needs 0 < |beta| < 1, got {beta}")));
    }
    Ok(TwoKink { beta, gamma: 1.0 / (1.0 - beta * beta).sqrt() })
}

impl TwoKink {
    fn s(&self, t: f64, x: f64) -> f64 {
        let (a, c) = (self.gamma * x, self.gamma * self.beta * t);
        let sh = Scaled::sinh(a);
        let ch = Scaled::cosh(c);
        self.beta * sh.m / ch.m * (a.abs() - c.abs()).exp()
    }
}

impl Sampler for TwoKink {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        let s = self.s(t, x);
        let c = self.gamma * self.beta * (self.gamma * self.beta * t).tanh();
        // 4 s_t/(1 + s²) with s_t = −c s, written to survive s = ±∞.
        let vt = if s.abs() > 1e150 { -4.0 * c / s } else { -4.0 * c * s / (1.0 + s * s) };
        (4.0 * s.atan(), vt)
    }

    fn label(&self) -> String {
        format!("two_kink(beta={})", self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeSolitonParams {
    pub beta: f64,
    pub v: f64,
}

/// Kink with an attached moving breather; equals the wobbler at `v = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ThreeSoliton {
    pub beta: f64,
    pub alpha: f64,
    pub v: f64,
    pub a_v: f64,
    pub gamma_v: f64,
}

pub fn three_soliton(p: ThreeSolitonParams) -> Result<ThreeSoliton> {
    if !(p.beta.abs() < 1.0) || !(p.v.abs() < 1.0) {
        return Err(Error::Parameter(format!("3-soliton needs |beta|, |v| < 1, got {}, {}", p.beta, p.v)));
    }
    Ok(ThreeSoliton {
        beta: p.beta,
        alpha: (1.0 - p.beta * p.beta).sqrt(),
        v: p.v,
        a_v: ((1.0 + p.v) / (1.0 - p.v)).sqrt(),
        gamma_v: 1.0 / (1.0 - p.v * p.v).sqrt(),
    })
}

impl ThreeSoliton {
    /// `(A₁, A₂, ∂_t A₁, ∂_t A₂)` scaled by a common positive factor.
    fn parts(&self, t: f64, x: f64) -> [f64; 4] {
        let (b, al, v, av, g) = (self.beta, self.alpha, self.v, self.a_v, self.gamma_v);
        let ph = g * al * (t - v * x);
        let tau = g * v * b * t;
        let gbx = g * b * x;
        let w = g * b * (t * v - x);
        let s = x.abs() + gbx.abs() + tau.abs() + w.abs();
        let (cp, sp) = (ph.cos(), ph.sin());
        let (chx, shx) = (Scaled::cosh(x), Scaled::sinh(x));
        let (chg, shg) = (Scaled::cosh(gbx), Scaled::sinh(gbx));
        let (cht, sht) = (Scaled::cosh(tau), Scaled::sinh(tau));
        let (chw, shw) = (Scaled::cosh(w), Scaled::sinh(w));
        let p1 = chx.mul(chg).scale(1.0 + av * av);
        let p2 = shx.mul(shg).scale(-2.0 * av * b);
        let r1 = shx.mul(chg).scale(2.0 * av * b);
        let r2 = chx.mul(shg).scale(-(1.0 + av * av));
        let pp = |c: Scaled| c.mul(p1).at(s) + c.mul(p2).at(s);
        let rr = |c: Scaled| c.mul(r1).at(s) + c.mul(r2).at(s);
        let a1 = (av * av - 1.0) * sp * chx.at(s) - 2.0 * av * al * cp * shx.at(s) - 2.0 * av * al * shw.at(s);
        let a2 = -2.0 * av * b * cp * Scaled::plain(1.0).at(s) + pp(cht) + rr(sht);
        let a1t = (av * av - 1.0) * chx.at(s) * cp * g * al + 2.0 * av * al * sp * g * al * shx.at(s)
            - 2.0 * av * al * g * b * v * chw.at(s);
        let a2t = 2.0 * av * b * sp * g * al * Scaled::plain(1.0).at(s) + g * v * b * (pp(sht) + rr(cht));
        [a1, a2, a1t, a2t]
    }
}

impl Sampler for ThreeSoliton {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        let [a1, a2, a1t, a2t] = self.parts(t, x);
        let (b, al) = (self.beta, self.alpha);
        let val = four_atan_exp(x) - 4.0 * (b * a1).atan2(al * a2);
        let den = al * al * a2 * a2 + b * b * a1 * a1;
        let vt = if den > 0.0 { -4.0 * al * b * (a1t * a2 - a1 * a2t) / den } else { 0.0 };
        (val, vt)
    }

    fn label(&self) -> String {
        format!("three_soliton(beta={}, v={})", self.beta, self.v)
    }
}

/// φ⁴ kink `H(x) = tanh(x/√2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Phi4Kink;

pub fn phi4_kink() -> Phi4Kink {
    Phi4Kink
}

impl Phi4Kink {
    pub fn h(x: f64) -> f64 {
        (x * FRAC_1_SQRT_2).tanh()
    }

    pub fn h_prime(x: f64) -> f64 {
        let h = Self::h(x);
        (1.0 - h * h) * FRAC_1_SQRT_2
    }
}

impl Sampler for Phi4Kink {
    fn eval(&self, _t: f64, x: f64) -> (f64, f64) {
        (Self::h(x), 0.0)
    }

    fn dx(&self, _t: f64, x: f64) -> f64 {
        Self::h_prime(x)
    }

    fn label(&self) -> String {
        "phi4_kink".into()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl Sampler for Zero {
    fn eval(&self, _t: f64, _x: f64) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn dx(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }

    fn label(&self) -> String {
        "zero".into()
    }
}

/// Lorentz boost `φ(γ(t − βx), γ(x − βt))` of another sampler.
pub struct Boosted<S: Sampler> {
    pub inner: S,
    pub beta: f64,
    pub gamma: f64,
}

pub fn boost<S: Sampler>(inner: S, beta: f64) -> Result<Boosted<S>> {
    if !(beta.abs() < 1.0) {
        return Err(Error::Parameter(format!("boost speed must satisfy |beta| < 1, got {beta}")));
    }
    Ok(Boosted { inner, beta, gamma: 1.0 / (1.0 - beta * beta).sqrt() })
}

impl<S: Sampler> Sampler for Boosted<S> {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        let (g, b) = (self.gamma, self.beta);
        let (tt, xx) = (g * (t - b * x), g * (x - b * t));
        let (val, vt) = self.inner.eval(tt, xx);
        let vx = self.inner.dx(tt, xx);
        (val, g * vt - g * b * vx)
    }

    fn label(&self) -> String {
        format!("boost({}, beta={})", self.inner.label(), self.beta)
    }
}

/// Linear modes of the linearized and linearized-Bäcklund systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeKind {
    /// `Q′ = 2 sech x`.
    QPrime,
    /// `tanh x cos t`.
    L,
    /// `sin t`.
    M,
    /// `−tanh x sin t`.
    LAlt,
    /// `cos t`.
    MAlt,
    /// `H′ = (1 − H²)/√2`.
    HPrime,
    /// `Y₁(x) sin(ωt)`, `ω = √(3/2)`.
    Y1,
    /// `Y₀(x) cos(ωt)`.
    Y0,
    /// `Y₁(x) cos(ωt)`.
    Y1Alt,
    /// `−Y₀(x) sin(ωt)`.
    Y0Alt,
    /// `−(1 − (3/2)sech²(x/√2)) sin(√2 t)`.
    L4,
    /// `H cos(√2 t)`.
    M4,
    /// `−(1 − (3/2)sech²(x/√2)) cos(√2 t)`.
    L4Alt,
    /// `−H sin(√2 t)`.
    M4Alt,
    /// `H e^{i√2 t}`.
    M4Complex,
    /// `(−2i − √2λ₀)e^{i√2 t}`, `λ₀ = i√(3/2)`.
    N4Plus,
    /// `(−2i + √2λ₀)e^{i√2 t}`.
    N4Minus,
}

impl ModeKind {
    pub const ALL: [ModeKind; 17] = [
        ModeKind::QPrime,
        ModeKind::L,
        ModeKind::M,
        ModeKind::LAlt,
        ModeKind::MAlt,
        ModeKind::HPrime,
        ModeKind::Y1,
        ModeKind::Y0,
        ModeKind::Y1Alt,
        ModeKind::Y0Alt,
        ModeKind::L4,
        ModeKind::M4,
        ModeKind::L4Alt,
        ModeKind::M4Alt,
        ModeKind::M4Complex,
        ModeKind::N4Plus,
        ModeKind::N4Minus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModeKind::QPrime => "Qprime",
            ModeKind::L => "L",
            ModeKind::M => "M",
            ModeKind::LAlt => "L-alt",
            ModeKind::MAlt => "M-alt",
            ModeKind::HPrime => "Hprime",
            ModeKind::Y1 => "Y1",
            ModeKind::Y0 => "Y0",
            ModeKind::Y1Alt => "Y1-alt",
            ModeKind::Y0Alt => "Y0-alt",
            ModeKind::L4 => "L4",
            ModeKind::M4 => "M4",
            ModeKind::L4Alt => "L4-alt",
            ModeKind::M4Alt => "M4-alt",
            ModeKind::M4Complex => "M4-complex",
            ModeKind::N4Plus => "N4-plus",
            ModeKind::N4Minus => "N4-minus",
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, ModeKind::M4Complex | ModeKind::N4Plus | ModeKind::N4Minus)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LinearMode {
    pub kind: ModeKind,
}

pub fn linear_mode(name: &str) -> Result<LinearMode> {
    ModeKind::ALL
        .iter()
        .find(|k| k.name() == name)
        .map(|&kind| LinearMode { kind })
        .ok_or_else(|| Error::Parameter(format!("unknown linear mode `{name}`")))
}

/// `sech(x/√2) tanh(x/√2)`: internal mode of the φ⁴ kink.
pub fn y1(x: f64) -> f64 {
    let z = x * FRAC_1_SQRT_2;
    sech(z) * z.tanh()
}

/// `−sech(x/√2)/√3`.
pub fn y0(x: f64) -> f64 {
    -sech(x * FRAC_1_SQRT_2) / 3f64.sqrt()
}

/// Even threshold resonance `1 − (3/2)sech²(x/√2)`.
pub fn phi4_resonance(x: f64) -> f64 {
    let s = sech(x * FRAC_1_SQRT_2);
    1.0 - 1.5 * s * s
}

impl ComplexSampler for LinearMode {
    fn eval_c(&self, t: f64, x: f64) -> ([f64; 2], [f64; 2]) {
        let w = 1.5f64.sqrt();
        let th = SQRT_2 * t;
        let real = |v: f64, vt: f64| ([v, 0.0], [vt, 0.0]);
        match self.kind {
            ModeKind::QPrime => real(2.0 * sech(x), 0.0),
            ModeKind::L => real(x.tanh() * t.cos(), -x.tanh() * t.sin()),
            ModeKind::M => real(t.sin(), t.cos()),
            ModeKind::LAlt => real(-x.tanh() * t.sin(), -x.tanh() * t.cos()),
            ModeKind::MAlt => real(t.cos(), -t.sin()),
            ModeKind::HPrime => real(Phi4Kink::h_prime(x), 0.0),
            ModeKind::Y1 => real(y1(x) * (w * t).sin(), w * y1(x) * (w * t).cos()),
            ModeKind::Y0 => real(y0(x) * (w * t).cos(), -w * y0(x) * (w * t).sin()),
            ModeKind::Y1Alt => real(y1(x) * (w * t).cos(), -w * y1(x) * (w * t).sin()),
            ModeKind::Y0Alt => real(-y0(x) * (w * t).sin(), -w * y0(x) * (w * t).cos()),
            ModeKind::L4 => {
                let r = phi4_resonance(x);
                real(-r * th.sin(), -SQRT_2 * r * th.cos())
            }
            ModeKind::M4 => {
                let h = Phi4Kink::h(x);
                real(h * th.cos(), -SQRT_2 * h * th.sin())
            }
            ModeKind::L4Alt => {
                let r = phi4_resonance(x);
                real(-r * th.cos(), SQRT_2 * r * th.sin())
            }
            ModeKind::M4Alt => {
                let h = Phi4Kink::h(x);
                real(-h * th.sin(), -SQRT_2 * h * th.cos())
            }
            ModeKind::M4Complex => {
                let h = Phi4Kink::h(x);
                ([h * th.cos(), h * th.sin()], [-SQRT_2 * h * th.sin(), SQRT_2 * h * th.cos()])
            }
            ModeKind::N4Plus | ModeKind::N4Minus => {
                // −i k e^{iθ} with k = 2 ± √3.
                let k = if self.kind == ModeKind::N4Plus { 2.0 + 3f64.sqrt() } else { 2.0 - 3f64.sqrt() };
                ([k * th.sin(), -k * th.cos()], [SQRT_2 * k * th.cos(), SQRT_2 * k * th.sin()])
            }
        }
    }
}

impl Sampler for LinearMode {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        let (v, vt) = self.eval_c(t, x);
        (v[0], vt[0])
    }

    fn label(&self) -> String {
        self.kind.name().into()
    }
}
