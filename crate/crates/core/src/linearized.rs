//! Schrödinger operators around kinks, their discrete spectra, and the
//! linearized Bäcklund systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ComplexSampler, Phi4Kink, Sampler};
use crate::field::{derivative_with, second_derivative_with, DiffOrder, Grid};
use crate::par::{self, Exec};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// `−∂²_x + V(x)` with `V → continuum_threshold` at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SchrodingerOperator {
    /// `𝓛_Q = −∂²_x + 1 − 2 sech² x`.
    SineGordonKink,
    /// `𝓛_H = −∂²_x + 2 − 3 sech²(x/√2)`.
    Phi4Kink,
    /// `𝓛̃_H = −∂²_x + 1 + H²`.
    Phi4Dual,
    /// `−∂²_x + m²`.
    Flat { mass_sq: f64 },
}

impl SchrodingerOperator {
    pub fn potential(&self, x: f64) -> f64 {
        match *self {
            SchrodingerOperator::SineGordonKink => 1.0 - 2.0 * sech(x).powi(2),
            SchrodingerOperator::Phi4Kink => 2.0 - 3.0 * sech(x / SQRT_2).powi(2),
            SchrodingerOperator::Phi4Dual => 1.0 + Phi4Kink::h(x).powi(2),
            SchrodingerOperator::Flat { mass_sq } => mass_sq,
        }
    }

    pub fn continuum_threshold(&self) -> f64 {
        match *self {
            SchrodingerOperator::SineGordonKink => 1.0,
            SchrodingerOperator::Phi4Kink | SchrodingerOperator::Phi4Dual => 2.0,
            SchrodingerOperator::Flat { mass_sq } => mass_sq,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            SchrodingerOperator::SineGordonKink => "L_Q".into(),
            SchrodingerOperator::Phi4Kink => "L_H".into(),
            SchrodingerOperator::Phi4Dual => "L_H-dual".into(),
            SchrodingerOperator::Flat { mass_sq } => format!("flat(m2={mass_sq})"),
        }
    }

    /// Checks that the potential has reached the threshold at both ends.
    pub fn check_threshold(&self, grid: &Grid) -> Result<()> {
        let thr = self.continuum_threshold();
        for x in [grid.x_min, grid.x_max] {
            let d = (self.potential(x) - thr).abs();
            if d > 1e-6 {
                return Err(Error::Contract(format!("{}: potential at {x} is {d:e} away from threshold", self.name())));
            }
        }
        Ok(())
    }
}

/// `−f″ + V f` with the three-point Laplacian and zero values outside.
pub fn apply_operator(op: &SchrodingerOperator, f: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len(f)?;
    let n = grid.n;
    let ih2 = 1.0 / (grid.h() * grid.h());
    let mut out = vec![0.0; n];
    for i in 0..n {
        let l = if i > 0 { f[i - 1] } else { 0.0 };
        let r = if i + 1 < n { f[i + 1] } else { 0.0 };
        out[i] = -(l - 2.0 * f[i] + r) * ih2 + op.potential(grid.x(i)) * f[i];
    }
    Ok(out)
}

/// Eigenvalues below `threshold − margin` are reported.
pub const CONTINUUM_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// Normalised so that `h Σ v² = 1`, largest entry positive.
    pub vector: Vec<f64>,
}

struct Tridiagonal {
    d: Vec<f64>,
    e: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let e2 = self.e * self.e;
        let mut q = 1.0;
        let mut count = 0;
        for (i, &d) in self.d.iter().enumerate() {
            q = if i == 0 { d - lambda } else { d - lambda - e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + self.e.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.e.abs();
        let lo = self.d.iter().fold(f64::INFINITY, |m, &d| m.min(d - r));
        let hi = self.d.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d + r));
        (lo, hi)
    }

    /// `k`-th eigenvalue (0-based) by bisection on the Sturm count.
    fn eigenvalue(&self, k: usize) -> Result<f64> {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * (lo.abs() + hi.abs()).max(1.0) {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::Eigen(format!("bisection for eigenvalue {k} did not converge")))
    }

    /// Solves `(T − σ)x = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        // Rows carry up to three entries after pivoting: (diag, super, super2).
        let mut dl = vec![self.e; n];
        let mut d: Vec<f64> = self.d.iter().map(|v| v - sigma).collect();
        let mut du = vec![self.e; n];
        let mut du2 = vec![0.0; n];
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                let m = if d[i] != 0.0 { dl[i] / d[i] } else { 0.0 };
                d[i + 1] -= m * du[i];
                x[i + 1] -= m * x[i];
            } else {
                let m = d[i] / dl[i];
                d[i] = dl[i];
                let t = d[i + 1];
                d[i + 1] = du[i] - m * t;
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -m * du2[i];
                }
                du[i] = t;
                x.swap(i, i + 1);
                x[i + 1] -= m * x[i];
            }
            dl[i] = 0.0;
        }
        let tiny = f64::MIN_POSITIVE.sqrt();
        let piv = |v: f64| if v.abs() < tiny { tiny.copysign(v) } else { v };
        x[n - 1] /= piv(d[n - 1]);
        if n > 1 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / piv(d[n - 2]);
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / piv(d[i]);
        }
        x
    }

    fn eigenvector(&self, lambda: f64, h: f64) -> Vec<f64> {
        let n = self.d.len();
        let sigma = lambda + 1e-10 * lambda.abs().max(1.0);
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
        for _ in 0..4 {
            v = self.solve_shifted(sigma, &v);
            let nrm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= nrm);
        }
        let nrm = (h * v.iter().map(|a| a * a).sum::<f64>()).sqrt();
        let imax = (0..n).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
        let s = if v[imax] < 0.0 { -1.0 / nrm } else { 1.0 / nrm };
        v.iter_mut().for_each(|a| *a *= s);
        v
    }
}

/// Discrete eigenpairs of the finite-difference operator strictly below
/// `threshold − CONTINUUM_MARGIN`, ascending.
pub fn discrete_spectrum(op: &SchrodingerOperator, grid: &Grid) -> Result<Vec<EigenPair>> {
    discrete_spectrum_with(op, grid, Exec::default())
}

pub fn discrete_spectrum_with(op: &SchrodingerOperator, grid: &Grid, exec: Exec) -> Result<Vec<EigenPair>> {
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    if grid.n < 2001 {
        return Err(Error::InvalidGrid(format!("spectrum needs at least 2001 nodes, got {}", grid.n)));
    }
    let h = grid.h();
    let ih2 = 1.0 / (h * h);
    let t = Tridiagonal { d: (0..grid.n).map(|i| 2.0 * ih2 + op.potential(grid.x(i))).collect(), e: -ih2 };
    let cutoff = op.continuum_threshold() - CONTINUUM_MARGIN;
    let m = t.count_below(cutoff);
    par::map_range(exec, m, |k| {
        let value = t.eigenvalue(k)?;
        Ok(EigenPair { value, vector: t.eigenvector(value, h) })
    })
    .into_iter()
    .collect()
}

fn sample_pair(s: &dyn Sampler, t: f64, grid: &Grid) -> (Vec<f64>, Vec<f64>) {
    (0..grid.n).map(|i| s.eval(t, grid.x(i))).unzip()
}

/// Residuals of `φ_x − ψ_t + c φ` and `φ_t − ψ_x + c ψ`, spatial
/// derivatives of the sampled fields at sixth order.
fn lbt_generic(
    phi: &dyn Sampler,
    psi: &dyn Sampler,
    t: f64,
    grid: &Grid,
    coeff: impl Fn(f64) -> f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (p, pt) = sample_pair(phi, t, grid);
    let (q, qt) = sample_pair(psi, t, grid);
    let px = derivative_with(&p, grid, DiffOrder::Sixth)?;
    let qx = derivative_with(&q, grid, DiffOrder::Sixth)?;
    let mut r1 = vec![0.0; grid.n];
    let mut r2 = vec![0.0; grid.n];
    for i in 0..grid.n {
        let c = coeff(grid.x(i));
        r1[i] = px[i] - qt[i] + c * p[i];
        r2[i] = pt[i] - qx[i] + c * q[i];
    }
    Ok((r1, r2))
}

/// Linearized Bäcklund system around the static SG kink,
/// `∂_xφ − ∂_tψ = −tanh(x) φ`, `∂_tφ − ∂_xψ = −tanh(x) ψ`.
pub fn lbt_residual_sg(phi: &dyn Sampler, psi: &dyn Sampler, t: f64, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    lbt_generic(phi, psi, t, grid, f64::tanh)
}

/// The φ⁴ system with `−√2 H` in place of `−tanh x`.
pub fn lbt_residual_phi4(phi: &dyn Sampler, psi: &dyn Sampler, t: f64, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    lbt_generic(phi, psi, t, grid, |x| SQRT_2 * Phi4Kink::h(x))
}

/// Choice of sign in `∓λ₀`; `Upper` takes `−λ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DualSign {
    Upper,
    Lower,
}

/// Complex field as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexField {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexField {
    pub fn max_abs(&self) -> f64 {
        self.re.iter().zip(&self.im).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
    }
}

fn sample_complex(s: &dyn ComplexSampler, t: f64, grid: &Grid) -> ([Vec<f64>; 2], [Vec<f64>; 2]) {
    let mut v = [vec![0.0; grid.n], vec![0.0; grid.n]];
    let mut vt = [vec![0.0; grid.n], vec![0.0; grid.n]];
    for i in 0..grid.n {
        let (a, b) = s.eval_c(t, grid.x(i));
        for c in 0..2 {
            v[c][i] = a[c];
            vt[c][i] = b[c];
        }
    }
    (v, vt)
}

/// Residuals of the dual system
/// `∂_xφ̃ − ∂_tψ̃ = −H φ̃/√2 ∓ λ₀ψ̃`, `∂_tφ̃ − ∂_xψ̃ = −H ψ̃/√2 ∓ λ₀φ̃`,
/// `λ₀ = i√(3/2)`.
pub fn lbt_residual_phi4_dual(
    phi: &dyn ComplexSampler,
    psi: &dyn ComplexSampler,
    sign: DualSign,
    t: f64,
    grid: &Grid,
) -> Result<(ComplexField, ComplexField)> {
    let (p, pt) = sample_complex(phi, t, grid);
    let (q, qt) = sample_complex(psi, t, grid);
    let px = [derivative_with(&p[0], grid, DiffOrder::Sixth)?, derivative_with(&p[1], grid, DiffOrder::Sixth)?];
    let qx = [derivative_with(&q[0], grid, DiffOrder::Sixth)?, derivative_with(&q[1], grid, DiffOrder::Sixth)?];
    // ±λ₀ z = ±i√(3/2)(a + ib) = ±√(3/2)(−b + ia).
    let l0 = 1.5f64.sqrt() * if sign == DualSign::Upper { 1.0 } else { -1.0 };
    let n = grid.n;
    let mut r1 = ComplexField { re: vec![0.0; n], im: vec![0.0; n] };
    let mut r2 = ComplexField { re: vec![0.0; n], im: vec![0.0; n] };
    for i in 0..n {
        let c = Phi4Kink::h(grid.x(i)) / SQRT_2;
        r1.re[i] = px[0][i] - qt[0][i] + c * p[0][i] - l0 * q[1][i];
        r1.im[i] = px[1][i] - qt[1][i] + c * p[1][i] + l0 * q[0][i];
        r2.re[i] = pt[0][i] - qx[0][i] + c * q[0][i] - l0 * p[1][i];
        r2.im[i] = pt[1][i] - qx[1][i] + c * q[1][i] + l0 * p[0][i];
    }
    Ok((r1, r2))
}

/// `φ_tt + (−∂²_x + V)φ` at time `t`, with a centered second difference in
/// time and one-sided closures in space at the ends.
pub fn wave_residual(phi: &dyn Sampler, op: &SchrodingerOperator, t: f64, grid: &Grid, dt: f64) -> Result<Vec<f64>> {
    wave_residual_with(phi, op, t, grid, dt, DiffOrder::Second)
}

/// [`wave_residual`] with a choice of spatial stencil.
pub fn wave_residual_with(
    phi: &dyn Sampler,
    op: &SchrodingerOperator,
    t: f64,
    grid: &Grid,
    dt: f64,
    order: DiffOrder,
) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    let f0 = grid.sample(|x| phi.value(t, x));
    let fp = grid.sample(|x| phi.value(t + dt, x));
    let fm = grid.sample(|x| phi.value(t - dt, x));
    let fxx = second_derivative_with(&f0, grid, order)?;
    Ok((0..grid.n)
        .map(|i| (fp[i] - 2.0 * f0[i] + fm[i]) / (dt * dt) - fxx[i] + op.potential(grid.x(i)) * f0[i])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_on_small_matrix() {
        // Eigenvalues of tridiag(−1, 2, −1) of size 3: 2 − √2, 2, 2 + √2.
        let t = Tridiagonal { d: vec![2.0; 3], e: -1.0 };
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(1.0), 1);
        assert_eq!(t.count_below(2.5), 2);
        assert!((t.eigenvalue(0).unwrap() - (2.0 - SQRT_2)).abs() < 1e-14);
        assert!((t.eigenvalue(2).unwrap() - (2.0 + SQRT_2)).abs() < 1e-14);
    }

    #[test]
    fn pivoted_solve_matches_residual() {
        let t = Tridiagonal { d: vec![0.1, -3.0, 2.0, 0.0, 5.0], e: 1.5 };
        let b = [1.0, -2.0, 0.5, 3.0, 1.0];
        let x = t.solve_shifted(0.3, &b);
        for i in 0..5 {
            let mut r = (t.d[i] - 0.3) * x[i];
            if i > 0 {
                r += t.e * x[i - 1];
            }
            if i < 4 {
                r += t.e * x[i + 1];
            }
            assert!((r - b[i]).abs() < 1e-12, "row {i}: {r} vs {}", b[i]);
        }
    }
}
