//! Grids, quadrature, finite differences, norms and parity tooling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Sampler;

/// Uniform grid `x_min, x_min + h, ..., x_max` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {n}")));
        }
        Ok(Grid { x_min, x_max, n })
    }

    /// Symmetric grid on `[-half_width, half_width]` with spacing as close to
    /// `h` as an odd node count allows.
    pub fn symmetric(half_width: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !(half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("bad half width {half_width} or spacing {h}")));
        }
        let cells = (half_width / h).round().max(1.0) as usize;
        Grid::new(-half_width, half_width, 2 * cells + 1)
    }

    /// The default laboratory grid: `[-40, 40]`, `h = 0.02`.
    pub fn standard() -> Self {
        Grid::symmetric(40.0, 0.02).expect("static grid")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if self.is_symmetric() {
            // Integer offset from the centre keeps x(i) = −x(n−1−i) bitwise.
            (i as f64 - (self.n / 2) as f64) * self.h()
        } else if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|i| f(self.x(i))).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let scale = self.x_max.abs().max(self.x_min.abs()).max(1.0);
        (self.x_min + self.x_max).abs() <= 1e-12 * scale && self.n % 2 == 1
    }

    /// Index of the node at `x = 0` on a symmetric grid.
    pub fn center(&self) -> Result<usize> {
        if self.is_symmetric() {
            Ok(self.n / 2)
        } else {
            Err(Error::AsymmetricGrid)
        }
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.n - 1 - i
    }

    /// Same span, spacing halved.
    pub fn refined(&self) -> Self {
        Grid { n: 2 * (self.n - 1) + 1, ..*self }
    }

    /// Nearest node index to `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let r = ((x - self.x_min) / self.h()).round();
        r.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() == self.n {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.n, got: values.len() })
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

/// Field and time derivative sampled on a grid at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    pub grid: Grid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldState {
    pub fn new(t: f64, grid: Grid, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        grid.check_len(&u)?;
        grid.check_len(&v)?;
        let s = FieldState { t, grid, u, v };
        s.check_finite()?;
        Ok(s)
    }

    pub fn zeros(t: f64, grid: Grid) -> Self {
        FieldState { t, grid, u: vec![0.0; grid.n], v: vec![0.0; grid.n] }
    }

    pub fn check_finite(&self) -> Result<()> {
        for (i, (a, b)) in self.u.iter().zip(&self.v).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFinite { index: i, x: self.grid.x(i) });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParityTag {
    OddOdd,
    OddEven,
    EvenEven,
    EvenOdd,
    None,
}

impl ParityTag {
    pub fn components(self) -> Option<(Parity, Parity)> {
        match self {
            ParityTag::OddOdd => Some((Parity::Odd, Parity::Odd)),
            ParityTag::OddEven => Some((Parity::Odd, Parity::Even)),
            ParityTag::EvenEven => Some((Parity::Even, Parity::Even)),
            ParityTag::EvenOdd => Some((Parity::Even, Parity::Odd)),
            ParityTag::None => None,
        }
    }
}

/// A `(u, s)` pair such as `(ũ, s̃)` or `(y, v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationPair {
    pub grid: Grid,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub tag: ParityTag,
}

impl PerturbationPair {
    /// Builds a pair and verifies the declared parity to `tol`.
    pub fn new(grid: Grid, first: Vec<f64>, second: Vec<f64>, tag: ParityTag, tol: f64) -> Result<Self> {
        grid.check_len(&first)?;
        grid.check_len(&second)?;
        let p = PerturbationPair { grid, first, second, tag };
        p.verify(tol)?;
        Ok(p)
    }

    pub fn untagged(grid: Grid, first: Vec<f64>, second: Vec<f64>) -> Result<Self> {
        Self::new(grid, first, second, ParityTag::None, 0.0)
    }

    pub fn zeros(grid: Grid, tag: ParityTag) -> Self {
        PerturbationPair { grid, first: vec![0.0; grid.n], second: vec![0.0; grid.n], tag }
    }

    pub fn from_state(s: &FieldState) -> Self {
        PerturbationPair { grid: s.grid, first: s.u.clone(), second: s.v.clone(), tag: ParityTag::None }
    }

    pub fn verify(&self, tol: f64) -> Result<()> {
        if let Some((p1, p2)) = self.tag.components() {
            let d1 = parity_check(&self.first, &self.grid, p1)?;
            if d1 > tol {
                return Err(Error::Parity { what: format!("first component ({p1:?})"), defect: d1, tol });
            }
            let d2 = parity_check(&self.second, &self.grid, p2)?;
            if d2 > tol {
                return Err(Error::Parity { what: format!("second component ({p2:?})"), defect: d2, tol });
            }
        }
        Ok(())
    }

    /// Max-norm distance over both components.
    pub fn max_distance(&self, other: &PerturbationPair) -> f64 {
        max_abs_diff(&self.first, &other.first).max(max_abs_diff(&self.second, &other.second))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    SineGordon,
    Phi4,
}

impl Model {
    /// `N(φ)` in `φ_tt − φ_xx + N(φ) = 0`.
    pub fn nonlinearity(self, phi: f64) -> f64 {
        match self {
            Model::SineGordon => phi.sin(),
            Model::Phi4 => -phi + phi * phi * phi,
        }
    }

    pub fn nonlinearity_prime(self, phi: f64) -> f64 {
        match self {
            Model::SineGordon => phi.cos(),
            Model::Phi4 => -1.0 + 3.0 * phi * phi,
        }
    }

    /// Potential with `V' = N`, zero at the vacua.
    pub fn potential(self, phi: f64) -> f64 {
        match self {
            Model::SineGordon => 1.0 - phi.cos(),
            Model::Phi4 => {
                let w = 1.0 - phi * phi;
                0.25 * w * w
            }
        }
    }
}

/// Exponential weight `e^{−c|x − center|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub rate: f64,
    pub center: f64,
}

impl WeightSpec {
    pub fn new(rate: f64, center: f64) -> Result<Self> {
        if !(rate > 0.0) || !center.is_finite() {
            return Err(Error::Parameter(format!("weight rate must be positive, got {rate}")));
        }
        Ok(WeightSpec { rate, center })
    }

    pub fn at(&self, x: f64) -> f64 {
        (-self.rate * (x - self.center).abs()).exp()
    }
}

/// Accuracy of the first-derivative operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DiffOrder {
    /// Centered differences inside, one-sided second order at the ends.
    #[default]
    Second,
    /// Seven-point stencils, centered where possible.
    Sixth,
}

/// Trapezoid rule.
pub fn quadrature(values: &[f64], grid: &Grid) -> Result<f64> {
    grid.check_len(values)?;
    Ok(trapezoid(values, grid.h()))
}

pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Integral over `[a, b]` of the piecewise-linear interpolant of `values`.
pub fn quadrature_interval(values: &[f64], grid: &Grid, a: f64, b: f64) -> Result<f64> {
    grid.check_len(values)?;
    let tol = 1e-9 * grid.h();
    if !(a <= b) || a < grid.x_min - tol || b > grid.x_max + tol {
        return Err(Error::Contract(format!(
            "interval [{a}, {b}] not inside grid span [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    let h = grid.h();
    let a = a.max(grid.x_min);
    let b = b.min(grid.x_max);
    let lerp = |x: f64| {
        let s = ((x - grid.x_min) / h).clamp(0.0, (grid.n - 1) as f64);
        let i = (s.floor() as usize).min(grid.n - 2);
        let w = s - i as f64;
        values[i] * (1.0 - w) + values[i + 1] * w
    };
    let first = ((a - grid.x_min) / h - 1e-9).ceil().max(0.0) as usize;
    let last = ((b - grid.x_min) / h + 1e-9).floor().min((grid.n - 1) as f64) as usize;
    if first > last {
        return Ok(0.5 * (lerp(a) + lerp(b)) * (b - a));
    }
    let (xf, xl) = (grid.x(first), grid.x(last));
    let mut total = 0.0;
    if last > first {
        total += trapezoid(&values[first..=last], h);
    }
    total += 0.5 * (lerp(a) + values[first]) * (xf - a).max(0.0);
    total += 0.5 * (values[last] + lerp(b)) * (b - xl).max(0.0);
    Ok(total)
}

/// Finite-difference weights for derivatives `0..=m` at `z` from nodes `xs`
/// (Fornberg's recursion). Returns `w[k][j]` for derivative `k`, node `j`.
pub fn fd_weights(z: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Applies a `width`-point stencil for derivative `m`, centered inside and
/// shifted one-sided near the ends. Result is in grid units (`h = 1`).
fn stencil_apply(values: &[f64], width: usize, m: usize) -> Vec<f64> {
    let n = values.len();
    assert!(n >= width, "grid too small for a {width}-point stencil");
    let half = width / 2;
    let offsets: Vec<f64> = (0..width).map(|j| j as f64).collect();
    let interior = fd_weights(half as f64, &offsets, m)[m].clone();
    let mut out = vec![0.0; n];
    for i in half..n - half {
        let base = i - half;
        out[i] = interior.iter().enumerate().map(|(j, w)| w * values[base + j]).sum();
    }
    for i in 0..half {
        let w = &fd_weights(i as f64, &offsets, m)[m];
        out[i] = w.iter().enumerate().map(|(j, w)| w * values[j]).sum();
        let k = n - 1 - i;
        let base = n - width;
        let w = &fd_weights((k - base) as f64, &offsets, m)[m];
        out[k] = w.iter().enumerate().map(|(j, w)| w * values[base + j]).sum();
    }
    out
}

/// First derivative, second order (centered inside, one-sided at the ends).
pub fn derivative(values: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    derivative_with(values, grid, DiffOrder::Second)
}

pub fn derivative_with(values: &[f64], grid: &Grid, order: DiffOrder) -> Result<Vec<f64>> {
    grid.check_len(values)?;
    let h = grid.h();
    let n = values.len();
    match order {
        DiffOrder::Second => {
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
            }
            d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
            d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
            Ok(d)
        }
        DiffOrder::Sixth => {
            if n < 7 {
                return Err(Error::InvalidGrid("sixth-order stencil needs 7 nodes".into()));
            }
            Ok(stencil_apply(values, 7, 1).into_iter().map(|d| d / h).collect())
        }
    }
}

/// Second derivative: centered three-point inside, one-sided four-point
/// (second order) at the ends.
pub fn second_derivative(values: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len(values)?;
    if values.len() < 4 {
        return Err(Error::InvalidGrid("second derivative needs 4 nodes".into()));
    }
    let h2 = grid.h() * grid.h();
    let n = values.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / h2;
    }
    d[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / h2;
    d[n - 1] = (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) / h2;
    Ok(d)
}

pub fn second_derivative_with(values: &[f64], grid: &Grid, order: DiffOrder) -> Result<Vec<f64>> {
    match order {
        DiffOrder::Second => second_derivative(values, grid),
        DiffOrder::Sixth => {
            grid.check_len(values)?;
            if values.len() < 8 {
                return Err(Error::InvalidGrid("sixth-order second derivative needs 8 nodes".into()));
            }
            let h2 = grid.h() * grid.h();
            // Eight points keep one-sided closures at sixth order.
            let mut d = stencil_apply(values, 7, 2);
            let ends = stencil_apply(values, 8, 2);
            for i in 0..3 {
                d[i] = ends[i];
                d[values.len() - 1 - i] = ends[values.len() - 1 - i];
            }
            Ok(d.into_iter().map(|v| v / h2).collect())
        }
    }
}

/// `φ_tt − φ_xx + N(φ)` at time `t`, both second derivatives by centered
/// differences of the sampler.
pub fn pde_residual(sampler: &dyn Sampler, model: Model, t: f64, grid: &Grid, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    let n = grid.n;
    let mut prev = vec![0.0; n];
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    for i in 0..n {
        let x = grid.x(i);
        prev[i] = sampler.value(t - dt, x);
        cur[i] = sampler.value(t, x);
        next[i] = sampler.value(t + dt, x);
        if !(prev[i].is_finite() && cur[i].is_finite() && next[i].is_finite()) {
            return Err(Error::NonFinite { index: i, x });
        }
    }
    let dxx = second_derivative(&cur, grid)?;
    Ok((0..n)
        .map(|i| (next[i] - 2.0 * cur[i] + prev[i]) / (dt * dt) - dxx[i] + model.nonlinearity(cur[i]))
        .collect())
}

/// `∫ e^{−c|x−x_c|}(u_x² + u² + s²)`.
pub fn weighted_norm_sq(pair: &PerturbationPair, w: &WeightSpec) -> Result<f64> {
    let grid = &pair.grid;
    let ux = derivative(&pair.first, grid)?;
    let dens: Vec<f64> = (0..grid.n)
        .map(|i| w.at(grid.x(i)) * (ux[i] * ux[i] + pair.first[i] * pair.first[i] + pair.second[i] * pair.second[i]))
        .collect();
    quadrature(&dens, grid)
}

/// `‖(u, s)‖_{H¹×L²(I)}` over `I = [a, b]`.
pub fn local_energy_norm(pair: &PerturbationPair, interval: (f64, f64)) -> Result<f64> {
    let grid = &pair.grid;
    let ux = derivative(&pair.first, grid)?;
    let dens: Vec<f64> = (0..grid.n)
        .map(|i| ux[i] * ux[i] + pair.first[i] * pair.first[i] + pair.second[i] * pair.second[i])
        .collect();
    Ok(quadrature_interval(&dens, grid, interval.0, interval.1)?.max(0.0).sqrt())
}

/// Full-line `H¹×L²` norm.
pub fn energy_norm(pair: &PerturbationPair) -> Result<f64> {
    local_energy_norm(pair, (pair.grid.x_min, pair.grid.x_max))
}

/// `max_i |f(x_i) ∓ f(−x_i)|`: minus for even, plus for odd.
pub fn parity_check(values: &[f64], grid: &Grid, kind: Parity) -> Result<f64> {
    grid.check_len(values)?;
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let n = grid.n;
    Ok((0..=n / 2)
        .map(|i| {
            let (a, b) = (values[i], values[n - 1 - i]);
            match kind {
                Parity::Even => (a - b).abs(),
                Parity::Odd => (a + b).abs(),
            }
        })
        .fold(0.0, f64::max))
}

/// Projects onto the odd or even part: `(f(x) ∓ f(−x))/2`.
pub fn symmetrize(values: &[f64], grid: &Grid, kind: Parity) -> Result<Vec<f64>> {
    grid.check_len(values)?;
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let n = grid.n;
    Ok((0..n)
        .map(|i| {
            let m = values[n - 1 - i];
            match kind {
                Parity::Even => 0.5 * (values[i] + m),
                Parity::Odd => 0.5 * (values[i] - m),
            }
        })
        .collect())
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_textbook_stencils() {
        let xs = [-1.0, 0.0, 1.0];
        let w = fd_weights(0.0, &xs, 2);
        assert!((w[1][0] + 0.5).abs() < 1e-15 && (w[1][2] - 0.5).abs() < 1e-15);
        assert!((w[2][0] - 1.0).abs() < 1e-15 && (w[2][1] + 2.0).abs() < 1e-15);
        let xs: Vec<f64> = (0..7).map(|j| j as f64).collect();
        let w = fd_weights(3.0, &xs, 1);
        let expect = [-1.0 / 60.0, 3.0 / 20.0, -0.75, 0.0, 0.75, -3.0 / 20.0, 1.0 / 60.0];
        for (a, b) in w[1].iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_basics() {
        let g = Grid::symmetric(1.0, 0.25).unwrap();
        assert_eq!(g.n, 9);
        assert!(g.is_symmetric());
        assert_eq!(g.center().unwrap(), 4);
        assert_eq!(g.x(4), 0.0);
        assert_eq!(g.refined().n, 17);
        assert!(Grid::new(1.0, 0.0, 5).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        assert!(!Grid::new(-1.0, 1.0, 4).unwrap().is_symmetric());
    }

    #[test]
    fn interval_quadrature_partial_cells() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let ones = vec![1.0; 11];
        let v = quadrature_interval(&ones, &g, 0.123, 0.777).unwrap();
        assert!((v - 0.654).abs() < 1e-13);
        let lin = g.sample(|x| x);
        let v = quadrature_interval(&lin, &g, 0.05, 0.95).unwrap();
        assert!((v - 0.45).abs() < 1e-13);
        assert!(quadrature_interval(&lin, &g, -0.5, 0.5).is_err());
    }

    #[test]
    fn model_potentials_match_nonlinearities() {
        for m in [Model::SineGordon, Model::Phi4] {
            for &p in &[-1.3, 0.2, 0.9, 2.0] {
                let e = 1e-6;
                let fd = (m.potential(p + e) - m.potential(p - e)) / (2.0 * e);
                assert!((fd - m.nonlinearity(p)).abs() < 1e-8);
            }
        }
        assert_eq!(Model::Phi4.potential(1.0), 0.0);
        assert_eq!(Model::SineGordon.potential(0.0), 0.0);
    }
}
