//! Energy and momentum.
//!
//! Both functionals differentiate with the sixth-order stencil so that the
//! closed-form values (8 for the kink, `−4βγ` for a moving kink) are met to
//! round-off level on the default grid.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::field::{derivative_with, quadrature, DiffOrder, FieldState, Model};

/// A state together with its declared asymptotic values.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologicalState {
    pub state: FieldState,
    pub left_limit: f64,
    pub right_limit: f64,
}

impl TopologicalState {
    /// Checks the end nodes against the limits (1e−6) and, for sine-Gordon,
    /// that the limits are multiples of 2π.
    pub fn new(state: FieldState, left_limit: f64, right_limit: f64, model: Model) -> Result<Self> {
        let n = state.grid.n;
        let (l, r) = (state.u[0], state.u[n - 1]);
        if (l - left_limit).abs() > 1e-6 || (r - right_limit).abs() > 1e-6 {
            return Err(Error::Contract(format!(
                "boundary values ({l}, {r}) do not match declared limits ({left_limit}, {right_limit})"
            )));
        }
        if model == Model::SineGordon {
            for lim in [left_limit, right_limit] {
                let k = lim / TAU;
                if (k - k.round()).abs() > 1e-9 {
                    return Err(Error::Contract(format!("limit {lim} is not a multiple of 2π")));
                }
            }
        }
        Ok(TopologicalState { state, left_limit, right_limit })
    }

    /// Number of kinks: `(right − left)/2π`.
    pub fn charge(&self) -> f64 {
        (self.right_limit - self.left_limit) / TAU
    }
}

fn density(state: &FieldState, model: Model) -> Result<Vec<f64>> {
    let ux = derivative_with(&state.u, &state.grid, DiffOrder::Sixth)?;
    Ok((0..state.grid.n)
        .map(|i| 0.5 * (ux[i] * ux[i] + state.v[i] * state.v[i]) + model.potential(state.u[i]))
        .collect())
}

/// `½∫(φ_x² + φ_t²) + ∫V(φ)`.
pub fn energy(state: &FieldState, model: Model) -> Result<f64> {
    quadrature(&density(state, model)?, &state.grid)
}

/// Energy together with an estimate of what the truncated tails would add:
/// the end-node energy density times one decay length. Callers can warn when
/// the estimate is not negligible.
pub fn energy_with_tail(state: &FieldState, model: Model) -> Result<(f64, f64)> {
    let d = density(state, model)?;
    let tail = d[0].abs() + d[d.len() - 1].abs();
    Ok((quadrature(&d, &state.grid)?, tail))
}

/// `½∫ φ_t φ_x`.
pub fn momentum(state: &FieldState) -> Result<f64> {
    let ux = derivative_with(&state.u, &state.grid, DiffOrder::Sixth)?;
    let d: Vec<f64> = ux.iter().zip(&state.v).map(|(a, b)| 0.5 * a * b).collect();
    quadrature(&d, &state.grid)
}

/// `2(1/(1+δ) − (1+δ))`: momentum of data built with offset `δ`.
pub fn manifold_momentum(delta: f64) -> Result<f64> {
    let a = 1.0 + delta;
    if !(a > 0.0) {
        return Err(Error::Parameter(format!("need 1 + delta > 0, got delta = {delta}")));
    }
    Ok(2.0 * (1.0 / a - a))
}

/// Energy of a kink with speed `β`: `8γ`.
pub fn kink_energy(beta: f64) -> f64 {
    8.0 / (1.0 - beta * beta).sqrt()
}

/// Momentum of a kink with speed `β`: `−4βγ`.
pub fn kink_momentum(beta: f64) -> f64 {
    -4.0 * beta / (1.0 - beta * beta).sqrt()
}
