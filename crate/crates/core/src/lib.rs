//! Numerical laboratory for sine-Gordon and φ⁴ kinks.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: grids, quadrature, finite differences, norms, parity tools and
//!   PDE residuals.
//! * [`exact`]: closed-form samplers (kink, breather, wobbling kink, 2-kink,
//!   3-soliton, φ⁴ kink) and linear modes.
//! * [`conserved`]: energy and momentum.
//! * [`backlund`]: Bäcklund residuals, the lifting/descent maps and the
//!   manifold constructor.
//! * [`linearized`]: Schrödinger operators, spectra and linearized Bäcklund
//!   systems.
//! * [`evolver`]: leapfrog time integration.
//! * [`modulation`]: shift tracking and decay diagnostics.
//! * [`experiments`]: end-to-end recipes shared by the CLI and the
//!   acceptance suite.
//!
//! Data parallelism (sweeps, seeds, batched evaluations) goes through
//! [`par`], which uses rayon when the `parallel` feature is on and falls back
//! to plain iteration otherwise.

pub mod backlund;
pub mod conserved;
pub mod error;
pub mod evolver;
pub mod exact;
pub mod experiments;
pub mod field;
pub mod linearized;
pub mod modulation;
pub mod par;
pub mod tolerances;

pub use error::{Error, Result};
pub use field::{FieldState, Grid, Model, Parity, ParityTag, PerturbationPair, WeightSpec};
