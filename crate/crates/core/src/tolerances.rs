//! Named tolerances and artifact-level thresholds shared by the tests, the
//! CLI and the acceptance suite. `--strict` divides the tolerances by 10.

/// Minimum observed order for refinement studies.
pub const MIN_ORDER: f64 = 1.9;
/// Finest-level PDE residual for the exact-solution catalogue.
pub const EXACT_RESIDUAL: f64 = 1e-5;
/// Nonlinear and linearized Bäcklund identities at `h = 0.02`.
pub const BT_IDENTITY: f64 = 5e-6;
pub const LBT_IDENTITY: f64 = 5e-6;
/// Discrete eigenvalue error at `n = 4001`.
pub const EIGENVALUE: f64 = 2e-3;
pub const PHI_AT_ZERO: f64 = 1e-12;
pub const CONSISTENCY: f64 = 1e-8;
pub const MOMENTUM_IDENTITY: f64 = 1e-6;
pub const FINAL_SPEED: f64 = 1e-12;
pub const ROUND_TRIP: f64 = 1e-7;
pub const PARITY: f64 = 1e-9;
pub const KINK_ENERGY: f64 = 1e-8;
pub const ENERGY_DRIFT: f64 = 1e-5;
pub const REVERSAL: f64 = 1e-9;
pub const PERIODICITY: f64 = 1e-4;
pub const ZERO_MOMENTUM: f64 = 1e-5;
pub const ORTHOGONALITY: f64 = 1e-8;
pub const SHIFT_RESIDUAL: f64 = 1e-10;

/// Radius of the orbital tube (H¹×L² distance to the kink family).
pub const TUBE_RADIUS: f64 = 0.5;
/// Default `ε` in the exponential weights of the `ρ′` bounds.
pub const RATE_EPS: f64 = 0.1;
/// Weight rate for the cumulative vacuum-decay integral.
pub const VACUUM_WEIGHT: f64 = 0.5;
/// Total variation of `ρ` over the last quarter that counts as converged.
pub const CONVERGED_TV: f64 = 1e-3;
/// Final-to-initial local norm ratio for the decay checks.
pub const DECAY_FACTOR: f64 = 0.1;
/// Accepted log-log slope window for `max|ρ′|` against `η`.
pub const SLOPE_TARGET: f64 = 2.0;
pub const SLOPE_WINDOW: f64 = 0.3;

/// Tolerance after the `--strict` switch.
pub fn scaled(tol: f64, strict: bool) -> f64 {
    if strict {
        tol / 10.0
    } else {
        tol
    }
}

/// Pinned bound on `max|ρ′|` over its weighted zero-side norm, across runs.
pub const RATE_RATIO_CONSTANT: f64 = 0.05;
/// Pinned bound on the wobbler orbital constant `sup dist / η`.
pub const WOBBLER_ORBITAL_CONSTANT: f64 = 3.0;
/// Largest share of the cumulative weighted integral gained over the second
/// half of a vacuum-decay run.
pub const PLATEAU_SHARE: f64 = 0.05;
