//! Exact evolution of energy-conservative solutions of the Hunter–Saxton
//! equation
//!
//! ```text
//! u_t + u u_x = 1/2 ∫_{-∞}^x dμ(t),   μ_t + (u μ)_x = 0,   dμ_ac(t) = u_x² dx
//! ```
//!
//! for initial data whose velocity is continuous piecewise linear and whose
//! energy measure is `ū_x² dx` plus finitely many point masses. On this class
//! the generalized characteristics are closed-form quadratics in time and
//! every push-forward measure decomposes into a piecewise-constant density
//! plus atoms, so no discretization error is introduced anywhere.
//!
//! Layout:
//!
//! * [`pwfun`]: piecewise-linear / piecewise-constant algebra and the
//!   monotone pseudo-inverse.
//! * [`measure`]: finite Radon measures, CDFs and push-forward decomposition.
//! * [`lagrangian`]: the α-parametrization and the global characteristics.
//! * [`evolution`]: snapshots, singular-time prediction, semi-group restart.
//! * [`verify`]: executable checks and brute-force oracles.
//! * [`datum`]: the datum file schema and the built-in demo data.

pub mod datum;
pub mod error;
pub mod evolution;
pub mod lagrangian;
pub mod measure;
pub mod pwfun;
pub mod verify;

pub use error::{Error, Result};
pub use evolution::{evolve, predict_singular_times, restart, SingularEvent, Snapshot};
pub use lagrangian::{AlphaParametrization, InitialDatum};
pub use measure::{Atom, Endpoint, RadonMeasure, Span};
pub use pwfun::{MonotoneGraph, PiecewiseConstant, PiecewiseLinear};

use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Abscissae closer than this are treated as coincident.
    pub tol_x: f64,
    /// Values closer than this are treated as equal.
    pub tol_v: f64,
    /// Slopes at or below this are treated as exactly flat.
    pub tol_slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_x: 1e-12,
            tol_v: 1e-12,
            tol_slope: 1e-10,
        }
    }
}
