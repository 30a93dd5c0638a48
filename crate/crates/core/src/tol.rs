//! Numerical tolerances.
//!
//! The fixed hierarchy is 1e-14 for algebraic identities, 1e-12 for unit
//! norms and 1e-10 for nonlinear round trips. Solver knobs can be overridden
//! at run time through `RRMF_TOL_*` environment variables.

use std::env;

/// Algebraic identities (scalar parts of star/box products, etc.).
pub const ALGEBRAIC: f64 = 1e-14;
/// Unit-norm checks.
pub const UNIT: f64 = 1e-12;
/// Nonlinear round trips.
pub const ROUND_TRIP: f64 = 1e-10;
/// Relative class-I residual, scaled by `max |A_i|^2`.
pub const CLASS_I: f64 = 1e-9;
/// Relative residual of the rational-frame identity accepted by the W solve.
pub const FRAME_IDENTITY: f64 = 1e-8;
/// Relative residual above which the W solve is declared failed.
pub const FRAME_FAIL: f64 = 1e-6;
/// Window around `2 pi / 5` treated as the threshold angle itself.
pub const GAMMA_WINDOW: f64 = 1e-9;
/// Symmetry condition on Hermite data.
pub const SYMMETRY: f64 = 1e-9;

/// Run-time adjustable solver tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Bisection stopping width on the free angle.
    pub bisection: f64,
    pub max_iter: usize,
    /// Distance below which `du` counts as a direct hit of `S(0)` or `S(pi)`.
    pub direct_hit: f64,
    /// Symmetry-condition residual accepted on Hermite data.
    pub symmetry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            bisection: 1e-12,
            max_iter: 200,
            direct_hit: 1e-12,
            symmetry: SYMMETRY,
        }
    }
}

impl Tolerances {
    /// Defaults overridden by `RRMF_TOL_BISECTION`, `RRMF_TOL_MAX_ITER`,
    /// `RRMF_TOL_DIRECT_HIT` and `RRMF_TOL_SYMMETRY` when set and parseable.
    pub fn from_env() -> Self {
        Self::from_lookup(|k| env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Self {
        let mut t = Tolerances::default();
        let real = |k: &str, d: f64| {
            get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite() && *v > 0.0)
                .unwrap_or(d)
        };
        t.bisection = real("RRMF_TOL_BISECTION", t.bisection);
        t.direct_hit = real("RRMF_TOL_DIRECT_HIT", t.direct_hit);
        t.symmetry = real("RRMF_TOL_SYMMETRY", t.symmetry);
        t.max_iter = get("RRMF_TOL_MAX_ITER")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|v| *v > 0)
            .unwrap_or(t.max_iter);
        t
    }
}
