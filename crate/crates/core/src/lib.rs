//! Piecewise-quintic Pythagorean-hodograph splines with rational
//! rotation-minimizing frames.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod error;
pub mod hermite;
pub mod io;
pub mod oracle;
pub mod ph;
pub mod quat;
pub mod rrmf;
pub mod spline;
pub mod tol;

pub use error::{Error, Result};
pub use hermite::{HermiteData, HermiteSolution};
pub use ph::{PHQuintic, PreImage, TangentIndicatrix};
pub use quat::{Frame, Quat, UnitVec3, Vec3};
pub use rrmf::RationalFrame;
pub use spline::{KnotMode, PointStream, SplinePath};
