//! Independent numerical ground truth.
//!
//! Rotation-minimizing frames are integrated directly from the transport ODE
//! `f2' = -(f2 . T') T` with an adaptive Dormand-Prince 5(4) scheme, and
//! cross-checked against the Frenet-angle form `psi' = -tau sigma`. The
//! module also holds finite-difference checks and brute-force sweeps of the
//! unit PH displacement.

use std::f64::consts::{PI, TAU};

use crate::bernstein::{self, Linear};
use crate::error::{Error, Result};
use crate::hermite::DisplacementAnalysis;
use crate::ph::PHQuintic;
use crate::quat::{Frame, UnitVec3, Vec3};
use crate::rrmf::RationalFrame;

/// Default local error tolerance of the integrator.
pub const ODE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
    pub max_error_estimate: f64,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` with Dormand-Prince 5(4).
///
/// `norm` measures the error estimate and `project` is applied to every
/// accepted state.
#[allow(clippy::too_many_arguments)]
pub fn dopri5<S, F, N, P>(
    f: F,
    t0: f64,
    y0: S,
    t1: f64,
    tol: f64,
    norm: N,
    project: P,
    stats: &mut OdeStats,
) -> Result<S>
where
    S: Linear,
    F: Fn(f64, S) -> S,
    N: Fn(S) -> f64,
    P: Fn(S) -> S,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = span / 16.0;
    let mut k0 = f(t, y);
    loop {
        let remaining = t1 - t;
        if remaining.abs() <= 1e-15 * span.abs() {
            return Ok(y);
        }
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        if h.abs() < 1e-14 * span.abs() {
            return Err(Error::Integration {
                t,
                message: "step size underflow".into(),
            });
        }
        let mut k = [k0; 7];
        for s in 1..7 {
            let mut acc = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                if A[s][j] != 0.0 {
                    acc = acc + *kj * (h * A[s][j]);
                }
            }
            k[s] = f(t + C[s] * h, acc);
        }
        // k[6] is evaluated at the 5th-order solution (FSAL).
        let mut y5 = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            if A[6][j] != 0.0 {
                y5 = y5 + *kj * (h * A[6][j]);
            }
        }
        let mut err_vec = k[0] * (h * E[0]);
        for (j, kj) in k.iter().enumerate().skip(1) {
            if E[j] != 0.0 {
                err_vec = err_vec + *kj * (h * E[j]);
            }
        }
        let err = norm(err_vec);
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                message: "non-finite error estimate".into(),
            });
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
        };
        if err <= tol {
            t += h;
            y = project(y5);
            k0 = f(t, y);
            stats.steps += 1;
            stats.max_error_estimate = stats.max_error_estimate.max(err);
            if stats.steps > 1_000_000 {
                return Err(Error::Integration {
                    t,
                    message: "too many steps".into(),
                });
            }
        } else {
            stats.rejected += 1;
        }
        h *= factor;
    }
}

/// Sampled frames from a numerical integration.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericFrameTrace {
    pub samples: Vec<(f64, Frame)>,
    pub stats: OdeStats,
}

impl NumericFrameTrace {
    pub fn max_orthonormality_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, f)| f.orthonormality_error())
            .fold(0.0, f64::max)
    }
}

fn unit_tangent_and_derivative(c: &PHQuintic, dh: &[Vec3], dsigma: &[f64], t: f64) -> (Vec3, Vec3) {
    let h = c.hodograph_at(t);
    let s = c.speed(t);
    let hp = bernstein::eval(dh, t);
    let sp = bernstein::eval(dsigma, t);
    (h / s, (hp * s - h * sp) / (s * s))
}

fn sample_times(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

fn check_start(c: &PHQuintic, initial: &Frame) -> Result<()> {
    initial.validate(1e-9)?;
    let t0 = c.hodograph_at(0.0) / c.speed(0.0);
    if (t0 - initial.f1).norm() > 1e-8 {
        return Err(Error::Validation(
            "initial frame is not adapted to the curve".into(),
        ));
    }
    if c.preimage.is_degenerate() {
        let d = c.preimage.degeneracy();
        return Err(Error::DegeneratePreImage {
            t: d.t_min,
            sigma_min: d.sigma_min,
        });
    }
    Ok(())
}

/// Integrates `f2' = -(f2 . T') T` on `[0, 1]`, sampling at `n_samples + 1`
/// uniform parameters. `f2` is projected onto the normal plane and
/// renormalized after every step.
pub fn integrate_rmf(c: &PHQuintic, initial: &Frame, n_samples: usize, tol: f64) -> Result<NumericFrameTrace> {
    check_start(c, initial)?;
    let dh = bernstein::derivative(&c.h);
    let ds = bernstein::derivative(&c.sigma_coeffs);
    let rhs = |t: f64, f2: Vec3| {
        let (tan, dtan) = unit_tangent_and_derivative(c, &dh, &ds, t);
        tan * -f2.dot(dtan)
    };
    let mut stats = OdeStats::default();
    let times = sample_times(n_samples.max(1));
    let mut samples = vec![(0.0, *initial)];
    let mut f2 = initial.f2;
    for w in times.windows(2) {
        let (t_end, _) = (w[1], w[0]);
        let tan_end = c.hodograph_at(t_end) / c.speed(t_end);
        f2 = dopri5(rhs, w[0], f2, w[1], tol, Vec3::norm, |v| v, &mut stats)?;
        let v = f2 - tan_end * f2.dot(tan_end);
        f2 = v / v.norm();
        samples.push((t_end, Frame::new(tan_end, f2, tan_end.cross(f2))));
    }
    Ok(NumericFrameTrace { samples, stats })
}

/// Frenet frame `(T, N, B)` and torsion at `t`, or `None` where the
/// curvature vanishes.
pub fn frenet(c: &PHQuintic, t: f64) -> Option<(Frame, f64)> {
    let (d2, d3) = c.higher_derivatives();
    let r1 = c.hodograph_at(t);
    let r2 = bernstein::eval(&d2, t);
    let r3 = bernstein::eval(&d3, t);
    let x = r1.cross(r2);
    let xn = x.norm_sq();
    if xn <= 1e-24 * r1.norm_sq().powi(2).max(f64::MIN_POSITIVE) {
        return None;
    }
    let tan = r1 / r1.norm();
    let b = x / xn.sqrt();
    Some((Frame::new(tan, b.cross(tan), b), x.dot(r3) / xn))
}

/// Integrates the Frenet-relative angle `psi' = -tau sigma`, so that
/// `f2 = cos(psi) N + sin(psi) B`. Fails where the curvature vanishes.
pub fn integrate_rmf_angle(c: &PHQuintic, initial: &Frame, n_samples: usize, tol: f64) -> Result<NumericFrameTrace> {
    check_start(c, initial)?;
    let curvature_error = |t: f64| Error::Integration {
        t,
        message: "curvature vanishes, Frenet frame undefined".into(),
    };
    let (fr0, _) = frenet(c, 0.0).ok_or_else(|| curvature_error(0.0))?;
    let mut psi = initial.f2.dot(fr0.f3).atan2(initial.f2.dot(fr0.f2));
    let rhs = |t: f64, _: f64| match frenet(c, t) {
        Some((_, tau)) => -tau * c.speed(t),
        None => f64::NAN,
    };
    let mut stats = OdeStats::default();
    let times = sample_times(n_samples.max(1));
    let mut samples = vec![(0.0, *initial)];
    for w in times.windows(2) {
        psi = dopri5(rhs, w[0], psi, w[1], tol, f64::abs, |v| v, &mut stats)
            .map_err(|_| curvature_error(w[0]))?;
        let (fr, _) = frenet(c, w[1]).ok_or_else(|| curvature_error(w[1]))?;
        let (s, co) = psi.sin_cos();
        let f2 = fr.f2 * co + fr.f3 * s;
        samples.push((w[1], Frame::new(fr.f1, f2, fr.f1.cross(f2))));
    }
    Ok(NumericFrameTrace { samples, stats })
}

/// Largest angle between the rational `f2` and the traced `f2` over the samples.
pub fn compare_frames(rational: &RationalFrame, trace: &NumericFrameTrace) -> f64 {
    trace
        .samples
        .iter()
        .map(|(t, f)| rational.eval(*t).f2.angle_to(f.f2))
        .fold(0.0, f64::max)
}

/// Largest `f2` angle between two traces sampled at common parameters.
pub fn compare_traces(a: &NumericFrameTrace, b: &NumericFrameTrace) -> f64 {
    let mut worst = 0.0f64;
    let mut j = 0;
    for (t, fa) in &a.samples {
        while j < b.samples.len() && b.samples[j].0 < *t - 1e-15 {
            j += 1;
        }
        if let Some((tb, fb)) = b.samples.get(j) {
            if (tb - t).abs() <= 1e-15 {
                worst = worst.max(fa.f2.angle_to(fb.f2));
            }
        }
    }
    worst
}

/// `|f2'(t) . f3(t)|` by central differences: the tangential component of
/// the angular velocity, zero for a rotation-minimizing frame.
pub fn rotation_minimality_defect(frame: impl Fn(f64) -> Frame, t: f64, h: f64) -> f64 {
    let (lo, hi) = ((t - h).max(0.0), (t + h).min(1.0));
    let d = (frame(hi).f2 - frame(lo).f2) / (hi - lo);
    d.dot(frame(t).f3).abs()
}

/// Maximum of [`rotation_minimality_defect`] over `n + 1` uniform parameters.
pub fn max_rotation_minimality_defect(frame: &RationalFrame, n: usize) -> f64 {
    sample_times(n)
        .into_iter()
        .map(|t| rotation_minimality_defect(|s| frame.eval(s), t, 1e-5))
        .fold(0.0, f64::max)
}

/// Relative error of the central difference of `r` against the hodograph.
pub fn hodograph_fd_error(c: &PHQuintic, h: f64, n: usize) -> f64 {
    let scale = c.h.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    sample_times(n)
        .into_iter()
        .map(|t| {
            let fd = (c.point(t + h) - c.point(t - h)) / (2.0 * h);
            (fd - c.hodograph_at(t)).norm()
        })
        .fold(0.0, f64::max)
        / scale
}

/// Brute-force sweep of the unit PH displacement over `phi2 in [0, 2 pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub gamma: f64,
    pub phi: Vec<f64>,
    /// Unwrapped `atan2(S . n, S . b)`; `NaN` where the displacement vanishes.
    pub angle: Vec<f64>,
    pub min_s_dot_b: f64,
    pub max_s_dot_b: f64,
    pub min_i_dot_b: f64,
    /// Grid angles where `|I| < 1e-12`.
    pub vanishing: Vec<f64>,
    /// Net turn of the angle over the loop divided by `2 pi`, rounded.
    pub winding: i64,
}

impl SweepReport {
    /// Number of grid crossings of the direction `target` (mod `2 pi`).
    pub fn hits(&self, target: f64) -> usize {
        let valid: Vec<f64> = self.angle.iter().copied().filter(|a| a.is_finite()).collect();
        let mut n = 0;
        for w in valid.windows(2) {
            let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
            let k0 = ((lo - target) / TAU).ceil() as i64;
            let k1 = ((hi - target) / TAU).floor() as i64;
            if k1 >= k0 {
                // count each crossing once: include lower end, exclude upper
                for k in k0..=k1 {
                    let x = target + k as f64 * TAU;
                    if x >= lo && x < hi || (lo == hi && x == lo) {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    /// Range `(min, max)` of the unwrapped angle.
    pub fn coverage(&self) -> (f64, f64) {
        self.angle
            .iter()
            .filter(|a| a.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)))
    }
}

pub fn sweep_s(gamma: f64, grid: usize) -> Result<SweepReport> {
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::Validation(format!("gamma = {gamma} outside (0, pi)")));
    }
    let (sh, ch) = (0.5 * gamma).sin_cos();
    let a = DisplacementAnalysis::new(
        UnitVec3::normalize(Vec3::new(ch, sh, 0.0))?,
        UnitVec3::normalize(Vec3::new(ch, -sh, 0.0))?,
    )?;
    let mut rep = SweepReport {
        gamma,
        phi: Vec::with_capacity(grid),
        angle: Vec::with_capacity(grid + 1),
        min_s_dot_b: f64::INFINITY,
        max_s_dot_b: f64::NEG_INFINITY,
        min_i_dot_b: f64::INFINITY,
        vanishing: Vec::new(),
        winding: 0,
    };
    let mut prev: Option<f64> = None;
    let mut first: Option<f64> = None;
    for k in 0..=grid {
        let phi = TAU * k as f64 / grid as f64;
        let i = a.displacement(phi);
        if k < grid {
            rep.phi.push(phi);
            rep.min_i_dot_b = rep.min_i_dot_b.min(i.dot(*a.b));
        }
        if i.norm() < 1e-12 {
            if k < grid {
                rep.vanishing.push(phi);
                rep.angle.push(f64::NAN);
            }
            continue;
        }
        let s = i / i.norm();
        let raw = s.dot(*a.n).atan2(s.dot(*a.b));
        let ang = match prev {
            None => raw,
            Some(p) => p + (raw - p + PI).rem_euclid(TAU) - PI,
        };
        prev = Some(ang);
        if k < grid {
            rep.min_s_dot_b = rep.min_s_dot_b.min(s.dot(*a.b));
            rep.max_s_dot_b = rep.max_s_dot_b.max(s.dot(*a.b));
            rep.angle.push(ang);
            first.get_or_insert(ang);
        } else if let Some(f) = first {
            rep.winding = ((ang - f) / TAU).round() as i64;
        }
    }
    Ok(rep)
}
