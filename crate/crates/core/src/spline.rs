//! G1 spline through a point stream, built one segment at a time with the
//! frame handed from each segment to the next.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{self, DisplacementAnalysis, HermiteData, HermiteSolution};
use crate::ph::PHQuintic;
use crate::quat::{Frame, UnitVec3, Vec3};
use crate::rrmf::{class_i_check, RationalFrame};
use crate::tol::Tolerances;

/// Turning angle `tau` at and above which no admissible end tangent exists.
pub const TAU_LIMIT: f64 = 4.0 * PI / 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnotMode {
    Chord,
    Uniform,
}

impl std::str::FromStr for KnotMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<KnotMode> {
        match s {
            "chord" => Ok(KnotMode::Chord),
            "uniform" => Ok(KnotMode::Uniform),
            _ => Err(Error::Validation(format!("unknown knot mode '{s}' (expected chord or uniform)"))),
        }
    }
}

/// Points to interpolate and the frame at the first point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointStream {
    pub points: Vec<Vec3>,
    pub initial_frame: Frame,
}

impl PointStream {
    pub fn new(points: Vec<Vec3>, initial_frame: Frame) -> Result<PointStream> {
        validate_points(&points)?;
        initial_frame.validate(1e-9)?;
        Ok(PointStream { points, initial_frame })
    }
}

fn validate_points(points: &[Vec3]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::Validation("a stream needs at least two points".into()));
    }
    for (k, p) in points.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::Validation(format!("point {k} is not finite")));
        }
    }
    for (k, w) in points.windows(2).enumerate() {
        if (w[1] - w[0]).norm() == 0.0 {
            return Err(Error::Validation(format!("points {k} and {} coincide", k + 1)));
        }
    }
    Ok(())
}

/// `u_0 = 0`, `u_k = u_{k-1} + |p_k - p_{k-1}|`.
pub fn chord_knots(points: &[Vec3]) -> Vec<f64> {
    let mut u = vec![0.0];
    for w in points.windows(2) {
        let last = *u.last().expect("nonempty");
        u.push(last + (w[1] - w[0]).norm());
    }
    u
}

/// `u_k = k`.
pub fn uniform_knots(n_points: usize) -> Vec<f64> {
    (0..n_points).map(|k| k as f64).collect()
}

pub fn knots(points: &[Vec3], mode: KnotMode) -> Vec<f64> {
    match mode {
        KnotMode::Chord => chord_knots(points),
        KnotMode::Uniform => uniform_knots(points.len()),
    }
}

/// Interior MinAJ2 weights `(A, B, C, D, E)` for spacings `h_k`, `h_{k+1}`.
pub fn minaj2_weights(hk: f64, hk1: f64) -> [f64; 5] {
    let s = hk1 + hk;
    [
        -hk1 * hk1 * (2.0 * hk1 * hk1 + 6.0 * hk1 * hk + 3.0 * hk * hk),
        -hk * hk1 * hk1 * s * s,
        s * (2.0 * hk1.powi(3) + 4.0 * hk1 * hk1 * hk - hk1 * hk * hk - hk.powi(3)),
        hk.powi(3) * (2.0 * hk1 + hk),
        hk * hk1 * s * (hk1 * hk1 + 3.0 * hk1 * hk + hk * hk),
    ]
}

/// Start reference `((p1 - p0)(h2 + h1)^2 + (p1 - p2) h1^2) / (h1 h2 (h2 + h1))`.
///
/// Direction-correct on collinear data but not an exact derivative: on
/// `p(u) = u` with unit spacing it returns 1.5.
pub fn minaj2_start(p: &[Vec3], h1: f64, h2: f64) -> Vec3 {
    let s = h1 + h2;
    ((p[1] - p[0]) * (s * s) + (p[1] - p[2]) * (h1 * h1)) / (h1 * h2 * s)
}

/// Interior MinAJ2 step from the previous reference derivative.
pub fn minaj2_step(p_prev: Vec3, d_prev: Vec3, p: Vec3, p_next: Vec3, hk: f64, hk1: f64) -> Vec3 {
    let [a, b, c, d, e] = minaj2_weights(hk, hk1);
    (p_prev * a + d_prev * b + p * c + p_next * d) / e
}

/// Reference derivatives by MinAJ2, not normalized. Needs at least three
/// points; with two points the chord direction is used at both ends.
pub fn minaj2_derivatives(points: &[Vec3], knots: &[f64]) -> Result<Vec<Vec3>> {
    validate_points(points)?;
    if knots.len() != points.len() {
        return Err(Error::Validation("knot vector length differs from point count".into()));
    }
    let n = points.len() - 1;
    let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    if h.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Validation("knots must be strictly increasing".into()));
    }
    if n == 1 {
        let d = (points[1] - points[0]) / h[0];
        return Ok(vec![d, d]);
    }
    // h[k-1] holds h_k = u_k - u_{k-1}
    let mut d = vec![minaj2_start(points, h[0], h[1])];
    for k in 1..n {
        d.push(minaj2_step(points[k - 1], d[k - 1], points[k], points[k + 1], h[k - 1], h[k]));
    }
    let hn = h[n - 1];
    d.push((points[n] - points[n - 1]) * (2.0 / hn) - d[n - 1]);
    Ok(d)
}

/// Unit reference tangents by MinAJ2.
pub fn minaj2_tangents(points: &[Vec3], knots: &[f64]) -> Result<Vec<UnitVec3>> {
    minaj2_derivatives(points, knots)?
        .into_iter()
        .enumerate()
        .map(|(k, d)| {
            d.normalize()
                .map_err(|_| Error::Validation(format!("reference tangent {k} vanishes")))
        })
        .collect()
}

/// Frame with the given tangent and `f2` along the part of `+z` normal to
/// it, falling back to `+y`.
pub fn default_frame(tangent: UnitVec3) -> Frame {
    Frame::from_tangent_hint(tangent, Vec3::Z)
        .or_else(|_| Frame::from_tangent_hint(tangent, Vec3::Y))
        .expect("z and y cannot both be parallel to a unit vector")
}

/// Admissibility of the end tangent `u` for start tangent `u_i` and chord
/// direction `du`: `gamma > 2 pi / 5`, or `b . (du - S(2 pi / 3)) > 0`.
pub fn tangent_admissible(u_i: UnitVec3, u: Vec3, du: Vec3) -> bool {
    let Ok(u) = u.normalize() else { return false };
    let gamma = u_i.angle_to(*u);
    if !(gamma > 1e-12 && gamma < PI - 1e-12) {
        return false;
    }
    if gamma > hermite::GAMMA_CRITICAL {
        return true;
    }
    match DisplacementAnalysis::new(u_i, u) {
        Ok(a) => hermite::sufficient_condition_for(&a, du),
        Err(_) => false,
    }
}

/// End tangent on the symmetry circle of `u_i` about `du`, closest to
/// `u_ref` among admissible directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndTangent {
    pub u_f: UnitVec3,
    pub tau: f64,
    pub gamma: f64,
    pub gamma_max: f64,
    /// Whether the unconstrained optimum was admissible.
    pub unconstrained: bool,
}

pub fn generate_end_tangent(u_i: UnitVec3, delta_p: Vec3, u_ref: Vec3) -> Result<EndTangent> {
    let du = *delta_p.normalize()?;
    let tau = u_i.angle_to(du);
    if tau >= TAU_LIMIT {
        return Err(Error::InfeasibleTurn { tau });
    }
    let gamma_max = if tau <= PI / 2.0 { 2.0 * tau } else { 2.0 * (PI - tau) };
    let c = du * u_i.dot(du);
    let e1 = *u_i - c;
    let e2 = du.cross(e1);
    let at = |psi: f64| c + e1 * psi.cos() + e2 * psi.sin();
    let ok = |psi: f64| tangent_admissible(u_i, at(psi), du);
    let objective = |psi: f64| at(psi).dot(u_ref);
    let finish = |psi: f64, unconstrained: bool| -> Result<EndTangent> {
        let u = UnitVec3::normalize(at(psi))?;
        Ok(EndTangent {
            u_f: u,
            tau,
            gamma: u_i.angle_to(*u),
            gamma_max,
            unconstrained,
        })
    };

    let (x, y) = (e1.dot(u_ref), e2.dot(u_ref));
    let psi_star = if x.hypot(y) <= 1e-14 * e1.norm() { PI } else { y.atan2(x).rem_euclid(TAU) };
    if ok(psi_star) {
        return finish(psi_star, true);
    }

    // Feasible arcs on a grid, boundaries refined by bisection toward the
    // feasible side.
    const GRID: usize = 720;
    let grid: Vec<f64> = (0..=GRID).map(|k| TAU * k as f64 / GRID as f64).collect();
    let flags: Vec<bool> = grid.iter().map(|&p| ok(p)).collect();
    let refine = |mut good: f64, mut bad: f64| {
        for _ in 0..60 {
            let mid = 0.5 * (good + bad);
            if ok(mid) {
                good = mid;
            } else {
                bad = mid;
            }
            if (good - bad).abs() < 1e-13 {
                break;
            }
        }
        good
    };
    let mut best: Option<(f64, f64)> = None;
    let mut consider = |psi: f64| {
        let v = objective(psi);
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, psi));
        }
    };
    for k in 0..GRID {
        let (a, b) = (flags[k], flags[k + 1]);
        if a && !b {
            consider(refine(grid[k], grid[k + 1]));
        } else if !a && b {
            consider(refine(grid[k + 1], grid[k]));
        } else if a && b {
            consider(grid[k]);
        }
    }
    match best {
        Some((_, psi)) => finish(psi, false),
        None => Err(Error::NoAdmissibleTangent),
    }
}

/// One spline segment: curve and frame, plus the solver parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub curve: PHQuintic,
    pub frame: RationalFrame,
    pub mu: f64,
    pub phi2: f64,
}

impl From<&HermiteSolution> for Segment {
    fn from(s: &HermiteSolution) -> Segment {
        Segment {
            curve: s.curve,
            frame: s.frame.clone(),
            mu: s.mu,
            phi2: s.phi2,
        }
    }
}

/// Per-segment construction diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub index: usize,
    pub tau: f64,
    pub gamma: f64,
    pub gamma_max: f64,
    pub phi2: f64,
    pub mu: f64,
    pub unconstrained_tangent: bool,
    pub sufficient_condition: bool,
    pub candidates: Vec<f64>,
    pub iterations: usize,
    pub bisection_residual: f64,
    pub direction_residual: f64,
    pub class_i_residual: f64,
    pub frame_residual: f64,
    pub ph_residual: f64,
    pub symmetry_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplinePath {
    pub knots: Vec<f64>,
    pub segments: Vec<Segment>,
    pub initial_frame: Frame,
    /// Empty for paths loaded from a file.
    pub reports: Vec<SegmentReport>,
}

/// Largest mismatches across interior knots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Continuity {
    pub position: f64,
    pub tangent: f64,
    pub frame: f64,
}

/// Builds the spline. `refs` supplies reference tangents (one per point);
/// without them MinAJ2 estimates are used.
pub fn build(stream: &PointStream, mode: KnotMode, refs: Option<&[Vec3]>) -> Result<SplinePath> {
    build_with(stream, mode, refs, &Tolerances::default())
}

pub fn build_with(stream: &PointStream, mode: KnotMode, refs: Option<&[Vec3]>, tol: &Tolerances) -> Result<SplinePath> {
    let pts = &stream.points;
    validate_points(pts)?;
    let knots = knots(pts, mode);
    let refs: Vec<Vec3> = match refs {
        Some(r) if r.len() == pts.len() => r.to_vec(),
        Some(r) => {
            return Err(Error::Validation(format!(
                "{} reference tangents for {} points",
                r.len(),
                pts.len()
            )))
        }
        None => minaj2_derivatives(pts, &knots)?,
    };
    let mut frame = stream.initial_frame;
    let mut segments = Vec::new();
    let mut reports = Vec::new();
    for k in 0..pts.len() - 1 {
        let dp = pts[k + 1] - pts[k];
        let gap = (k > 0).then(|| (pts[k] - pts[k - 1]).angle_to(dp));
        let wrap = |e: Error| {
            let hint = e.is_infeasible().then(|| {
                format!("insert a middle point between p{k} and p{}", k + 1)
            });
            Error::Segment {
                index: k,
                hint,
                gap,
                source: Box::new(e),
            }
        };
        let u_i = UnitVec3::normalize(frame.f1).map_err(wrap)?;
        let et = generate_end_tangent(u_i, dp, refs[k + 1]).map_err(wrap)?;
        let data = HermiteData::new(pts[k], pts[k + 1], frame, et.u_f, tol.symmetry).map_err(wrap)?;
        let sol = hermite::solve_with(&data, tol).map_err(wrap)?;
        let d = &sol.diagnostics;
        reports.push(SegmentReport {
            index: k,
            tau: et.tau,
            gamma: et.gamma,
            gamma_max: et.gamma_max,
            phi2: sol.phi2,
            mu: sol.mu,
            unconstrained_tangent: et.unconstrained,
            sufficient_condition: d.sufficient_condition,
            candidates: d.candidates.clone(),
            iterations: d.iterations,
            bisection_residual: d.bisection_residual,
            direction_residual: d.direction_residual,
            class_i_residual: d.class_i_residual,
            frame_residual: d.frame_residual,
            ph_residual: sol.curve.ph_identity_residual(),
            symmetry_residual: data.symmetry_residual(),
        });
        frame = sol.end_frame();
        segments.push(Segment::from(&sol));
    }
    Ok(SplinePath {
        knots,
        segments,
        initial_frame: stream.initial_frame,
        reports,
    })
}

impl SplinePath {
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().expect("nonempty"))
    }

    /// Segment index and local parameter for a global parameter.
    pub fn locate(&self, u: f64) -> Result<(usize, f64)> {
        let (lo, hi) = self.domain();
        if !(u >= lo && u <= hi) {
            return Err(Error::OutOfRange { u, lo, hi });
        }
        let n = self.segments.len();
        let k = self.knots[1..n].partition_point(|&x| x <= u).min(n - 1);
        let t = (u - self.knots[k]) / (self.knots[k + 1] - self.knots[k]);
        Ok((k, t.clamp(0.0, 1.0)))
    }

    pub fn eval(&self, u: f64) -> Result<(Vec3, Frame)> {
        let (k, t) = self.locate(u)?;
        let s = &self.segments[k];
        Ok((s.curve.point(t), s.frame.eval(t)))
    }

    /// `n + 1` uniform global samples `(u, point, frame)`.
    pub fn sample(&self, n: usize) -> Vec<(f64, Vec3, Frame)> {
        let (lo, hi) = self.domain();
        let n = n.max(1);
        (0..=n)
            .map(|i| {
                let u = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
                let (p, f) = self.eval(u).expect("inside domain");
                (u, p, f)
            })
            .collect()
    }

    pub fn continuity(&self) -> Continuity {
        let mut c = Continuity::default();
        for w in self.segments.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            c.position = c.position.max((a.curve.end_point() - b.curve.r0).norm());
            c.tangent = c.tangent.max(a.curve.h[4].angle_to(b.curve.h[0]));
            c.frame = c.frame.max(a.frame.eval(1.0).angle_to(&b.frame.eval(0.0)));
        }
        c
    }

    /// Largest class-I and PH identity residuals over the segments.
    pub fn max_residuals(&self) -> (f64, f64) {
        self.segments.iter().fold((0.0f64, 0.0f64), |(ci, ph), s| {
            (
                ci.max(class_i_check(&s.curve.preimage).relative()),
                ph.max(s.curve.ph_identity_residual()),
            )
        })
    }
}
