//! Local G1 Hermite interpolation with a one-sided frame condition.
//!
//! Given end points, the initial frame `(u_i, v_i, w_i)` and an end tangent
//! `u_f` symmetric to `u_i` with respect to the chord direction, a class-I
//! quintic is built that interpolates positions, tangent directions and the
//! initial frame. The free angle `phi2` places `s2` on the bisecting great
//! circle of `u_i, u_f` and is found by bisection so that the scaled PH
//! displacement points along the chord.
//!
//! Internally the pre-image axis is `u_i` itself, with `j = -v_i` and
//! `k = -w_i`, so the initial phase vanishes and `U0 = u_i`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ph::{PHQuintic, PreImage};
use crate::quat::{bisector, neg_cross, star, Frame, Quat, UnitVec3, Vec3};
use crate::rrmf::{class_i_check, RationalFrame};
use crate::tol::{self, Tolerances};

/// `2 pi / 5`, the tangent angle at which `I(pi)` vanishes.
pub const GAMMA_CRITICAL: f64 = 2.0 * PI / 5.0;

/// Input of one local interpolation problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiteData {
    pub p_i: Vec3,
    pub p_f: Vec3,
    pub frame: Frame,
    pub u_f: UnitVec3,
}

impl HermiteData {
    /// Validates the data, including the symmetry condition
    /// `u_i . du = du . u_f` within `symmetry_tol`.
    pub fn new(p_i: Vec3, p_f: Vec3, frame: Frame, u_f: UnitVec3, symmetry_tol: f64) -> Result<HermiteData> {
        let d = HermiteData { p_i, p_f, frame, u_f };
        if !(p_f - p_i).is_finite() || (p_f - p_i).norm() == 0.0 {
            return Err(Error::Validation("end points coincide".into()));
        }
        frame.validate(1e-9)?;
        if frame.f1.cross(*u_f).norm() <= tol::UNIT {
            return Err(Error::Validation(
                "end tangents are parallel or antiparallel (gamma outside (0, pi))".into(),
            ));
        }
        let r = d.symmetry_residual();
        if r > symmetry_tol {
            return Err(Error::Validation(format!(
                "end tangent is not symmetric to the initial tangent about the chord (residual {r:e})"
            )));
        }
        Ok(d)
    }

    pub fn u_i(&self) -> UnitVec3 {
        UnitVec3::normalize(self.frame.f1).expect("validated frame")
    }

    pub fn delta_p(&self) -> Vec3 {
        self.p_f - self.p_i
    }

    pub fn delta_u(&self) -> UnitVec3 {
        self.delta_p().normalize().expect("validated displacement")
    }

    /// `|u_i . du - du . u_f|`.
    pub fn symmetry_residual(&self) -> f64 {
        let du = self.delta_p() / self.delta_p().norm();
        (self.frame.f1.dot(du) - du.dot(*self.u_f)).abs()
    }
}

/// The scaled PH displacement `I(phi2) = q1 + q2 + q3` and its direction `S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisplacementAnalysis {
    pub u_i: UnitVec3,
    pub u_f: UnitVec3,
    pub gamma: f64,
    pub b: UnitVec3,
    pub n: UnitVec3,
    pub q1: Vec3,
}

impl DisplacementAnalysis {
    pub fn new(u_i: UnitVec3, u_f: UnitVec3) -> Result<DisplacementAnalysis> {
        let b = bisector(*u_i, *u_f)?;
        let n = neg_cross(*u_i, *u_f)?;
        Ok(DisplacementAnalysis {
            u_i,
            u_f,
            gamma: u_i.angle_to(*u_f),
            b,
            n,
            q1: *u_i + *u_f,
        })
    }

    pub fn from_data(d: &HermiteData) -> Result<DisplacementAnalysis> {
        DisplacementAnalysis::new(d.u_i(), d.u_f)
    }

    pub fn u0(&self) -> Quat {
        Quat::pure(*self.u_i)
    }

    /// `U2(phi) = cos(phi) (0; b) + sin(phi) (-cos(gamma/2); sin(gamma/2) n)`.
    pub fn u2(&self, phi: f64) -> Quat {
        let (sh, ch) = (0.5 * self.gamma).sin_cos();
        let (s, c) = phi.sin_cos();
        Quat::new(-s * ch, *self.b * c + *self.n * (s * sh))
    }

    /// `q2 = U0 * U2`, equal to `cos(phi) b + sin(phi) sin(gamma/2) n`.
    pub fn q2(&self, phi: f64) -> Vec3 {
        star(self.u0(), self.u2(phi), self.u_i)
    }

    /// `s02`, the image of the axis under `U0 + U2`.
    pub fn s02(&self, phi: f64) -> Vec3 {
        let p = self.u0() + self.u2(phi);
        p.sandwich(*self.u_i) / p.norm_sq()
    }

    /// Unit quaternion `U1` and its phase `theta1`, chosen so that
    /// `scal((U0 + U2) i U1*) = 0` and `s_m` lies on the same side as the
    /// bisector of `s02` and `s2`.
    pub fn u1(&self, phi: f64) -> (Quat, f64) {
        let i = self.u_i;
        let iq = Quat::pure(*i);
        let s2 = self.q2(phi);
        let s2 = s2 / s2.norm();
        let u1_hat = match bisector(*i, s2) {
            Ok(b) => Quat::pure(*b),
            Err(_) => Quat::pure(*crate::quat::orthonormal_complement(i).0),
        };
        let p = self.u0() + self.u2(phi);
        let x1 = (p * iq * u1_hat.conj()).scalar;
        let y1 = -(p * u1_hat.conj()).scalar;
        let theta = x1.atan2(y1);
        let toward = self.s02(phi) + s2;
        let pick = |th: f64| {
            let u1 = u1_hat * Quat::exp(i, th);
            ((p * iq * u1.conj()).vector.dot(toward), u1)
        };
        let (d0, u_a) = pick(theta);
        let (d1, u_b) = pick(theta + PI);
        if d0 >= d1 {
            (u_a, theta)
        } else {
            (u_b, theta + PI)
        }
    }

    /// `q3 = sqrt|q2| (U0 + U2) * U1`.
    pub fn q3(&self, phi: f64) -> Vec3 {
        let (u1, _) = self.u1(phi);
        let p = self.u0() + self.u2(phi);
        star(p, u1, self.u_i) * self.q2(phi).norm().sqrt()
    }

    /// Scaled PH displacement `I(phi2)`.
    pub fn displacement(&self, phi: f64) -> Vec3 {
        self.q1 + self.q2(phi) + self.q3(phi)
    }

    /// Unit displacement `S(phi2)`.
    pub fn s(&self, phi: f64) -> Result<UnitVec3> {
        let v = self.displacement(phi);
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(Error::VanishingDisplacement { phi2: phi, norm });
        }
        Ok(UnitVec3::normalize(v).expect("nonzero"))
    }

    /// `S(phi2) . b`, or `None` where the displacement vanishes.
    pub fn s_dot_b(&self, phi: f64) -> Option<f64> {
        self.s(phi).ok().map(|s| s.dot(*self.b))
    }

    /// Unit pre-image `(U0, sqrt|q2| U1, U2)` for the angle `phi2`.
    pub fn unit_preimage(&self, phi: f64) -> (PreImage, f64) {
        let (u1, theta1) = self.u1(phi);
        let k = self.q2(phi).norm().sqrt();
        (
            PreImage::new(self.u0(), u1 * k, self.u2(phi), self.u_i),
            theta1,
        )
    }
}

/// Phase `alpha0` of `U0 = b(u_i, i) e^{alpha0 i}` that reproduces the
/// initial frame for the quaternion basis `(i, j, k)`.
pub fn alpha0(u_i: Vec3, _v_i: Vec3, w_i: Vec3, i: Vec3, j: Vec3, k: Vec3) -> Result<f64> {
    let b = bisector(u_i, i)?;
    let b = *b;
    let k0 = b * (2.0 * k.dot(b)) - k;
    let j0 = b * (2.0 * j.dot(b)) - j;
    Ok(0.5 * (-j0.dot(w_i)).atan2(k0.dot(w_i)))
}

/// `b . du > b . S(2 pi / 3)`.
pub fn sufficient_condition(d: &HermiteData) -> Result<bool> {
    let a = DisplacementAnalysis::from_data(d)?;
    Ok(sufficient_condition_for(&a, *d.delta_u()))
}

pub(crate) fn sufficient_condition_for(a: &DisplacementAnalysis, du: Vec3) -> bool {
    match a.s_dot_b(2.0 * PI / 3.0) {
        Some(sb) => a.b.dot(du) > sb,
        None => false,
    }
}

/// Diagnostics of one local solve.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteDiagnostics {
    pub gamma: f64,
    pub iterations: usize,
    /// `|f(phi2)|` at the accepted angle.
    pub bisection_residual: f64,
    /// `|S(phi2) - du|`.
    pub direction_residual: f64,
    pub class_i_residual: f64,
    pub frame_residual: f64,
    pub sufficient_condition: bool,
    /// All roots found before the tie-break.
    pub candidates: Vec<f64>,
    pub direct_hit: bool,
}

/// A solved segment.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteSolution {
    pub data: HermiteData,
    pub curve: PHQuintic,
    pub frame: RationalFrame,
    pub mu: f64,
    pub phi2: f64,
    pub theta1: f64,
    pub diagnostics: HermiteDiagnostics,
}

impl HermiteSolution {
    /// Frame at the end of the segment, re-orthonormalized for chaining.
    pub fn end_frame(&self) -> Frame {
        let f = self.frame.eval(1.0);
        let u = f.f1 / f.f1.norm();
        let v = f.f2 - u * f.f2.dot(u);
        let v = v / v.norm();
        Frame::new(u, v, u.cross(v))
    }
}

/// `g = sum of arccos(s_k . s_{k+1})` over the spherical control polygon.
pub fn polygon_amplitude(c: &PHQuintic) -> Result<f64> {
    let s = c.spherical_control_points()?;
    Ok(s.windows(2).map(|w| w[0].angle_to(*w[1])).sum())
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, flo: f64, tol: &Tolerances) -> (f64, usize) {
    let mut flo = flo;
    let mut it = 0;
    while (hi - lo).abs() > tol.bisection && it < tol.max_iter {
        it += 1;
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return (mid, it);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), it)
}

/// Solves one local problem with default tolerances.
pub fn solve(d: &HermiteData) -> Result<HermiteSolution> {
    solve_with(d, &Tolerances::default())
}

pub fn solve_with(d: &HermiteData, tol: &Tolerances) -> Result<HermiteSolution> {
    let a = DisplacementAnalysis::from_data(d)?;
    let du = *d.delta_u();
    let gamma = a.gamma;
    let dn = du.dot(*a.n);
    let db = du.dot(*a.b);
    let suff = sufficient_condition_for(&a, du);

    // Direct hits at phi2 = 0 and phi2 = pi.
    let mut hit = None;
    if (du - *a.b).norm() <= tol.direct_hit {
        hit = Some(0.0);
    } else if let Ok(s_pi) = a.s(PI) {
        if (du - *s_pi).norm() <= tol.direct_hit {
            hit = Some(PI);
        }
    }

    let f = |phi: f64| a.s_dot_b(phi).map(|sb| sb - db);
    let mut roots = Vec::new();
    let mut iterations = 0;
    if let Some(phi) = hit {
        roots.push(phi);
    } else {
        let no_solution = |s_min: f64, s_max: f64| Error::NoSolution {
            gamma,
            du_dot_b: db,
            s_min,
            s_max,
        };
        if dn.abs() <= 1e-14 {
            return Err(no_solution(f64::NAN, f64::NAN));
        }
        let sign = dn.signum();
        let intervals: Vec<(f64, f64)> = if gamma > GAMMA_CRITICAL + tol::GAMMA_WINDOW {
            vec![(0.0, PI)]
        } else if (gamma - GAMMA_CRITICAL).abs() < tol::GAMMA_WINDOW {
            vec![(0.0, 2.0 * PI / 3.0)]
        } else {
            vec![(0.0, 2.0 * PI / 3.0), (2.0 * PI / 3.0, PI)]
        };
        let mut s_min = f64::INFINITY;
        let mut s_max = f64::NEG_INFINITY;
        for (lo, hi) in intervals {
            let (lo, hi) = (sign * lo, sign * hi);
            let (Some(flo), Some(fhi)) = (f(lo), f(hi)) else {
                continue;
            };
            for v in [flo + db, fhi + db] {
                s_min = s_min.min(v);
                s_max = s_max.max(v);
            }
            if flo == 0.0 {
                roots.push(lo);
                continue;
            }
            if fhi == 0.0 {
                roots.push(hi);
                continue;
            }
            if (flo > 0.0) == (fhi > 0.0) {
                continue;
            }
            let g = |phi: f64| f(phi).unwrap_or(f64::NAN);
            let (root, it) = bisect(&g, lo, hi, flo, tol);
            iterations += it;
            roots.push(root);
        }
        roots.dedup_by(|x, y| (*x - *y).abs() <= tol.bisection);
        if roots.is_empty() {
            return Err(no_solution(s_min, s_max));
        }
    }

    let mut best: Option<(f64, HermiteSolution)> = None;
    for &phi in &roots {
        let sol = assemble(d, &a, phi)?;
        let g = polygon_amplitude(&sol.curve)?;
        let better = match &best {
            None => true,
            Some((bg, bs)) => g < *bg - 1e-12 || ((g - *bg).abs() <= 1e-12 && phi.abs() < bs.phi2.abs()),
        };
        if better {
            best = Some((g, sol));
        }
    }
    let (_, mut sol) = best.expect("at least one root");
    let s = a.s(sol.phi2)?;
    sol.diagnostics = HermiteDiagnostics {
        gamma,
        iterations,
        bisection_residual: (s.dot(*a.b) - db).abs(),
        direction_residual: (*s - du).norm(),
        class_i_residual: class_i_check(&sol.curve.preimage).relative(),
        frame_residual: sol.frame.identity_residual(),
        sufficient_condition: suff,
        candidates: roots,
        direct_hit: hit.is_some(),
    };
    Ok(sol)
}

fn assemble(d: &HermiteData, a: &DisplacementAnalysis, phi: f64) -> Result<HermiteSolution> {
    let i_vec = a.displacement(phi);
    let norm = i_vec.norm();
    if norm < 1e-12 {
        return Err(Error::VanishingDisplacement { phi2: phi, norm });
    }
    let mu = (5.0 * d.delta_p().norm() / norm).sqrt();
    let (unit, theta1) = a.unit_preimage(phi);
    let pre = PreImage::new(unit.a[0] * mu, unit.a[1] * mu, unit.a[2] * mu, unit.axis);
    let curve = PHQuintic::new(d.p_i, pre);
    let frame = RationalFrame::compute(&pre, &d.frame)?;
    Ok(HermiteSolution {
        data: *d,
        curve,
        frame,
        mu,
        phi2: phi,
        theta1,
        diagnostics: HermiteDiagnostics {
            gamma: a.gamma,
            iterations: 0,
            bisection_residual: f64::NAN,
            direction_residual: f64::NAN,
            class_i_residual: f64::NAN,
            frame_residual: f64::NAN,
            sufficient_condition: false,
            candidates: Vec::new(),
            direct_hit: false,
        },
    })
}
