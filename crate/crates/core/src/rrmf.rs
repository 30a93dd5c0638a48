//! Class-I rational rotation-minimizing quintics.
//!
//! A quadratic pre-image is class I when `A1 * A1 = A0 * A2` (star product),
//! which makes every inner hodograph control point a star product of two
//! pre-image coefficients and places it on an ellipse in the bisecting plane
//! of its neighbours.

use num_complex::Complex64;

use crate::bernstein;
use crate::error::{Error, Result};
use crate::ph::PreImage;
use crate::quat::{bisector, boxop, neg_cross, orthonormal_complement, quat_sqrt, star, Frame, Quat, UnitVec3, Vec3};
use crate::tol;

/// Outcome of the class-I test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassICheck {
    pub passes: bool,
    /// `|A1 i A1* - vect(A2 i A0*)|`.
    pub residual: f64,
    /// `max |A_k|^2`.
    pub scale: f64,
}

impl ClassICheck {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale.max(f64::MIN_POSITIVE)
    }
}

pub fn class_i_check(p: &PreImage) -> ClassICheck {
    let [a0, a1, a2] = p.a;
    let i = Quat::pure(p.axis.get());
    let lhs = (a1 * i * a1.conj()).vector;
    let rhs = (a2 * i * a0.conj()).vector;
    let residual = (lhs - rhs).norm();
    let scale = p.a.iter().fold(0.0f64, |m, a| m.max(a.norm_sq()));
    ClassICheck {
        passes: residual <= tol::CLASS_I * scale,
        residual,
        scale,
    }
}

pub fn is_class_i(p: &PreImage) -> bool {
    class_i_check(p).passes
}

/// The ellipse of all star products `A_b * A_e` with `A_b * A_b = h_b`,
/// `A_e * A_e = h_e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseLocus {
    pub axis_major: Vec3,
    pub axis_minor: Vec3,
    pub gamma: f64,
    pub b: UnitVec3,
    pub n: UnitVec3,
}

impl EllipseLocus {
    pub fn new(h_b: Vec3, h_e: Vec3) -> Result<EllipseLocus> {
        let n = neg_cross(h_b, h_e)?;
        let b = bisector(h_b, h_e)?;
        let gamma = h_b.angle_to(h_e);
        let scale = (h_b.norm() * h_e.norm()).sqrt();
        Ok(EllipseLocus {
            axis_major: b.get() * scale,
            axis_minor: n.get() * (scale * (0.5 * gamma).sin()),
            gamma,
            b,
            n,
        })
    }

    /// Canonical parameterization `major cos(phi) + minor sin(phi)`.
    pub fn at(&self, phi: f64) -> Vec3 {
        self.axis_major * phi.cos() + self.axis_minor * phi.sin()
    }

    /// Canonical parameter of the ellipse point in direction `v`.
    pub fn phase_of(&self, v: Vec3) -> f64 {
        let sh = (0.5 * self.gamma).sin();
        (v.dot(self.n.get()) / sh).atan2(v.dot(self.b.get()))
    }
}

pub fn hm_ellipse(h_b: Vec3, h_e: Vec3) -> Result<EllipseLocus> {
    EllipseLocus::new(h_b, h_e)
}

pub fn hm_at(e: &EllipseLocus, phi: f64) -> Vec3 {
    e.at(phi)
}

/// Parameter shift between the star/box parameterization of the `h3`
/// ellipse and its canonical one, for the special position `s0 = i`.
pub fn shift_angle(gamma: f64, phi2: f64) -> f64 {
    let (sg, cg) = (0.5 * gamma).sin_cos();
    let c = gamma.cos();
    let x = 4.0 * phi2.sin() * cg * sg * sg * (3.0 - c + (1.0 + c) * (2.0 * phi2).cos()).sqrt();
    let y = (2.0 * phi2).cos() * gamma.sin().powi(2) + 4.0 * sg.powi(4);
    0.5 * x.atan2(y)
}

/// `(|h1|, |h2|, |h3|)` from the end lengths, the end angle `gamma`, the
/// canonical phase `phi2` of `h2` and the phase `theta1` of `A1`, all in the
/// special position `s0 = i`.
pub fn inner_lengths(len0: f64, len4: f64, gamma: f64, phi2: f64, theta1: f64) -> (f64, f64, f64) {
    let sg = (0.5 * gamma).sin();
    let cg = (0.5 * gamma).cos();
    let k2 = (phi2.cos().powi(2) + sg * sg * phi2.sin().powi(2)).sqrt();
    let h2 = (len0 * len4).sqrt() * k2;
    let cos_delta = (phi2.cos() * cg / k2).clamp(-1.0, 1.0);
    let sd = (0.5 * cos_delta.acos()).sin();
    let ell = |t: f64| (t.cos().powi(2) + sd * sd * t.sin().powi(2)).sqrt();
    let h1 = (len0 * h2).sqrt() * ell(theta1);
    let h3 = (h2 * len4).sqrt() * ell(theta1 - shift_angle(gamma, phi2));
    (h1, h2, h3)
}

/// Residuals of the three great-circle conditions on spherical control points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibilityReport {
    /// `|s2.s0 - s2.s4|`, `|s1.s0 - s1.s2|`, `|s3.s4 - s3.s2|`.
    pub residuals: [f64; 3],
    pub passes: bool,
}

pub fn check_admissible_configuration(s: &[UnitVec3; 5], tol: f64) -> AdmissibilityReport {
    let d = |k: usize, a: usize, b: usize| (s[k].dot(*s[a]) - s[k].dot(*s[b])).abs();
    let residuals = [d(2, 0, 4), d(1, 0, 2), d(3, 4, 2)];
    AdmissibilityReport {
        residuals,
        passes: residuals.iter().all(|r| *r <= tol),
    }
}

/// Angle `theta` with `v` a positive multiple of `p cos(theta) + q sin(theta)`,
/// for `v` in (or projected onto) the plane spanned by `p` and `q`.
fn conjugate_phase(p: Vec3, q: Vec3, v: Vec3) -> f64 {
    let (pp, pq, qq) = (p.dot(p), p.dot(q), q.dot(q));
    let (pv, qv) = (p.dot(v), q.dot(v));
    let det = pp * qq - pq * pq;
    let alpha = (qq * pv - pq * qv) / det;
    let beta = (pp * qv - pq * pv) / det;
    beta.atan2(alpha)
}

/// Class-I pre-image with spherical control points `s0, s2, s4`, end
/// lengths `len0, len4`, and free phase `theta1` of `A1`.
///
/// `tol` bounds the admissibility residual `|s2.s0 - s2.s4|`.
#[allow(clippy::too_many_arguments)]
pub fn construct_from_spherical(
    s0: UnitVec3,
    s2: UnitVec3,
    s4: UnitVec3,
    len0: f64,
    len4: f64,
    theta1: f64,
    axis: UnitVec3,
    tol: f64,
) -> Result<PreImage> {
    if !(len0 > 0.0 && len4 > 0.0) {
        return Err(Error::Validation(format!(
            "end lengths must be positive ({len0}, {len4})"
        )));
    }
    neg_cross(*s0, *s4)?;
    let residual = (s2.dot(*s0) - s2.dot(*s4)).abs();
    if residual > tol {
        return Err(Error::NotAdmissible { residual });
    }
    let a0 = quat_sqrt(*s0 * len0, axis, 0.0)?;
    let a2_hat = quat_sqrt(*s4 * len4, axis, 0.0)?;
    let theta = conjugate_phase(star(a0, a2_hat, axis), boxop(a0, a2_hat), *s2);
    let a2 = a2_hat * Quat::exp(axis, theta);
    let h2 = star(a0, a2, axis);
    let a1 = quat_sqrt(h2, axis, theta1)?;
    Ok(PreImage::new(a0, a1, a2, axis))
}

/// The phase `theta1` for which `construct_from_spherical` yields `s1`
/// as its second spherical control point.
pub fn theta1_for_s1(a0: Quat, h2: Vec3, s1: UnitVec3, axis: UnitVec3) -> Result<f64> {
    let a1_hat = quat_sqrt(h2, axis, 0.0)?;
    Ok(conjugate_phase(star(a0, a1_hat, axis), boxop(a0, a1_hat), *s1))
}

/// Rational rotation-minimizing frame of a class-I quintic.
///
/// `W = a + i b` with real quadratics `a`, `b`; the frame is
/// `(B i B*, B c2 B*, B c3 B*) / B B*` with `B = A W` and `(c2, c3)` the
/// deterministic complement of the axis.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFrame {
    pub preimage: PreImage,
    pub wa: [f64; 3],
    pub wb: [f64; 3],
    pub basis: (UnitVec3, UnitVec3),
    pub b_coeffs: [Quat; 5],
}

impl RationalFrame {
    /// Assembles the frame from known `W` coefficients without any check.
    pub fn from_parts(preimage: PreImage, wa: [f64; 3], wb: [f64; 3]) -> RationalFrame {
        let axis = preimage.axis.get();
        let w: [Quat; 3] = std::array::from_fn(|k| Quat::new(wa[k], axis * wb[k]));
        let b = bernstein::product(&preimage.a, &w, |x, y| x * y);
        RationalFrame {
            preimage,
            wa,
            wb,
            basis: orthonormal_complement(preimage.axis),
            b_coeffs: [b[0], b[1], b[2], b[3], b[4]],
        }
    }

    /// Solves for `W` and fixes its gauge so that the frame at `t = 0`
    /// equals `initial`.
    pub fn compute(p: &PreImage, initial: &Frame) -> Result<RationalFrame> {
        let check = class_i_check(p);
        if !check.passes {
            return Err(Error::FrameConstruction {
                residual: check.relative(),
            });
        }
        let d = p.degeneracy();
        if d.degenerate {
            return Err(Error::DegeneratePreImage {
                t: d.t_min,
                sigma_min: d.sigma_min,
            });
        }
        initial.validate(1e-9)?;
        let s0 = p.a[0].sandwich(p.axis.get()) / p.a[0].norm_sq();
        if (s0 - initial.f1).norm() > 1e-8 {
            return Err(Error::Validation(format!(
                "initial tangent {} does not match the curve tangent {}",
                initial.f1, s0
            )));
        }

        let sigma = p.sigma_coeffs();
        let roots = quartic_roots(&sigma);
        let c = sigma[4].sqrt();
        let mut best: Option<(f64, [Complex64; 3])> = None;
        for r1 in [roots[0], roots[0].conj()] {
            for r2 in [roots[1], roots[1].conj()] {
                let w = [r1 * r2 * c, -(r1 + r2) * (0.5 * c), Complex64::new(c, 0.0)];
                let res = identity_residual(p, &w.map(|z| z.re), &w.map(|z| z.im));
                if best.is_none_or(|(r, _)| res < r) {
                    best = Some((res, w));
                }
            }
        }
        // When scal(A' i A*) vanishes the Euler-Rodrigues frame is already
        // rotation-minimizing and W is constant.
        let w_const = [Complex64::new(c, 0.0); 3];
        let res_const = identity_residual(p, &w_const.map(|z| z.re), &[0.0; 3]);
        if best.is_none_or(|(r, _)| res_const < r) {
            best = Some((res_const, w_const));
        }
        let (res, w) = best.expect("five candidates");
        if !(res <= tol::FRAME_FAIL) {
            return Err(Error::FrameConstruction { residual: res });
        }

        let (c2, c3) = orthonormal_complement(p.axis);
        let u0 = p.a[0] * (1.0 / p.a[0].norm());
        let v = u0.conj().sandwich(initial.f2);
        let beta = 0.5 * v.dot(*c3).atan2(v.dot(*c2));
        let rot = Complex64::from_polar(1.0, beta - w[0].arg());
        let w = w.map(|z| z * rot);
        Ok(RationalFrame::from_parts(*p, w.map(|z| z.re), w.map(|z| z.im)))
    }

    pub fn w_eval(&self, t: f64) -> Quat {
        let a = bernstein::eval(&self.wa, t);
        let b = bernstein::eval(&self.wb, t);
        Quat::new(a, self.preimage.axis.get() * b)
    }

    pub fn eval(&self, t: f64) -> Frame {
        let b = bernstein::eval(&self.b_coeffs, t);
        let n = b.norm_sq();
        Frame::new(
            b.sandwich(self.preimage.axis.get()) / n,
            b.sandwich(self.basis.0.get()) / n,
            b.sandwich(self.basis.1.get()) / n,
        )
    }

    /// Relative coefficient residual of
    /// `scal(A' i A*) (a^2 + b^2) + (a' b - a b') (A A*)`.
    ///
    /// With `B = A W` the twist of the frame about the tangent is
    /// `2 (arg W)' - 2 scal(A' i A*) / |A|^2`, so rotation minimality needs
    /// `(a b' - a' b) / |W|^2 = scal(A' i A*) / |A|^2`.
    pub fn identity_residual(&self) -> f64 {
        identity_residual(&self.preimage, &self.wa, &self.wb)
    }
}

fn identity_residual(p: &PreImage, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let i = Quat::pure(p.axis.get());
    let da = bernstein::derivative(&p.a);
    let s = bernstein::product(&da, &p.a, |x: Quat, y: Quat| (x * i * y.conj()).scalar);
    let ww: Vec<f64> = bernstein::product(a, a, |x, y| x * y)
        .iter()
        .zip(bernstein::product(b, b, |x, y| x * y))
        .map(|(x, y)| x + y)
        .collect();
    let wr: Vec<f64> = bernstein::product(&bernstein::derivative(a), b, |x, y| x * y)
        .iter()
        .zip(bernstein::product(a, &bernstein::derivative(b), |x, y| x * y))
        .map(|(x, y)| x - y)
        .collect();
    let sigma = p.sigma_coeffs();
    let lhs = bernstein::product(&s, &ww, |x, y| -x * y);
    let rhs = bernstein::product(&wr, &sigma, |x, y| x * y);
    let maxabs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = (maxabs(&sigma) * maxabs(&ww)).max(f64::MIN_POSITIVE);
    lhs.iter().zip(&rhs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// The two roots with nonnegative imaginary part of `sum sigma_k C(4,k) x^k`,
/// the speed quartic in the homogeneous variable `x = t / (1 - t)`.
fn quartic_roots(sigma: &[f64; 5]) -> [Complex64; 2] {
    let p: [f64; 5] = std::array::from_fn(|k| sigma[k] * bernstein::binomial(4, k));
    let monic: [f64; 4] = std::array::from_fn(|k| p[k] / p[4]);
    let horner = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(Complex64::new(1.0, 0.0), |acc, &c| acc * z + c)
    };
    let radius = 1.0 + monic.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: [Complex64; 4] = std::array::from_fn(|k| seed.powu(k as u32) * radius);
    for _ in 0..1000 {
        let mut change = 0.0f64;
        for k in 0..4 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = horner(z[k]) / denom;
            z[k] -= step;
            change = change.max(step.norm());
        }
        if change <= 1e-16 * radius {
            break;
        }
    }
    // Newton polish against the full polynomial.
    let dmonic: [f64; 3] = std::array::from_fn(|k| monic[k + 1] * (k + 1) as f64);
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let f = horner(*zk);
            let df = dmonic
                .iter()
                .rev()
                .fold(Complex64::new(4.0, 0.0), |acc, &c| acc * *zk + c);
            if df.norm() == 0.0 {
                break;
            }
            let next = *zk - f / df;
            if horner(next).norm() < f.norm() {
                *zk = next;
            } else {
                break;
            }
        }
    }
    z.sort_by(|a, b| b.im.total_cmp(&a.im));
    [z[0], z[1]]
}
