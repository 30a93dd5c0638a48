//! Quaternion algebra on plain `f64` values.
//!
//! Pure-vector quaternions are identified with [`Vec3`]. Nothing here
//! renormalizes silently: operations that need a unit quaternion or a unit
//! vector check their input and report.

use std::fmt;
use std::ops::{Add, AddAssign, Deref, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A 3-vector (or a point in Euclidean 3-space).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalize(self) -> Result<UnitVec3> {
        UnitVec3::normalize(self)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Angle in `[0, pi]` between two nonzero vectors, computed with `atan2`
    /// so that it stays accurate near 0 and pi.
    pub fn angle_to(self, o: Vec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A 3-vector of unit length (within [`tol::UNIT`]).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "[f64; 3]")]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3(Vec3::X);
    pub const Y: UnitVec3 = UnitVec3(Vec3::Y);
    pub const Z: UnitVec3 = UnitVec3(Vec3::Z);

    /// Accepts `v` only if it already has unit length.
    pub fn new(v: Vec3) -> Result<UnitVec3> {
        let n = v.norm();
        if (n - 1.0).abs() > tol::UNIT || !n.is_finite() {
            return Err(Error::Validation(format!("expected a unit vector, |v| = {n}")));
        }
        Ok(UnitVec3(v))
    }

    pub fn normalize(v: Vec3) -> Result<UnitVec3> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector("normalize"));
        }
        Ok(UnitVec3(v / n))
    }

    #[inline]
    pub fn get(self) -> Vec3 {
        self.0
    }
}

impl Deref for UnitVec3 {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

impl From<UnitVec3> for Vec3 {
    fn from(u: UnitVec3) -> Vec3 {
        u.0
    }
}

impl From<UnitVec3> for [f64; 3] {
    fn from(u: UnitVec3) -> Self {
        u.0.to_array()
    }
}

impl<'de> Deserialize<'de> for UnitVec3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec3::deserialize(d)?;
        UnitVec3::new(v).map_err(serde::de::Error::custom)
    }
}

/// Quaternion `scalar + vector`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quat {
    pub scalar: f64,
    pub vector: Vec3,
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, Vec3::ZERO);
    pub const ONE: Quat = Quat::new(1.0, Vec3::ZERO);

    #[inline]
    pub const fn new(scalar: f64, vector: Vec3) -> Quat {
        Quat { scalar, vector }
    }

    #[inline]
    pub const fn from_parts(w: f64, x: f64, y: f64, z: f64) -> Quat {
        Quat::new(w, Vec3::new(x, y, z))
    }

    #[inline]
    pub fn pure(v: Vec3) -> Quat {
        Quat::new(0.0, v)
    }

    #[inline]
    pub fn real(s: f64) -> Quat {
        Quat::new(s, Vec3::ZERO)
    }

    /// `e^{axis * angle} = cos(angle) + axis sin(angle)`.
    pub fn exp(axis: UnitVec3, angle: f64) -> Quat {
        let (s, c) = angle.sin_cos();
        Quat::new(c, axis.get() * s)
    }

    #[inline]
    pub fn conj(self) -> Quat {
        Quat::new(self.scalar, -self.vector)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.scalar * self.scalar + self.vector.norm_sq()
    }

    /// The module `|Q| = sqrt(Q Q*)`.
    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dot(self, o: Quat) -> f64 {
        self.scalar * o.scalar + self.vector.dot(o.vector)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.scalar, self.vector.x, self.vector.y, self.vector.z]
    }

    /// `Q v Q*` for a pure vector `v`, without any normalization.
    #[inline]
    pub fn sandwich(self, v: Vec3) -> Vec3 {
        (self * Quat::pure(v) * self.conj()).vector
    }
}

impl From<[f64; 4]> for Quat {
    fn from(a: [f64; 4]) -> Self {
        Quat::from_parts(a[0], a[1], a[2], a[3])
    }
}

impl From<Quat> for [f64; 4] {
    fn from(q: Quat) -> Self {
        q.to_array()
    }
}

impl Add for Quat {
    type Output = Quat;
    #[inline]
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.scalar + o.scalar, self.vector + o.vector)
    }
}

impl AddAssign for Quat {
    #[inline]
    fn add_assign(&mut self, o: Quat) {
        *self = *self + o;
    }
}

impl Sub for Quat {
    type Output = Quat;
    #[inline]
    fn sub(self, o: Quat) -> Quat {
        Quat::new(self.scalar - o.scalar, self.vector - o.vector)
    }
}

impl Neg for Quat {
    type Output = Quat;
    #[inline]
    fn neg(self) -> Quat {
        Quat::new(-self.scalar, -self.vector)
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    #[inline]
    fn mul(self, s: f64) -> Quat {
        Quat::new(self.scalar * s, self.vector * s)
    }
}

/// `(ab - a.b) + (a b + b a + a x b)`.
impl Mul for Quat {
    type Output = Quat;
    #[inline]
    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.scalar * o.scalar - self.vector.dot(o.vector),
            o.vector * self.scalar + self.vector * o.scalar + self.vector.cross(o.vector),
        )
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}; {}, {}, {})",
            self.scalar, self.vector.x, self.vector.y, self.vector.z
        )
    }
}

/// Free-function form of the quaternion product.
#[inline]
pub fn qmul(a: Quat, b: Quat) -> Quat {
    a * b
}

/// Rotates `v` by the unit quaternion `u`.
pub fn rotate(u: Quat, v: Vec3) -> Result<Vec3> {
    let n = u.norm();
    if (n - 1.0).abs() > tol::ROUND_TRIP {
        return Err(Error::Validation(format!("rotation quaternion is not unit: |U| = {n}")));
    }
    Ok(u.sandwich(v))
}

/// `A * B = (A i B* + B i A*) / 2`, always a pure vector.
#[inline]
pub fn star(a: Quat, b: Quat, axis: UnitVec3) -> Vec3 {
    let i = Quat::pure(axis.get());
    ((a * i * b.conj() + b * i * a.conj()) * 0.5).vector
}

/// `A [] B = (A B* - B A*) / 2`, always a pure vector.
#[inline]
pub fn boxop(a: Quat, b: Quat) -> Vec3 {
    ((a * b.conj() - b * a.conj()) * 0.5).vector
}

/// Unit bisector of two nonzero vectors.
pub fn bisector(v: Vec3, w: Vec3) -> Result<UnitVec3> {
    let (nv, nw) = (v.norm(), w.norm());
    if nv == 0.0 || nw == 0.0 {
        return Err(Error::ZeroVector("bisector"));
    }
    let sum = v / nv + w / nw;
    let n = sum.norm();
    if n <= tol::ALGEBRAIC {
        return Err(Error::DegenerateBisector);
    }
    Ok(UnitVec3(sum / n))
}

/// Negatively oriented normalized cross product `-(v x w) / |v x w|`.
pub fn neg_cross(v: Vec3, w: Vec3) -> Result<UnitVec3> {
    let c = v.cross(w);
    let n = c.norm();
    if n <= tol::ALGEBRAIC * v.norm() * w.norm() || n == 0.0 {
        return Err(Error::ParallelVectors);
    }
    Ok(UnitVec3(-c / n))
}

/// Orthonormal pair completing `axis` to a right-handed basis.
///
/// Gram-Schmidt on the standard basis vector least aligned with `axis`, so
/// the result is a deterministic function of the input.
pub fn orthonormal_complement(axis: UnitVec3) -> (UnitVec3, UnitVec3) {
    let a = axis.get();
    let seed = if a.x.abs() <= a.y.abs() && a.x.abs() <= a.z.abs() {
        Vec3::X
    } else if a.y.abs() <= a.z.abs() {
        Vec3::Y
    } else {
        Vec3::Z
    };
    let d1 = seed - a * seed.dot(a);
    let d1 = d1 / d1.norm();
    let d2 = a.cross(d1);
    (UnitVec3(d1), UnitVec3(d2 / d2.norm()))
}

/// A quaternion square root of `v` with respect to `axis`: `A axis A* = v`.
///
/// Returns `sqrt|v| b(axis, v) e^{axis alpha}`; when `v` points exactly
/// opposite to `axis` the bisector is undefined and the orthonormal-basis
/// form `sqrt|v| (d1 cos alpha + d2 sin alpha)` is used instead.
pub fn quat_sqrt(v: Vec3, axis: UnitVec3, alpha: f64) -> Result<Quat> {
    let len = v.norm();
    if len == 0.0 || !len.is_finite() {
        return Err(Error::ZeroVector("quat_sqrt"));
    }
    let dir = v / len;
    let scale = len.sqrt();
    if (dir + axis.get()).norm() < tol::UNIT {
        let (d1, d2) = orthonormal_complement(UnitVec3(dir));
        let (s, c) = alpha.sin_cos();
        return Ok(Quat::pure((d1.get() * c + d2.get() * s) * scale));
    }
    let b = bisector(axis.get(), dir)?;
    Ok(Quat::pure(b.get() * scale) * Quat::exp(axis, alpha))
}

/// An adapted frame triple: `f1` is the tangent, `(f2, f3)` span the normal plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    #[serde(rename = "u")]
    pub f1: Vec3,
    #[serde(rename = "v")]
    pub f2: Vec3,
    #[serde(rename = "w")]
    pub f3: Vec3,
}

impl Frame {
    pub const IDENTITY: Frame = Frame {
        f1: Vec3::X,
        f2: Vec3::Y,
        f3: Vec3::Z,
    };

    pub fn new(f1: Vec3, f2: Vec3, f3: Vec3) -> Frame {
        Frame { f1, f2, f3 }
    }

    /// Checks orthonormality and right-handedness within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let err = self.orthonormality_error();
        if err > tol {
            return Err(Error::Validation(format!(
                "frame is not orthonormal (error {err:e})"
            )));
        }
        let det = self.f1.cross(self.f2).dot(self.f3);
        if (det - 1.0).abs() > tol {
            return Err(Error::Validation(format!("frame is not right-handed (det {det})")));
        }
        Ok(())
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let [a, b, c] = [self.f1, self.f2, self.f3];
        [
            (a.norm_sq() - 1.0).abs(),
            (b.norm_sq() - 1.0).abs(),
            (c.norm_sq() - 1.0).abs(),
            a.dot(b).abs(),
            b.dot(c).abs(),
            c.dot(a).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn det(&self) -> f64 {
        self.f1.cross(self.f2).dot(self.f3)
    }

    /// Largest angle between corresponding axes of two frames.
    pub fn angle_to(&self, o: &Frame) -> f64 {
        self.f1
            .angle_to(o.f1)
            .max(self.f2.angle_to(o.f2))
            .max(self.f3.angle_to(o.f3))
    }

    /// Builds a frame from a tangent and a normal hint: `f2` is the
    /// component of `hint` orthogonal to `tangent`, `f3 = f1 x f2`.
    pub fn from_tangent_hint(tangent: UnitVec3, hint: Vec3) -> Result<Frame> {
        let t = tangent.get();
        let f2 = (hint - t * hint.dot(t)).normalize()?;
        let f3 = t.cross(f2.get());
        Ok(Frame::new(t, f2.get(), f3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn vclose(a: Vec3, b: Vec3, eps: f64) {
        assert!((a - b).norm() <= eps, "{a} vs {b}");
    }

    fn qclose(a: Quat, b: Quat, eps: f64) {
        assert!((a - b).norm() <= eps, "{a} vs {b}");
    }

    #[test]
    fn product_basics() {
        let i = Quat::from_parts(0.0, 1.0, 0.0, 0.0);
        let k = Quat::from_parts(0.0, 0.0, 0.0, 1.0);
        qclose(qmul(i, i), Quat::from_parts(-1.0, 0.0, 0.0, 0.0), 0.0);
        qclose(qmul(k, i), Quat::from_parts(0.0, 0.0, 1.0, 0.0), 0.0);
        let a = Quat::from_parts(0.5, 0.1, 0.2, 0.3);
        qclose(qmul(a, Quat::ONE), a, 0.0);
    }

    #[test]
    fn rotate_examples() {
        let u = Quat::exp(UnitVec3::Z, FRAC_PI_4);
        vclose(rotate(u, Vec3::X).unwrap(), Vec3::Y, 1e-15);
        let v = Vec3::new(0.3, -2.0, 7.0);
        vclose(rotate(Quat::ONE, v).unwrap(), v, 0.0);
        let u = Quat::exp(UnitVec3::X, FRAC_PI_2);
        vclose(rotate(u, Vec3::X).unwrap(), Vec3::X, 1e-15);
        assert!(rotate(Quat::from_parts(2.0, 0.0, 0.0, 0.0), v).is_err());
    }

    #[test]
    fn star_examples() {
        let i = Quat::pure(Vec3::X);
        vclose(star(i, i, UnitVec3::X), Vec3::X, 1e-15);
        let a2 = Quat::from_parts(-0.4784, 0.2338, 0.7311, -0.4266);
        vclose(star(i, a2, UnitVec3::X), Vec3::new(0.2338, 0.7311, -0.4266), 1e-15);
    }

    #[test]
    fn box_examples() {
        let a = Quat::from_parts(0.3, -1.0, 0.5, 2.0);
        vclose(boxop(a, a), Vec3::ZERO, 0.0);
        vclose(boxop(Quat::ONE, Quat::pure(Vec3::X)), -Vec3::X, 0.0);
    }

    #[test]
    fn bisector_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vclose(bisector(Vec3::X, Vec3::Y).unwrap().get(), Vec3::new(s, s, 0.0), 1e-15);
        let v = Vec3::new(1.0, 2.0, -2.0);
        vclose(bisector(v, v).unwrap().get(), v / 3.0, 1e-15);
        vclose(
            bisector(Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 3.0))
                .unwrap()
                .get(),
            Vec3::new(s, 0.0, s),
            1e-15,
        );
        assert!(matches!(
            bisector(Vec3::X, -Vec3::X * 4.0),
            Err(Error::DegenerateBisector)
        ));
        assert!(matches!(bisector(Vec3::ZERO, Vec3::X), Err(Error::ZeroVector(_))));
    }

    #[test]
    fn neg_cross_examples() {
        vclose(neg_cross(Vec3::X, Vec3::Y).unwrap().get(), -Vec3::Z, 0.0);
        vclose(neg_cross(Vec3::Y, Vec3::X).unwrap().get(), Vec3::Z, 0.0);
        vclose(
            neg_cross(Vec3::X * 2.0, Vec3::Y * 3.0).unwrap().get(),
            -Vec3::Z,
            0.0,
        );
        assert!(matches!(
            neg_cross(Vec3::X, Vec3::X * -2.0),
            Err(Error::ParallelVectors)
        ));
    }

    #[test]
    fn sqrt_examples() {
        let r = quat_sqrt(Vec3::X, UnitVec3::X, 0.0).unwrap();
        vclose(r.sandwich(Vec3::X), Vec3::X, 1e-15);
        let r = quat_sqrt(Vec3::new(0.0, 0.0, 2.0), UnitVec3::X, 0.0).unwrap();
        qclose(r, Quat::from_parts(0.0, 1.0, 0.0, 1.0), 1e-15);
        vclose(r.sandwich(Vec3::X), Vec3::new(0.0, 0.0, 2.0), 1e-15);
        // antipodal branch
        let v = Vec3::new(-3.0, 0.0, 0.0);
        for alpha in [0.0, 0.7, 2.0] {
            let r = quat_sqrt(v, UnitVec3::X, alpha).unwrap();
            vclose(r.sandwich(Vec3::X), v, 1e-14);
        }
        assert!(quat_sqrt(Vec3::ZERO, UnitVec3::X, 0.0).is_err());
    }

    #[test]
    fn complement_is_right_handed() {
        for a in [Vec3::X, Vec3::new(0.3, -0.2, 0.9), -Vec3::Z] {
            let a = a.normalize().unwrap();
            let (d1, d2) = orthonormal_complement(a);
            let f = Frame::new(a.get(), d1.get(), d2.get());
            assert!(f.orthonormality_error() < 1e-15);
            assert_abs_diff_eq!(f.det(), 1.0, epsilon = 1e-15);
        }
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    fn quat() -> impl Strategy<Value = Quat> {
        (-2.0..2.0f64, vec3()).prop_map(|(s, v)| Quat::new(s, v))
    }

    fn unit() -> impl Strategy<Value = UnitVec3> {
        vec3()
            .prop_filter("nonzero", |v| v.norm() > 1e-3)
            .prop_map(|v| v.normalize().unwrap())
    }

    proptest! {
        #[test]
        fn sqrt_round_trip(v in vec3(), axis in unit(), alpha in -7.0..7.0f64) {
            prop_assume!(v.norm() > 1e-6);
            let a = quat_sqrt(v, axis, alpha).unwrap();
            prop_assert!((a.sandwich(axis.get()) - v).norm() <= tol::ROUND_TRIP * v.norm());
        }

        #[test]
        fn star_box_are_pure(a in quat(), b in quat(), axis in unit()) {
            let i = Quat::pure(axis.get());
            let s = (a * i * b.conj() + b * i * a.conj()) * 0.5;
            let bx = (a * b.conj() - b * a.conj()) * 0.5;
            let scale = a.norm() * b.norm();
            prop_assert!(s.scalar.abs() <= tol::ALGEBRAIC * scale.max(1.0));
            prop_assert!(bx.scalar.abs() <= tol::ALGEBRAIC * scale.max(1.0));
            prop_assert!((star(a, b, axis) - star(b, a, axis)).norm() <= 1e-15 * scale.max(1.0));
            prop_assert!((boxop(a, b) + boxop(b, a)).norm() <= 1e-15 * scale.max(1.0));
        }

        #[test]
        fn product_is_multiplicative(a in quat(), b in quat(), c in quat()) {
            let ab = a * b;
            prop_assert!((ab.norm() - a.norm() * b.norm()).abs() <= tol::UNIT * (a.norm() * b.norm()).max(1e-300));
            prop_assert!(((a * b) * c - a * (b * c)).norm() <= 1e-13 * (a.norm() * b.norm() * c.norm()).max(1.0));
            prop_assert!((ab.conj() - b.conj() * a.conj()).norm() <= 1e-14 * (a.norm() * b.norm()).max(1.0));
        }

        #[test]
        fn rotation_preserves_geometry(axis in unit(), angle in -7.0..7.0f64, v in vec3(), w in vec3()) {
            let u = Quat::exp(axis, angle);
            let rv = rotate(u, v).unwrap();
            let rw = rotate(u, w).unwrap();
            prop_assert!((rv.norm() - v.norm()).abs() <= tol::UNIT * v.norm().max(1.0));
            prop_assert!((rv.dot(rw) - v.dot(w)).abs() <= tol::UNIT * (v.norm() * w.norm()).max(1.0));
        }
    }
}
