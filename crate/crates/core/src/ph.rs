//! Quintic Pythagorean-hodograph curves generated by a quadratic quaternion
//! pre-image `A(t) = A0 (1-t)^2 + A1 2t(1-t) + A2 t^2`.
//!
//! The hodograph is `r'(t) = A(t) i A*(t)` and the parametric speed is
//! `sigma(t) = A(t) A*(t)`, so `|r'|^2 = sigma^2` identically.

use serde::{Deserialize, Serialize};

use crate::bernstein;
use crate::error::{Error, Result};
use crate::quat::{orthonormal_complement, star, Frame, Quat, UnitVec3, Vec3};

/// Quadratic quaternion polynomial in Bernstein form together with its axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreImage {
    pub a: [Quat; 3],
    pub axis: UnitVec3,
}

/// Where the speed of a pre-image is smallest on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Degeneracy {
    pub degenerate: bool,
    pub t_min: f64,
    pub sigma_min: f64,
}

impl PreImage {
    pub fn new(a0: Quat, a1: Quat, a2: Quat, axis: UnitVec3) -> PreImage {
        PreImage { a: [a0, a1, a2], axis }
    }

    pub fn eval(&self, t: f64) -> Quat {
        bernstein::eval(&self.a, t)
    }

    /// Control points `h0..h4` of the hodograph.
    pub fn hodograph(&self) -> [Vec3; 5] {
        let [a0, a1, a2] = self.a;
        let i = self.axis;
        [
            star(a0, a0, i),
            star(a0, a1, i),
            (star(a0, a2, i) + star(a1, a1, i) * 2.0) / 3.0,
            star(a1, a2, i),
            star(a2, a2, i),
        ]
    }

    /// Bernstein coefficients of `sigma(t) = A(t) A*(t)`; these are also the
    /// weights of the tangent indicatrix.
    pub fn sigma_coeffs(&self) -> [f64; 5] {
        let [a0, a1, a2] = self.a;
        [
            a0.norm_sq(),
            a0.dot(a1),
            (2.0 * a0.dot(a2) + 4.0 * a1.norm_sq()) / 6.0,
            a1.dot(a2),
            a2.norm_sq(),
        ]
    }

    pub fn sigma(&self, t: f64) -> f64 {
        bernstein::eval(&self.sigma_coeffs(), t)
    }

    pub fn arc_length(&self) -> f64 {
        self.sigma_coeffs().iter().sum::<f64>() / 5.0
    }

    /// Minimum of `sigma` on `[0, 1]`; degenerate when it vanishes relative
    /// to the coefficient scale.
    pub fn degeneracy(&self) -> Degeneracy {
        let s = self.sigma_coeffs();
        let ds = bernstein::derivative(&s);
        let mut cands = vec![0.0, 1.0];
        cands.extend(bernstein::roots_in_unit(&ds, 64));
        let (t_min, sigma_min) = cands
            .into_iter()
            .map(|t| (t, bernstein::eval(&s, t)))
            .fold((0.0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
        let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Degeneracy {
            degenerate: sigma_min <= 1e-12 * scale,
            t_min,
            sigma_min,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.degeneracy().degenerate
    }

    /// Euler-Rodrigues frame `(A i A*, A j A*, A k A*) / A A*`, with `(j, k)`
    /// the deterministic complement of the axis.
    pub fn erf_frame(&self, t: f64) -> Result<Frame> {
        let (j, k) = orthonormal_complement(self.axis);
        self.erf_frame_with(t, j.get(), k.get())
    }

    /// Euler-Rodrigues frame for an explicit `(j, k)` completing the axis.
    pub fn erf_frame_with(&self, t: f64, j: Vec3, k: Vec3) -> Result<Frame> {
        let a = self.eval(t);
        let n = a.norm_sq();
        if n <= 1e-300 {
            return Err(Error::DegeneratePreImage { t, sigma_min: n });
        }
        Ok(Frame::new(
            a.sandwich(self.axis.get()) / n,
            a.sandwich(j) / n,
            a.sandwich(k) / n,
        ))
    }

    /// `(mu A0, mu lambda A1, mu lambda^2 A2)`.
    pub fn reparam_scaled(&self, mu: f64, lambda: f64) -> Result<PreImage> {
        if !(mu > 0.0 && lambda > 0.0) {
            return Err(Error::Validation(format!(
                "scaling factors must be positive (mu = {mu}, lambda = {lambda})"
            )));
        }
        let [a0, a1, a2] = self.a;
        Ok(PreImage::new(
            a0 * mu,
            a1 * (mu * lambda),
            a2 * (mu * lambda * lambda),
            self.axis,
        ))
    }

    pub fn tangent_indicatrix(&self) -> Result<TangentIndicatrix> {
        let d = self.degeneracy();
        if d.degenerate {
            return Err(Error::DegeneratePreImage {
                t: d.t_min,
                sigma_min: d.sigma_min,
            });
        }
        Ok(TangentIndicatrix::new(self.hodograph(), self.sigma_coeffs()))
    }
}

/// The linear rational map `t = lambda s / ((lambda - 1) s + 1)` relating the
/// indicatrices of a pre-image and its `(mu, lambda)` rescaling.
pub fn reparam_map(lambda: f64, s: f64) -> f64 {
    lambda * s / ((lambda - 1.0) * s + 1.0)
}

/// Unit tangent `t(t) = h(t) / sigma(t)` as a degree-4 rational curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentIndicatrix {
    pub weights: [f64; 5],
    pub h: [Vec3; 5],
    /// Rational Bezier points `h_i / w_i`, present only when every weight is nonzero.
    pub points: Option<[Vec3; 5]>,
}

impl TangentIndicatrix {
    fn new(h: [Vec3; 5], weights: [f64; 5]) -> TangentIndicatrix {
        let points = weights
            .iter()
            .all(|w| *w != 0.0)
            .then(|| std::array::from_fn(|i| h[i] / weights[i]));
        TangentIndicatrix { weights, h, points }
    }

    pub fn eval(&self, t: f64) -> Vec3 {
        bernstein::eval(&self.h, t) / bernstein::eval(&self.weights, t)
    }
}

/// A quintic PH curve: start point plus pre-image, with derived control data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PHQuintic {
    pub r0: Vec3,
    pub preimage: PreImage,
    pub h: [Vec3; 5],
    pub r: [Vec3; 6],
    pub sigma_coeffs: [f64; 5],
}

impl PHQuintic {
    pub fn new(r0: Vec3, preimage: PreImage) -> PHQuintic {
        let h = preimage.hodograph();
        let mut r = [r0; 6];
        for k in 0..5 {
            r[k + 1] = r[k] + h[k] / 5.0;
        }
        PHQuintic {
            r0,
            preimage,
            h,
            r,
            sigma_coeffs: preimage.sigma_coeffs(),
        }
    }

    pub fn point(&self, t: f64) -> Vec3 {
        bernstein::eval(&self.r, t)
    }

    /// `r'(t)`.
    pub fn hodograph_at(&self, t: f64) -> Vec3 {
        bernstein::eval(&self.h, t)
    }

    pub fn speed(&self, t: f64) -> f64 {
        bernstein::eval(&self.sigma_coeffs, t)
    }

    pub fn arc_length(&self) -> f64 {
        self.sigma_coeffs.iter().sum::<f64>() / 5.0
    }

    pub fn end_point(&self) -> Vec3 {
        self.r[5]
    }

    /// Bernstein coefficients of `r''` (degree 3) and `r'''` (degree 2).
    pub fn higher_derivatives(&self) -> (Vec<Vec3>, Vec<Vec3>) {
        let d2 = bernstein::derivative(&self.h);
        let d3 = bernstein::derivative(&d2);
        (d2, d3)
    }

    /// `s_i = h_i / |h_i|`.
    pub fn spherical_control_points(&self) -> Result<[UnitVec3; 5]> {
        let mut s = [UnitVec3::X; 5];
        for (i, h) in self.h.iter().enumerate() {
            s[i] = h
                .normalize()
                .map_err(|_| Error::VanishingControlPoint { index: i })?;
        }
        Ok(s)
    }

    pub fn tangent_indicatrix(&self) -> Result<TangentIndicatrix> {
        self.preimage.tangent_indicatrix()
    }

    pub fn erf_frame(&self, t: f64) -> Result<Frame> {
        self.preimage.erf_frame(t)
    }

    /// Largest coefficient of `|r'|^2 - sigma^2` (degree 8) relative to the
    /// largest coefficient of `sigma^2`.
    pub fn ph_identity_residual(&self) -> f64 {
        let hh = bernstein::product(&self.h, &self.h, |a, b| a.dot(b));
        let ss = bernstein::product(&self.sigma_coeffs, &self.sigma_coeffs, |a, b| a * b);
        let scale = ss.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        hh.iter()
            .zip(&ss)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ex1() -> PreImage {
        PreImage::new(
            Quat::from_parts(0.0, 1.0, 0.0, 0.0),
            Quat::from_parts(-0.3016, 0.6819, 0.3326, -0.4600),
            Quat::from_parts(-0.4784, 0.2338, 0.7311, -0.4266),
            UnitVec3::X,
        )
    }

    fn constant() -> PreImage {
        PreImage::new(Quat::ONE, Quat::ONE, Quat::ONE, UnitVec3::X)
    }

    fn close(a: Vec3, b: Vec3, eps: f64) {
        assert!((a - b).norm() <= eps, "{a} vs {b}");
    }

    #[test]
    fn hodograph_of_example_one() {
        let h = ex1().hodograph();
        close(h[1], Vec3::new(0.6819, 0.3326, -0.4600), 1.5e-3);
        close(h[3], Vec3::new(-0.1357, 0.9250, -0.0188), 1.5e-3);
        assert_abs_diff_eq!(h[2].norm(), 0.8782, epsilon = 1.5e-3);
    }

    #[test]
    fn constant_preimage() {
        let p = constant();
        for h in p.hodograph() {
            close(h, Vec3::X, 0.0);
        }
        let c = PHQuintic::new(Vec3::ZERO, p);
        for (k, r) in c.r.iter().enumerate() {
            close(*r, Vec3::X * (k as f64 / 5.0), 1e-15);
        }
        assert_abs_diff_eq!(c.arc_length(), 1.0);
        assert_abs_diff_eq!(p.sigma(0.3), 1.0);
        let ti = p.tangent_indicatrix().unwrap();
        assert_eq!(ti.weights, [1.0; 5]);
        close(ti.eval(0.7), Vec3::X, 1e-15);
        for s in c.spherical_control_points().unwrap() {
            close(s.get(), Vec3::X, 0.0);
        }
        let f = p.erf_frame(0.4).unwrap();
        assert!(f.orthonormality_error() < 1e-15);
        close(f.f1, Vec3::X, 0.0);
        assert!(!p.is_degenerate());
    }

    #[test]
    fn scalar_preimage_speed() {
        let p = PreImage::new(Quat::ONE, Quat::real(2.0), Quat::ONE, UnitVec3::X);
        assert_abs_diff_eq!(p.sigma(0.5), 2.25, epsilon = 1e-15);
    }

    #[test]
    fn endpoint_derivatives() {
        let c = PHQuintic::new(Vec3::new(1.0, 2.0, 3.0), ex1());
        close(c.hodograph_at(0.0), c.h[0], 1e-15);
        close(c.hodograph_at(1.0), c.h[4], 1e-15);
        let h = 1e-6;
        let fd = (c.point(h) - c.point(0.0)) / h;
        close(fd, c.h[0], 1e-5);
        assert_abs_diff_eq!(c.speed(0.0), 1.0, epsilon = 0.0);
    }

    #[test]
    fn example_one_indicatrix_ends() {
        let t = ex1().tangent_indicatrix().unwrap();
        close(t.eval(0.0), Vec3::X, 1e-15);
        close(t.eval(1.0), Vec3::new(-0.4330, 0.75, 0.5), 1.5e-3);
        let w = ex1().sigma_coeffs();
        assert_eq!(w[0], ex1().a[0].norm_sq());
        assert_eq!(w[4], ex1().a[2].norm_sq());
    }

    #[test]
    fn degeneracy_detection() {
        let p = PreImage::new(Quat::ONE, Quat::ZERO, Quat::ONE, UnitVec3::X);
        let d = p.degeneracy();
        assert!(!d.degenerate);
        assert_abs_diff_eq!(d.sigma_min, 0.25, epsilon = 1e-12);
        // A(t) = (2t - 1)^2 vanishes at t = 1/2
        let p = PreImage::new(Quat::ONE, Quat::real(-1.0), Quat::ONE, UnitVec3::X);
        let d = p.degeneracy();
        assert!(d.degenerate);
        assert_abs_diff_eq!(d.t_min, 0.5, epsilon = 1e-6);
        assert!(p.tangent_indicatrix().is_err());
        // dense sampling agrees with the classification
        let dense = (0..=10_000)
            .map(|k| p.sigma(k as f64 / 1e4))
            .fold(f64::INFINITY, f64::min);
        assert!(dense <= 1e-12);
    }

    #[test]
    fn vanishing_control_point_is_named() {
        let p = PreImage::new(Quat::ONE, Quat::ZERO, Quat::ONE, UnitVec3::X);
        let c = PHQuintic::new(Vec3::ZERO, p);
        assert!(matches!(
            c.spherical_control_points(),
            Err(Error::VanishingControlPoint { index: 1 })
        ));
    }

    #[test]
    fn gauss_quadrature_displacement() {
        // 5-point Gauss-Legendre is exact for the degree-4 hodograph
        let nodes = [
            (0.0, 128.0 / 225.0),
            (-(5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, (322.0 + 13.0 * 70f64.sqrt()) / 900.0),
            ((5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, (322.0 + 13.0 * 70f64.sqrt()) / 900.0),
            (-(5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, (322.0 - 13.0 * 70f64.sqrt()) / 900.0),
            ((5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, (322.0 - 13.0 * 70f64.sqrt()) / 900.0),
        ];
        let p = ex1();
        let mut sum = Vec3::ZERO;
        for (x, w) in nodes {
            let t = 0.5 * (x + 1.0);
            let a = p.eval(t);
            sum += a.sandwich(Vec3::X) * (0.5 * w);
        }
        let c = PHQuintic::new(Vec3::ZERO, p);
        close(c.end_point() - c.r0, sum, 1e-14);
    }

    #[test]
    fn reparam_example_values() {
        let lambda = 0.33f64.powf(0.25);
        assert_abs_diff_eq!(lambda, 0.7579, epsilon = 1e-4);
        assert_abs_diff_eq!(lambda - 1.0, -0.2421, epsilon = 1e-4);
        assert!(ex1().reparam_scaled(-1.0, 1.0).is_err());
        assert_eq!(ex1().reparam_scaled(1.0, 1.0).unwrap(), ex1());
    }

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (l, r) = (simpson(f, a, m), simpson(f, m, b));
            if depth == 0 || (l + r - whole).abs() <= 15.0 * eps {
                return l + r + (l + r - whole) / 15.0;
            }
            rec(f, a, m, l, 0.5 * eps, depth - 1) + rec(f, m, b, r, 0.5 * eps, depth - 1)
        }
        rec(f, a, b, simpson(f, a, b), eps, depth)
    }

    fn quat() -> impl Strategy<Value = Quat> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(a, b, c, d)| Quat::from_parts(a, b, c, d))
    }

    fn preimage() -> impl Strategy<Value = PreImage> {
        (quat(), quat(), quat()).prop_map(|(a, b, c)| PreImage::new(a, b, c, UnitVec3::X))
    }

    proptest! {
        #[test]
        fn ph_identity(p in preimage(), r0 in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)) {
            let c = PHQuintic::new(Vec3::new(r0.0, r0.1, r0.2), p);
            prop_assert!(c.ph_identity_residual() <= 1e-10);
        }

        #[test]
        fn arc_length_matches_quadrature(p in preimage()) {
            let c = PHQuintic::new(Vec3::ZERO, p);
            let s = adaptive_simpson(&|t| c.hodograph_at(t).norm(), 0.0, 1.0, 1e-13, 40);
            prop_assert!((s - c.arc_length()).abs() <= 1e-10 * c.arc_length().max(1e-3));
        }

        #[test]
        fn scaling_preserves_indicatrix(p in preimage(), mu in 0.2..3.0f64, lambda in 0.2..3.0f64, s in 0.0..1.0f64) {
            prop_assume!(!p.is_degenerate());
            prop_assume!(p.degeneracy().sigma_min > 1e-3);
            let q = p.reparam_scaled(mu, lambda).unwrap();
            let tp = p.tangent_indicatrix().unwrap();
            let tq = q.tangent_indicatrix().unwrap();
            let d = (tq.eval(s) - tp.eval(reparam_map(lambda, s))).norm();
            prop_assert!(d <= 1e-10, "deviation {d}");
        }

        #[test]
        fn indicatrix_and_erf(p in preimage(), t in 0.0..1.0f64) {
            prop_assume!(p.degeneracy().sigma_min > 1e-3);
            let ti = p.tangent_indicatrix().unwrap();
            prop_assert!((ti.eval(t).norm() - 1.0).abs() <= 1e-12);
            let f = p.erf_frame(t).unwrap();
            prop_assert!(f.orthonormality_error() <= 1e-12);
            prop_assert!((f.det() - 1.0).abs() <= 1e-12);
            prop_assert!((f.f1 - ti.eval(t)).norm() <= 1e-12);
        }
    }
}
