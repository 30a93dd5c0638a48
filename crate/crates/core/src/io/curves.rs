//! Analytic test curves and their uniform samples.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curve {
    Helix,
    Torus,
    Spiral,
}

impl std::str::FromStr for Curve {
    type Err = Error;
    fn from_str(s: &str) -> Result<Curve> {
        match s {
            "helix" => Ok(Curve::Helix),
            "torus" => Ok(Curve::Torus),
            "spiral" => Ok(Curve::Spiral),
            _ => Err(Error::Validation(format!(
                "unknown curve '{s}' (expected helix, torus or spiral)"
            ))),
        }
    }
}

/// Helix scale `2 sqrt(29)`, which makes the helix unit speed.
pub fn helix_scale() -> f64 {
    2.0 * 29f64.sqrt()
}

impl Curve {
    pub fn name(self) -> &'static str {
        match self {
            Curve::Helix => "helix",
            Curve::Torus => "torus",
            Curve::Spiral => "spiral",
        }
    }

    /// Parameter interval `[0, U]`.
    pub fn domain(self) -> (f64, f64) {
        match self {
            Curve::Helix => (0.0, 3.6 * PI * helix_scale()),
            Curve::Torus => (0.0, 2.0 * PI),
            Curve::Spiral => (0.0, 6.0),
        }
    }

    pub fn point(self, u: f64) -> Vec3 {
        match self {
            Curve::Helix => {
                let a = u / helix_scale();
                Vec3::new(10.0 * a.sin(), 10.0 * a.cos(), -4.0 * a)
            }
            Curve::Torus => {
                let r = 20.0 + 10.0 * (3.0 * u).cos();
                Vec3::new(r * (u / 2.0).cos(), r * (u / 2.0).sin(), 10.0 * (3.0 * u).sin())
            }
            Curve::Spiral => {
                let l = (u + 3.0).ln();
                Vec3::new(l * (PI * u).sin(), l * (PI * u).cos(), (u * u + 4.0 * u + 5.0).sqrt())
            }
        }
    }

    pub fn derivative(self, u: f64) -> Vec3 {
        match self {
            Curve::Helix => {
                let s = helix_scale();
                let a = u / s;
                Vec3::new(10.0 * a.cos(), -10.0 * a.sin(), -4.0) / s
            }
            Curve::Torus => {
                let r = 20.0 + 10.0 * (3.0 * u).cos();
                let dr = -30.0 * (3.0 * u).sin();
                let (s, c) = (u / 2.0).sin_cos();
                Vec3::new(dr * c - 0.5 * r * s, dr * s + 0.5 * r * c, 30.0 * (3.0 * u).cos())
            }
            Curve::Spiral => {
                let l = (u + 3.0).ln();
                let dl = 1.0 / (u + 3.0);
                let (s, c) = (PI * u).sin_cos();
                Vec3::new(
                    dl * s + l * PI * c,
                    dl * c - l * PI * s,
                    (u + 2.0) / (u * u + 4.0 * u + 5.0).sqrt(),
                )
            }
        }
    }
}

/// Points and exact unit tangents on the grid `u_k = k U / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampled {
    pub curve: Curve,
    pub params: Vec<f64>,
    pub points: Vec<Vec3>,
    pub tangents: Vec<Vec3>,
}

pub fn sample(curve: Curve, n: usize) -> Result<Sampled> {
    if n < 1 {
        return Err(Error::Validation("need at least one interval (two points)".into()));
    }
    let (lo, hi) = curve.domain();
    let params: Vec<f64> = (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect();
    let points = params.iter().map(|&u| curve.point(u)).collect();
    let tangents = params
        .iter()
        .map(|&u| {
            let d = curve.derivative(u);
            d / d.norm()
        })
        .collect();
    Ok(Sampled {
        curve,
        params,
        points,
        tangents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helix_unit_speed() {
        for k in 0..20 {
            let u = k as f64 * 1.7;
            assert!((Curve::Helix.derivative(u).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn torus_start() {
        assert_eq!(Curve::Torus.point(0.0), Vec3::new(30.0, 0.0, 0.0));
    }

    #[test]
    fn helix_samples() {
        let s = sample(Curve::Helix, 5).unwrap();
        assert_eq!(s.points.len(), 6);
        let u_end = 3.6 * PI * helix_scale();
        assert!((s.params[5] - u_end).abs() < 1e-12);
        for (u, p) in s.params.iter().zip(&s.points) {
            assert_eq!(*p, Curve::Helix.point(*u));
        }
    }

    #[test]
    fn derivatives_match_differences() {
        for c in [Curve::Helix, Curve::Torus, Curve::Spiral] {
            let (lo, hi) = c.domain();
            for k in 1..10 {
                let u = lo + (hi - lo) * k as f64 / 10.0;
                let h = 1e-6;
                let fd = (c.point(u + h) - c.point(u - h)) / (2.0 * h);
                assert!((fd - c.derivative(u)).norm() < 1e-6 * (1.0 + fd.norm()), "{c:?} {u}");
            }
        }
    }

    #[test]
    fn rejects_unknown_name() {
        assert!("circle".parse::<Curve>().is_err());
        assert_eq!("torus".parse::<Curve>().unwrap(), Curve::Torus);
    }
}
