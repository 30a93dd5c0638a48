//! Fixtures shared by the benchmarks.

use rrmf_core::hermite::HermiteData;
use rrmf_core::io::curves::{self, Curve};
use rrmf_core::spline::{self, KnotMode};
use rrmf_core::{Frame, PointStream, SplinePath, UnitVec3, Vec3};

/// Six-point data stream interpolated with chord-length knots.
pub fn generic_stream() -> PointStream {
    let points = vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(-5.0, 5.0, 2.0),
        Vec3::new(0.0, 10.0, -2.0),
        Vec3::new(8.0, 12.0, 5.0),
        Vec3::new(15.0, 2.0, 3.0),
        Vec3::new(2.0, 0.0, 7.0),
    ];
    let knots = spline::chord_knots(&points);
    let t0 = spline::minaj2_tangents(&points, &knots).expect("tangents")[0];
    PointStream::new(points, spline::default_frame(t0)).expect("stream")
}

/// Helix sampled with `n` segments, plus its exact unit tangents.
pub fn helix_stream(n: usize) -> (PointStream, Vec<Vec3>) {
    let s = curves::sample(Curve::Helix, n).expect("sample");
    let frame = spline::default_frame(s.tangents[0].normalize().expect("tangent"));
    (PointStream::new(s.points, frame).expect("stream"), s.tangents)
}

/// Local data with end tangents at 0.6 pi and the chord off the bisector.
pub fn hermite_data() -> HermiteData {
    let g = 0.6 * std::f64::consts::PI;
    let (s, c) = (0.5 * g).sin_cos();
    let u_i = Vec3::new(c, s, 0.0).normalize().expect("unit");
    let u_f = Vec3::new(c, -s, 0.0).normalize().expect("unit");
    let frame = Frame::from_tangent_hint(u_i, *UnitVec3::Z).expect("frame");
    let du = Vec3::new(0.8, 0.0, 0.6);
    HermiteData::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(1.0, 2.0, 3.0) + du * 4.0, frame, u_f, 1e-9).expect("data")
}

pub fn generic_path() -> SplinePath {
    spline::build(&generic_stream(), KnotMode::Chord, None).expect("build")
}
