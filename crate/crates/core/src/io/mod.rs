//! File formats: point streams (JSON or CSV), spline files (JSON), sample
//! tables (CSV) and validation reports.

pub mod curves;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle;
use crate::ph::{PHQuintic, PreImage};
use crate::quat::{Frame, Quat, UnitVec3, Vec3};
use crate::rrmf::{class_i_check, RationalFrame};
use crate::spline::{self, Continuity, KnotMode, PointStream, Segment, SegmentReport, SplinePath};

use curves::{Curve, Sampled};

pub const SPLINE_FORMAT: &str = "rrmf-spline";
pub const SPLINE_VERSION: u32 = 1;

fn parse_error(path: &str, e: &serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => Error::Schema(format!("{path}: {e}")),
        Category::Io => Error::Io(std::io::Error::other(e.to_string())),
        Category::Syntax | Category::Eof => Error::Parse {
            path: path.to_string(),
            line: e.line(),
            message: e.to_string(),
        },
    }
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Point stream on disk. CSV files carry points only; JSON files may add
/// the initial frame, reference tangents and a knot mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamFile {
    pub points: Vec<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_frame: Option<Frame>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangents: Option<Vec<Vec3>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<KnotMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Curve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
}

impl From<&Sampled> for StreamFile {
    fn from(s: &Sampled) -> StreamFile {
        StreamFile {
            points: s.points.clone(),
            initial_frame: None,
            tangents: Some(s.tangents.clone()),
            knots: Some(KnotMode::Uniform),
            curve: Some(s.curve),
            params: Some(s.params.clone()),
        }
    }
}

impl StreamFile {
    pub fn read(path: &Path) -> Result<StreamFile> {
        let text = read_text(path)?;
        let label = path.display().to_string();
        let is_json = match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => true,
            Some(e) if e.eq_ignore_ascii_case("csv") => false,
            _ => text.trim_start().starts_with('{'),
        };
        if is_json {
            StreamFile::from_json(&text, &label)
        } else {
            StreamFile::from_csv(&text, &label)
        }
    }

    pub fn from_json(text: &str, label: &str) -> Result<StreamFile> {
        let s: StreamFile = serde_json::from_str(text).map_err(|e| parse_error(label, &e))?;
        s.check()?;
        Ok(s)
    }

    /// `x,y,z` per line; `#` starts a comment line, a non-numeric first
    /// record is taken as a header.
    pub fn from_csv(text: &str, label: &str) -> Result<StreamFile> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse {
                path: label.to_string(),
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.iter().all(str::is_empty) {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: label.to_string(),
                line,
                message,
            };
            if rec.len() != 3 {
                return Err(err(format!("expected 3 fields (x,y,z), found {}", rec.len())));
            }
            let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match vals {
                Ok(v) => points.push(Vec3::new(v[0], v[1], v[2])),
                Err(_) if i == 0 => continue,
                Err(e) => return Err(err(format!("invalid number: {e}"))),
            }
        }
        let s = StreamFile {
            points,
            initial_frame: None,
            tangents: None,
            knots: None,
            curve: None,
            params: None,
        };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::Validation(format!(
                "stream has {} point(s); at least two are required",
                self.points.len()
            )));
        }
        if let Some(t) = &self.tangents {
            if t.len() != self.points.len() {
                return Err(Error::Validation(format!(
                    "{} tangents for {} points",
                    t.len(),
                    self.points.len()
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let is_csv = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
            w.write_record(["x", "y", "z"]).map_err(csv_io)?;
            for p in &self.points {
                w.write_record([p.x, p.y, p.z].map(|v| v.to_string())).map_err(csv_io)?;
            }
            w.flush()?;
            Ok(())
        } else {
            let mut f = fs::File::create(path)?;
            f.write_all(self.to_json()?.as_bytes())?;
            f.write_all(b"\n")?;
            Ok(())
        }
    }

    /// Knot mode: explicit override, then the file's own, then uniform for
    /// sampled curves and chord length otherwise.
    pub fn knot_mode(&self, choice: Option<KnotMode>) -> KnotMode {
        choice.or(self.knots).unwrap_or(if self.tangents.is_some() {
            KnotMode::Uniform
        } else {
            KnotMode::Chord
        })
    }

    /// Point stream with an initial frame: `frame` if given, then the
    /// file's, then a default built from the first reference tangent.
    pub fn to_stream(&self, mode: KnotMode, frame: Option<Frame>) -> Result<PointStream> {
        let frame = match frame.or(self.initial_frame) {
            Some(f) => f,
            None => {
                let t0 = match &self.tangents {
                    Some(t) => t[0].normalize()?,
                    None => spline::minaj2_tangents(&self.points, &spline::knots(&self.points, mode))?[0],
                };
                spline::default_frame(t0)
            }
        };
        PointStream::new(self.points.clone(), frame)
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Reads a frame file: a JSON object with `u`, `v`, `w`.
pub fn read_frame(path: &Path) -> Result<Frame> {
    let text = read_text(path)?;
    let f: Frame = serde_json::from_str(&text).map_err(|e| parse_error(&path.display().to_string(), &e))?;
    f.validate(1e-9)?;
    Ok(f)
}

/// One stored segment: start point, pre-image in world axes, `W`
/// coefficients and solver parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub r0: Vec3,
    pub axis: UnitVec3,
    pub a: [Quat; 3],
    pub wa: [f64; 3],
    pub wb: [f64; 3],
    pub mu: f64,
    pub phi2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplineFile {
    pub format: String,
    pub version: u32,
    pub knots: Vec<f64>,
    pub initial_frame: Frame,
    pub segments: Vec<SegmentRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<SegmentReport>,
}

impl SplineFile {
    pub fn from_path(p: &SplinePath) -> SplineFile {
        SplineFile {
            format: SPLINE_FORMAT.into(),
            version: SPLINE_VERSION,
            knots: p.knots.clone(),
            initial_frame: p.initial_frame,
            segments: p
                .segments
                .iter()
                .map(|s| SegmentRecord {
                    r0: s.curve.r0,
                    axis: s.curve.preimage.axis,
                    a: s.curve.preimage.a,
                    wa: s.frame.wa,
                    wb: s.frame.wb,
                    mu: s.mu,
                    phi2: s.phi2,
                })
                .collect(),
            reports: p.reports.clone(),
        }
    }

    pub fn to_path(&self) -> Result<SplinePath> {
        if self.format != SPLINE_FORMAT {
            return Err(Error::Schema(format!("unknown format '{}'", self.format)));
        }
        if self.version != SPLINE_VERSION {
            return Err(Error::Schema(format!("unsupported version {}", self.version)));
        }
        if self.segments.is_empty() {
            return Err(Error::Schema("spline has no segments".into()));
        }
        if self.knots.len() != self.segments.len() + 1 {
            return Err(Error::Schema(format!(
                "{} knots for {} segments",
                self.knots.len(),
                self.segments.len()
            )));
        }
        if self.knots.windows(2).any(|w| !(w[1] > w[0])) || self.knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::Schema("knots must be finite and strictly increasing".into()));
        }
        let segments = self
            .segments
            .iter()
            .map(|r| {
                let pre = PreImage::new(r.a[0], r.a[1], r.a[2], r.axis);
                Segment {
                    curve: PHQuintic::new(r.r0, pre),
                    frame: RationalFrame::from_parts(pre, r.wa, r.wb),
                    mu: r.mu,
                    phi2: r.phi2,
                }
            })
            .collect();
        Ok(SplinePath {
            knots: self.knots.clone(),
            segments,
            initial_frame: self.initial_frame,
            reports: self.reports.clone(),
        })
    }

    pub fn from_json(text: &str, label: &str) -> Result<SplineFile> {
        if text.trim().is_empty() {
            return Err(Error::Schema(format!("{label}: empty spline file")));
        }
        serde_json::from_str(text).map_err(|e| parse_error(label, &e))
    }

    pub fn read(path: &Path) -> Result<SplineFile> {
        SplineFile::from_json(&read_text(path)?, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(serde_json::to_string_pretty(self)?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

pub const EVAL_HEADER: [&str; 13] = [
    "u", "x", "y", "z", "f1x", "f1y", "f1z", "f2x", "f2y", "f2z", "f3x", "f3y", "f3z",
];

/// Writes `(u, point, frame)` rows. Values use the shortest representation
/// that parses back to the same `f64`.
pub fn write_eval_csv<W: std::io::Write>(out: W, rows: &[(f64, Vec3, Frame)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EVAL_HEADER).map_err(csv_io)?;
    for (u, p, f) in rows {
        let vals = [
            *u, p.x, p.y, p.z, f.f1.x, f.f1.y, f.f1.z, f.f2.x, f.f2.y, f.f2.z, f.f3.x, f.f3.y, f.f3.z,
        ];
        w.write_record(vals.map(|v| v.to_string())).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a table written by [`write_eval_csv`].
pub fn read_eval_csv(text: &str, label: &str) -> Result<Vec<(f64, Vec3, Frame)>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_io)?.clone();
    if header.iter().ne(EVAL_HEADER) {
        return Err(Error::Schema(format!("{label}: unexpected columns")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_io)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let v: Vec<f64> = rec
            .iter()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                path: label.to_string(),
                line,
                message: e.to_string(),
            })?;
        let vec = |i: usize| Vec3::new(v[i], v[i + 1], v[i + 2]);
        rows.push((v[0], vec(1), Frame::new(vec(4), vec(7), vec(10))));
    }
    Ok(rows)
}

/// One named check with its measured value and threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub segment: Option<usize>,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub segments: usize,
    pub samples: usize,
    pub continuity: Continuity,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Thresholds used by [`validate`].
pub mod limits {
    pub const PH_IDENTITY: f64 = 1e-10;
    pub const CLASS_I: f64 = 1e-10;
    pub const FRAME_VS_ODE: f64 = 1e-6;
    pub const RMF_DEFECT: f64 = 1e-4;
    pub const HODOGRAPH_FD: f64 = 1e-6;
    pub const TANGENT_G1: f64 = 1e-9;
    pub const FRAME_C0: f64 = 1e-8;
    pub const POSITION_C0: f64 = 1e-9;
    pub const ORTHONORMAL: f64 = 1e-9;
}

/// Runs the PH identity, class-I, frame-versus-ODE, rotation-minimality and
/// continuity checks with `samples` ODE samples per segment.
pub fn validate(path: &SplinePath, samples: usize) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, segment: Option<usize>, value: f64, tolerance: f64, message: Option<String>| {
        checks.push(Check {
            name: name.into(),
            segment,
            value,
            tolerance,
            pass: value <= tolerance,
            message,
        });
    };
    let scale = path
        .segments
        .iter()
        .map(|s| s.curve.r0.max_abs().max(s.curve.end_point().max_abs()))
        .fold(1.0f64, f64::max);
    for (k, s) in path.segments.iter().enumerate() {
        let seg = Some(k);
        push("ph_identity", seg, s.curve.ph_identity_residual(), limits::PH_IDENTITY, None);
        push(
            "class_i",
            seg,
            class_i_check(&s.curve.preimage).relative(),
            limits::CLASS_I,
            None,
        );
        push(
            "hodograph_fd",
            seg,
            oracle::hodograph_fd_error(&s.curve, 1e-6, 64),
            limits::HODOGRAPH_FD,
            None,
        );
        let ortho = (0..=samples)
            .map(|i| s.frame.eval(i as f64 / samples as f64).orthonormality_error())
            .fold(0.0, f64::max);
        push("frame_orthonormal", seg, ortho, limits::ORTHONORMAL, None);
        let start = s.frame.eval(0.0);
        match oracle::integrate_rmf(&s.curve, &start, samples, oracle::ODE_TOL) {
            Ok(tr) => push("frame_vs_ode", seg, oracle::compare_frames(&s.frame, &tr), limits::FRAME_VS_ODE, None),
            Err(e) => push("frame_vs_ode", seg, f64::INFINITY, limits::FRAME_VS_ODE, Some(e.to_string())),
        }
        push(
            "rmf_defect_fd",
            seg,
            oracle::max_rotation_minimality_defect(&s.frame, samples.min(200)),
            limits::RMF_DEFECT,
            None,
        );
    }
    let c = path.continuity();
    push("tangent_g1", None, c.tangent, limits::TANGENT_G1, None);
    push("frame_c0", None, c.frame, limits::FRAME_C0, None);
    push("position_c0", None, c.position / scale, limits::POSITION_C0, None);
    let start = path.segments[0].frame.eval(0.0).angle_to(&path.initial_frame);
    push("initial_frame", None, start, limits::FRAME_C0, None);
    let pass = checks.iter().all(|c| c.pass);
    ValidationReport {
        segments: path.segments.len(),
        samples,
        continuity: c,
        checks,
        pass,
    }
}
