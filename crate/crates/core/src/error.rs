use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("zero vector passed to {0}")]
    ZeroVector(&'static str),

    #[error("bisector undefined: normalized inputs are antipodal")]
    DegenerateBisector,

    #[error("normal undefined: inputs are parallel")]
    ParallelVectors,

    #[error("hodograph control point h{index} vanishes")]
    VanishingControlPoint { index: usize },

    #[error("degenerate pre-image: speed vanishes near t = {t:.6} (min sigma = {sigma_min:e})")]
    DegeneratePreImage { t: f64, sigma_min: f64 },

    #[error("spherical configuration is not admissible (residual {residual:e})")]
    NotAdmissible { residual: f64 },

    #[error("rational frame construction failed (residual {residual:e})")]
    FrameConstruction { residual: f64 },

    #[error(
        "no solution for the Hermite problem: gamma = {gamma:.6} rad, b.du = {du_dot_b:.6}, \
         b.S range = [{s_min:.6}, {s_max:.6}]"
    )]
    NoSolution {
        gamma: f64,
        du_dot_b: f64,
        s_min: f64,
        s_max: f64,
    },

    #[error("scaled PH displacement vanishes (|I| = {norm:e}) at phi2 = {phi2:.6}")]
    VanishingDisplacement { phi2: f64, norm: f64 },

    #[error(
        "infeasible turn: tau = {:.3} pi >= 4 pi / 5",
        tau / std::f64::consts::PI
    )]
    InfeasibleTurn { tau: f64 },

    #[error("no admissible end tangent on the symmetry circle")]
    NoAdmissibleTangent,

    #[error("integration failed near t = {t:.6}: {message}")]
    Integration { t: f64, message: String },

    #[error("parameter {u} outside [{lo}, {hi}]")]
    OutOfRange { u: f64, lo: f64, hi: f64 },

    #[error("segment {index}: {source}{}", hint.as_deref().map(|h| format!(" ({h})")).unwrap_or_default())]
    Segment {
        index: usize,
        hint: Option<String>,
        /// Angle between the incoming and outgoing chord directions, when defined.
        gap: Option<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// The innermost error, looking through segment wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Segment { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(
            self.root(),
            Error::InfeasibleTurn { .. }
                | Error::NoAdmissibleTangent
                | Error::NoSolution { .. }
                | Error::VanishingDisplacement { .. }
        )
    }
}
