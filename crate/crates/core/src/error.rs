use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("bracket [{left}, {right}] leaves the span of the basis (residual {residual:.3e})")]
    NotClosed {
        left: String,
        right: String,
        residual: f64,
    },

    #[error("gram matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    DegenerateGram { min_eigenvalue: f64 },

    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("space has no 𝔪₀ ⊕ 𝔪₁ split")]
    MissingSplit,

    #[error("invalid reductive split: {0}")]
    InvalidSplit(String),

    #[error("vectors span a degenerate plane (area² = {area_sq:.3e})")]
    DegeneratePlane { area_sq: f64 },

    #[error("no isotropy witness found for {0}")]
    NoWitness(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("zero vector where a direction is required")]
    ZeroVector,

    #[error("scan step {step:.3e} too coarse for operator scale {scale:.3e}")]
    StepTooCoarse { step: f64, scale: f64 },

    #[error("closed-form hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("closed-form time {t:.9} ({class}) not matched by the scan")]
    Mismatch { t: f64, class: String },

    #[error("slope angle {0} outside [0, π/2]")]
    BadAngle(f64),

    #[error("bad direction parameters: {0}")]
    BadAux(String),

    #[error("cannot parse space descriptor {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
