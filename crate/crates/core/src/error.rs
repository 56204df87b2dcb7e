use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("position {x} lies outside the profile domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Bloch vector is not on the cone (s0 = {s0}, residual = {residual})")]
    NotOnCone { s0: f64, residual: f64 },

    #[error("Bloch vector at the cone apex (s3 = {s3})")]
    Apex { s3: f64 },

    #[error("path passes through the cone apex at sample {index}")]
    ApexCrossing { index: usize },

    #[error("path is not closed (endpoint gap {gap})")]
    OpenLoop { gap: f64 },

    #[error("ray label must be normalized to s0 = 1, got s0 = {s0}")]
    RayNormalization { s0: f64 },

    #[error("loop leaves the upper hyperboloid sheet (s3 = {s3} at sample {index})")]
    BelowHyperboloid { s3: f64, index: usize },

    #[error("evolution is not cyclic (residual {residual})")]
    NotCyclic { residual: f64 },

    #[error("adjoint pairing is degenerate (|<phi|psi>| = {magnitude})")]
    DegeneratePairing { magnitude: f64 },

    #[error("gauge map is not on a plateau at x = {x} (dxi = {dxi})")]
    NotPlateau { x: f64, dxi: f64 },

    #[error("record too short for demodulation: {0}")]
    RecordTooShort(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotOnCone { .. } => "not_on_cone",
            Error::Apex { .. } => "apex",
            Error::ApexCrossing { .. } => "apex_crossing",
            Error::OpenLoop { .. } => "open_loop",
            Error::RayNormalization { .. } => "ray_normalization",
            Error::BelowHyperboloid { .. } => "below_hyperboloid",
            Error::NotCyclic { .. } => "not_cyclic",
            Error::DegeneratePairing { .. } => "degenerate_pairing",
            Error::NotPlateau { .. } => "not_plateau",
            Error::RecordTooShort(_) => "record_too_short",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
