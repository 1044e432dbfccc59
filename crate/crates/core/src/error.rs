use thiserror::Error;

/// Errors raised by the dual linear algebra routines and the benchmark harness.
#[derive(Debug, Error)]
pub enum DualSvdError {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    /// The CCDSVD existence condition fails; carries the measured defect
    /// `||(I - U_s U_s^*) A_i (I - V_s V_s^*)||_F` and the threshold it exceeded.
    #[error("compact dual SVD does not exist: defect {defect:e} exceeds {threshold:e}")]
    ExistenceViolated { defect: f64, threshold: f64 },

    #[error("matrix is not skew-Hermitian (||P + P^*||_F = {residual:e})")]
    NotSkewHermitian { residual: f64 },

    #[error("standard part is the zero matrix")]
    ZeroStandardPart,

    #[error("infinitesimal part is the zero matrix")]
    ZeroInfinitesimalPart,

    #[error("standard part is rank deficient: |R_s[{index},{index}]| = {value:e}")]
    RankDeficientStandardPart { index: usize, value: f64 },

    #[error("singular value decomposition did not converge")]
    SvdNotConverged,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl DualSvdError {
    /// True for failures of the numerical preconditions (as opposed to bad
    /// configuration or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Self::ExistenceViolated { .. }
                | Self::RankDeficientStandardPart { .. }
                | Self::ZeroStandardPart
                | Self::ZeroInfinitesimalPart
                | Self::SvdNotConverged
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Self::Io(_) | Self::Csv(_) | Self::Json(_) | Self::Pgm(_))
    }
}

pub type Result<T, E = DualSvdError> = std::result::Result<T, E>;
