use serde_json::json;
use slicecalc_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("{0}")]
    Verification(String),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Io(_) => "io",
            CliError::Verification(_) => "verification",
            CliError::Core(e) => match e {
                Error::IndexOutOfRange { .. } => "index_out_of_range",
                Error::TooManyGenerators(_) => "too_many_generators",
                Error::DimensionMismatch(_) => "dimension_mismatch",
                Error::ZeroParavector => "zero_paravector",
                Error::NotImaginaryUnit(_) => "not_imaginary_unit",
                Error::SpectralPoint { .. } => "spectral_point",
                Error::SameSphere { .. } => "same_sphere",
                Error::Separation(_) => "separation",
                Error::DomainViolation(_) => "domain_violation",
                Error::SymmetryViolation { .. } => "symmetry_violation",
                Error::Divergence(_) => "divergence",
                Error::MaxTermsExceeded(_) => "max_terms_exceeded",
                Error::SeriesRadius { .. } => "series_radius",
                Error::EigenSolver => "eigen_solver",
                Error::InvalidArgument(_) => "invalid_argument",
            },
        }
    }

    /// Input problems exit with 2, numerical guards with 3, failed checks with 4.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_PARSE,
            CliError::Verification(_) => EXIT_VERIFY,
            CliError::Core(e) => match e {
                Error::IndexOutOfRange { .. }
                | Error::TooManyGenerators(_)
                | Error::DimensionMismatch(_)
                | Error::NotImaginaryUnit(_)
                | Error::InvalidArgument(_) => EXIT_PARSE,
                _ => EXIT_NUMERICAL,
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "kind": self.kind(), "detail": self.to_string() } })
    }
}
