use alloc::string::String;

/// Errors raised by the algebra, spectrum and calculus layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("generator index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("algebra dimension n = {0} exceeds the supported maximum of 12")]
    TooManyGenerators(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero paravector has no inverse")]
    ZeroParavector,

    #[error("not a unit 1-vector: {0}")]
    NotImaginaryUnit(String),

    /// The evaluation point lies on (or within the guard distance of) the S-spectrum.
    #[error("point (u = {u}, v = {v}) lies on the S-spectrum")]
    SpectralPoint { u: f64, v: f64 },

    #[error("points lie on the same sphere (u = {u}, v = {v})")]
    SameSphere { u: f64, v: f64 },

    #[error("cannot separate selected spheres from the rest of the spectrum: {0}")]
    Separation(String),

    #[error("function domain violated: {0}")]
    DomainViolation(String),

    #[error("intrinsic symmetry h(conj z) = conj h(z) violated at z = {re}{im:+}i (deviation {deviation:e})")]
    SymmetryViolation { re: f64, im: f64, deviation: f64 },

    #[error("Neumann series diverges: ||A - C|| ||A^-1|| = {0} >= 1")]
    Divergence(f64),

    #[error("series did not converge within {0} terms")]
    MaxTermsExceeded(usize),

    #[error("series radius violated: ||T|| = {norm} >= |s| = {modulus}")]
    SeriesRadius { norm: f64, modulus: f64 },

    #[error("eigenvalue solver did not converge")]
    EigenSolver,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
