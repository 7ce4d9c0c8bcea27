use alloc::string::String;
use alloc::vec::Vec;

/// Every failure the engine reports. The CLI maps these onto exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error(
        "pole collision: upper pair {upper} (k={k}) meets lower pair {lower} (l={l}) at s={location}"
    )]
    PoleCollision {
        upper: usize,
        lower: usize,
        k: usize,
        l: usize,
        location: f64,
    },
    #[error("density conditions failed: {}", .0.join("; "))]
    InvalidDensity(Vec<String>),
    #[error("invalid class parameters: {0}")]
    InvalidClassParams(String),
    #[error("gamma function pole at {0}")]
    GammaPole(f64),
    #[error("argument outside the asymptotic sector")]
    SectorViolation,
    #[error("series not applicable: {0}")]
    SeriesDomain(String),
    #[error("coincident poles at s={0}; use contour quadrature")]
    MultiplePoles(f64),
    #[error("no convergence after {terms} terms (last term {last_term:e})")]
    NoConvergence { terms: usize, last_term: f64 },
    #[error("contour abscissa {0} does not separate the pole families")]
    BadContour(f64),
    #[error("truncation tail bound {bound:e} exceeds tolerance {tol:e}")]
    Truncation { bound: f64, tol: f64 },
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("theta must be nonzero")]
    ThetaZero,
    #[error("shape not supported: {0}")]
    Shape(String),
    #[error("matching does not reproduce the parameters: {0}")]
    BadMatching(String),
    #[error("a* budget violated: {0}")]
    Budget(String),
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
}

impl Error {
    /// Stable upper-case tag, used in reports and by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "INVALID_SPEC",
            Error::PoleCollision { .. } => "POLE_COLLISION",
            Error::InvalidDensity(_) => "INVALID_DENSITY",
            Error::InvalidClassParams(_) => "INVALID_CLASS_PARAMS",
            Error::GammaPole(_) => "GAMMA_POLE",
            Error::SectorViolation => "SECTOR_VIOLATION",
            Error::SeriesDomain(_) => "SERIES_DOMAIN",
            Error::MultiplePoles(_) => "MULTIPLE_POLES",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::BadContour(_) => "BAD_CONTOUR",
            Error::Truncation { .. } => "TRUNCATION",
            Error::Divergent(_) => "DIVERGENT",
            Error::ThetaZero => "THETA_ZERO",
            Error::Shape(_) => "SHAPE",
            Error::BadMatching(_) => "BAD_MATCHING",
            Error::Budget(_) => "BUDGET",
            Error::UnknownFixture(_) => "UNKNOWN_FIXTURE",
            Error::Domain(_) => "DOMAIN",
        }
    }

    /// True for errors caused by the input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::PoleCollision { .. }
                | Error::InvalidDensity(_)
                | Error::InvalidClassParams(_)
                | Error::Shape(_)
                | Error::BadMatching(_)
                | Error::Budget(_)
                | Error::UnknownFixture(_)
                | Error::ThetaZero
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
