use thiserror::Error;

/// Every domain failure the library can report.
///
/// Hyperplane indices carried by variants are 1-based, matching reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("hyperplane {index} has a zero linear form")]
    ZeroForm { index: usize },
    #[error("hyperplanes {first} and {second} have proportional forms")]
    DuplicateHyperplane { first: usize, second: usize },
    #[error("arrangement is not essential: rank {rank} < dimension {dim}")]
    NotEssential { rank: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point lies on hyperplane {0}")]
    OnHyperplane(usize),
    #[error("flat is not an element of the intersection lattice")]
    UnknownFlat,
    #[error("strict system is infeasible")]
    Infeasible,
    #[error("{n} hyperplanes exceed the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("system of half-spaces is not locally consistent")]
    NotLocallyConsistent,
    #[error("system of half-spaces is globally consistent; the sphere is null-homotopic")]
    GloballyConsistent,
    #[error("monodromy weight condition violated: {0}")]
    WeightConditionViolated(String),
    #[error("no generic realization found after {attempts} attempts")]
    GenericityFailed { attempts: usize },
    #[error("realization does not match the required incidences: {0}")]
    RealizationInvalid(String),
    #[error("no locally consistent, globally inconsistent witness after {attempts} attempts")]
    WitnessNotFound { attempts: usize },
    #[error("invalid sign vector: {0}")]
    InvalidSignVector(String),
    #[error("invalid rational: {0}")]
    InvalidRational(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable variant name used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroForm { .. } => "ZeroForm",
            Error::DuplicateHyperplane { .. } => "DuplicateHyperplane",
            Error::NotEssential { .. } => "NotEssential",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::OnHyperplane(_) => "OnHyperplane",
            Error::UnknownFlat => "UnknownFlat",
            Error::Infeasible => "Infeasible",
            Error::TooLarge { .. } => "TooLarge",
            Error::NotLocallyConsistent => "NotLocallyConsistent",
            Error::GloballyConsistent => "GloballyConsistent",
            Error::WeightConditionViolated(_) => "WeightConditionViolated",
            Error::GenericityFailed { .. } => "GenericityFailed",
            Error::RealizationInvalid(_) => "RealizationInvalid",
            Error::WitnessNotFound { .. } => "WitnessNotFound",
            Error::InvalidSignVector(_) => "InvalidSignVector",
            Error::InvalidRational(_) => "InvalidRational",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
