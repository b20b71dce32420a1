use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("a register needs at least one site")]
    InvalidArity,
    #[error("dimension mismatch: {left} sites vs {right} sites")]
    DimensionMismatch { left: usize, right: usize },
    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("two-site gate needs distinct sites, got {0} twice")]
    SameSite(usize),
    #[error("protocol needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("Bell extraction needs interior sites (n >= 3), got n = {0}")]
    NoInteriorSites(usize),
    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),
    #[error("site {site} has vacuum population {population:e}; measurement is defined on the dual-rail subspace only")]
    VacPopulated { site: usize, population: f64 },
    #[error("expectation has imaginary part {0:e}; operator is not Hermitian")]
    NonHermitian(f64),
    #[error("invalid noise parameter {name} = {value}")]
    InvalidNoise { name: &'static str, value: f64 },
    #[error("trial count must be at least 1")]
    NoTrials,
}

pub type Result<T> = std::result::Result<T, SimError>;
