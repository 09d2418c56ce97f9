use thiserror::Error;

/// Errors raised by the library.
///
/// Variants group into validation problems, resource refusals and numeric
/// domain violations; [`Error::kind`] exposes that grouping so front ends
/// can map errors onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("unknown letter {letter:?} at position {position}")]
    UnknownLetter { letter: char, position: usize },
    #[error("invalid position weight matrix: {0}")]
    InvalidPwm(String),
    #[error("invalid dictionary: {0}")]
    InvalidDictionary(String),
    #[error("sites at {first} and {second} overlap")]
    OverlappingSites { first: usize, second: usize },
    #[error("site at {start} (width {width}) does not fit in the sequence or crosses a record boundary")]
    SiteOutOfRange { start: usize, width: usize },
    #[error("unknown motif index {0}")]
    UnknownMotifIndex(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pseudo-counts must be strictly positive, got {0}")]
    NonPositivePseudoCount(f64),
    #[error("invalid prior specification: {0}")]
    InvalidPrior(String),
    #[error("dictionary has no words")]
    EmptyDictionary,
    #[error("sequence has zero probability under the dictionary")]
    ZeroLikelihood,
    #[error("instance too large: {alignments} alignments exceeds cap {cap}")]
    InstanceTooLarge { alignments: u128, cap: u128 },
    #[error("counts too small for the Stirling expansion: found {0}, need at least 2")]
    CountsTooSmall(u64),
    #[error("argument outside the domain of the divergence rate: {0}")]
    DomainViolation(String),
    #[error("background probability of letter {0} is zero")]
    ZeroBackgroundProbability(usize),
    #[error("p has mass on letter {0} where q has none")]
    SupportMismatch(usize),
    #[error("need at least three points with increasing N, got {0}")]
    TooFewPoints(usize),
    #[error("iterations must exceed burn-in")]
    TooFewIterations,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("pseudo-count totals must equal 1 (gamma sums to {gamma}, delta sums to {delta})")]
    PseudoCountSumNotOne { gamma: f64, delta: f64 },
    #[error("derivative is defined for a single motif type, dictionary has {0}")]
    MultiMotifUnsupported(usize),
    #[error("cannot place {sites} non-overlapping sites after {attempts} attempts")]
    InfeasiblePlacement { sites: usize, attempts: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Resource,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InstanceTooLarge { .. } | Error::InfeasiblePlacement { .. } => ErrorKind::Resource,
            Error::ZeroLikelihood
            | Error::DomainViolation(_)
            | Error::CountsTooSmall(_)
            | Error::ZeroBackgroundProbability(_)
            | Error::SupportMismatch(_) => ErrorKind::Numeric,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
