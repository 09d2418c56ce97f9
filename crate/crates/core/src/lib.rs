//! Maximal a posteriori (MAP) model selection for stochastic-dictionary motif
//! models.
//!
//! The crate is organised by concern:
//!
//! * [`model`]: alphabets, sequences, PWMs, dictionaries, alignments, priors
//!   and the count summaries derived from them.
//! * [`likelihood`]: forward recursion over all segmentations and posterior
//!   alignment sampling.
//! * [`score`]: closed-form logMAP, the exhaustive Bayes-factor numerator and
//!   the Stirling expansion.
//! * [`asymptotics`]: the MAP divergence factor and its special cases.
//! * [`criteria`]: AIC, BIC and Kullback-Leibler criteria.
//! * [`sampler`]: data augmentation and progressive dictionary updating.
//! * [`sensitivity`]: epsilon-contamination and local prior sensitivity.
//! * [`simulate`]: planted-motif sequence generation.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod criteria;
pub mod error;
pub mod fasta;
pub mod likelihood;
pub mod model;
pub mod numeric;
pub mod sampler;
pub mod score;
pub mod sensitivity;
pub mod simulate;

pub use error::{Error, ErrorKind, Result};
pub use model::{
    consensus, consensus_string, derive_counts, Alignment, Alphabet, CountSummary, Dictionary,
    MixtureComponent, PriorSpec, Pwm, Sequence, Site,
};
pub use score::{log_map, log_map_value, MapScoreValue};
