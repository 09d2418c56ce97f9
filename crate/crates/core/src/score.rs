//! Closed-form MAP scores.
//!
//! For an alignment `A` the log ratio `log p(A, S | M1) - log p(S | M0)` has
//! three parts, each a difference of Dirichlet normalizers
//! `logDN(v) = sum log Gamma(v_i) - log Gamma(sum v_i)`:
//!
//! * word usage: `logDN(N + beta0) - logDN(beta0)`
//! * background: `-[logDN(N0 + alpha) - logDN(alpha)]`, with `N0` the letter
//!   counts of the whole sequence
//! * motif columns: `sum_k sum_j [logDN(c_jk + gamma) - logDN(gamma)]`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derive_counts_for_widths, Alignment, CountSummary, PriorSpec, Sequence, Site};
use crate::numeric::{ln_gamma, logsumexp};

/// Enumeration cap used by [`exact_bayes_numerator`] unless overridden.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapComponents {
    pub word_usage: f64,
    pub background: f64,
    pub motif_columns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapScoreValue {
    pub log_map: f64,
    pub components: MapComponents,
}

/// Log normalizer of a Dirichlet distribution with parameter `v`.
pub fn log_dirichlet_norm(v: &[f64]) -> Result<f64> {
    if let Some(&bad) = v.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::NonPositivePseudoCount(bad));
    }
    Ok(ldn(v))
}

fn ldn(v: &[f64]) -> f64 {
    v.iter().map(|&x| ln_gamma(x)).sum::<f64>() - ln_gamma(v.iter().sum())
}

/// `logDN(counts + pseudo) - logDN(pseudo)`: log Dirichlet-multinomial
/// probability of one particular sequence with these counts.
pub(crate) fn log_dm(counts: &[u64], pseudo: &[f64]) -> f64 {
    let post: Vec<f64> = counts.iter().zip(pseudo).map(|(&n, &a)| n as f64 + a).collect();
    ldn(&post) - ldn(pseudo)
}

/// Motif-column part of the score: `sum_j [logDN(c_j + gamma) - logDN(gamma)]`
/// over the columns of every motif.
pub fn column_term(column_counts: &[Vec<Vec<u64>>], gamma: &[f64]) -> f64 {
    column_counts
        .iter()
        .flatten()
        .map(|c| log_dm(c, gamma))
        .sum()
}

/// `log p(S | M0)` for letter counts `n0` under a Dirichlet(alpha) null.
pub fn null_log_marginal(n0: &[u64], alpha: &[f64]) -> Result<f64> {
    log_dirichlet_norm(alpha)?;
    if n0.len() != alpha.len() {
        return Err(Error::DimensionMismatch("letter counts vs alpha".into()));
    }
    Ok(log_dm(n0, alpha))
}

/// Single-component logMAP with its three parts. Mixture priors are rejected
/// here; use [`log_map_value`] for them.
pub fn log_map(counts: &CountSummary, priors: &PriorSpec) -> Result<MapScoreValue> {
    if priors.mixture.is_some() {
        return Err(Error::InvalidPrior(
            "mixture prior has no single component breakdown".into(),
        ));
    }
    priors.check_against(counts)?;
    counts.check_consistent()?;
    let d = counts.d();
    let word_usage = log_dm(&counts.word_counts, &priors.beta0);
    let background = -log_dm(&counts.total_letter_counts(), &priors.alpha[..d]);
    let motif_columns = column_term(&counts.column_counts, &priors.gamma);
    Ok(MapScoreValue {
        log_map: word_usage + background + motif_columns,
        components: MapComponents {
            word_usage,
            background,
            motif_columns,
        },
    })
}

/// logMAP for any prior; a mixture scores as
/// `log sum_c weight_c exp(logMAP_c)`.
pub fn log_map_value(counts: &CountSummary, priors: &PriorSpec) -> Result<f64> {
    match &priors.mixture {
        None => Ok(log_map(counts, priors)?.log_map),
        Some(comps) => {
            priors.check_against(counts)?;
            let terms = comps
                .iter()
                .map(|c| Ok(c.weight.ln() + log_map_value(counts, &c.prior)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok(logsumexp(&terms))
        }
    }
}

/// Number of valid alignments of motifs with the given widths.
pub fn count_alignments(seq: &Sequence, widths: &[usize]) -> u128 {
    let n = seq.len();
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for i in 1..=n {
        let mut total = ways[i - 1];
        for &w in widths {
            if w <= i && seq.fits(i - w, w) {
                total = total.saturating_add(ways[i - w]);
            }
        }
        ways[i] = total;
    }
    ways[n]
}

/// Every valid alignment, in a fixed order. Fails if there are more than `cap`.
pub fn enumerate_alignments(seq: &Sequence, widths: &[usize], cap: u128) -> Result<Vec<Alignment>> {
    let total = count_alignments(seq, widths);
    if total > cap {
        return Err(Error::InstanceTooLarge {
            alignments: total,
            cap,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut stack = Vec::new();
    fn rec(seq: &Sequence, widths: &[usize], i: usize, stack: &mut Vec<Site>, out: &mut Vec<Alignment>) {
        if i >= seq.len() {
            out.push(Alignment::new(stack.clone()));
            return;
        }
        rec(seq, widths, i + 1, stack, out);
        for (k, &w) in widths.iter().enumerate() {
            if seq.fits(i, w) {
                stack.push(Site { start: i, motif: k });
                rec(seq, widths, i + w, stack, out);
                stack.pop();
            }
        }
    }
    rec(seq, widths, 0, &mut stack, &mut out);
    Ok(out)
}

/// `log sum_A p(A, S | M1)` by exhaustive enumeration, one motif type per
/// entry of `widths`.
pub fn exact_bayes_numerator(
    seq: &Sequence,
    priors: &PriorSpec,
    widths: &[usize],
    cap: u128,
) -> Result<f64> {
    priors.validate()?;
    if priors.mixture.is_some() {
        return Err(Error::InvalidPrior("enumeration oracle takes a single-component prior".into()));
    }
    if priors.d() != seq.alphabet_size() || priors.n_motifs() != widths.len() {
        return Err(Error::DimensionMismatch(format!(
            "prior covers {} letters and {} motifs, instance has {} letters and {} motifs",
            priors.d(),
            priors.n_motifs(),
            seq.alphabet_size(),
            widths.len()
        )));
    }
    let terms = enumerate_alignments(seq, widths, cap)?
        .iter()
        .map(|a| {
            let counts = derive_counts_for_widths(seq, widths, a)?;
            Ok(log_dm(&counts.word_counts, &priors.beta0)
                + column_term(&counts.column_counts, &priors.gamma))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(logsumexp(&terms))
}

/// Stirling form of `log Gamma(z)`: `(z-1) log(z-1) - (z-1) + log(2 pi (z-1)) / 2`.
fn stirling_ln_gamma(z: f64) -> f64 {
    let x = z - 1.0;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
}

fn stirling_ldn_post(counts: &[u64], pseudo: &[f64]) -> f64 {
    let post: Vec<f64> = counts.iter().zip(pseudo).map(|(&n, &a)| n as f64 + a).collect();
    post.iter().map(|&z| stirling_ln_gamma(z)).sum::<f64>() - stirling_ln_gamma(post.iter().sum())
}

/// logMAP with every count-bearing Gamma factor replaced by its Stirling
/// form; the prior normalizers are kept exact. Requires every count `>= 2`.
pub fn stirling_log_map(counts: &CountSummary, priors: &PriorSpec) -> Result<f64> {
    if priors.mixture.is_some() {
        return Err(Error::InvalidPrior("Stirling expansion takes a single-component prior".into()));
    }
    priors.check_against(counts)?;
    counts.check_consistent()?;
    let smallest = counts
        .word_counts
        .iter()
        .chain(counts.column_counts.iter().flatten().flatten())
        .copied()
        .min()
        .unwrap_or(0);
    if smallest < 2 {
        return Err(Error::CountsTooSmall(smallest));
    }
    let d = counts.d();
    let words = stirling_ldn_post(&counts.word_counts, &priors.beta0) - ldn(&priors.beta0);
    let null = stirling_ldn_post(&counts.total_letter_counts(), &priors.alpha[..d]) - ldn(&priors.alpha);
    let gamma_norm = ldn(&priors.gamma);
    let cols: f64 = counts
        .column_counts
        .iter()
        .flatten()
        .map(|c| stirling_ldn_post(c, &priors.gamma) - gamma_norm)
        .sum();
    Ok(words - null + cols)
}
