//! Competing model-selection criteria: AIC, BIC, KLI and compositional KL.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CountSummary, Pwm};
use crate::numeric::{fmt_sig, xlogx};

/// Kullback-Leibler information of a motif relative to background, summed
/// over columns (natural log).
pub fn kli(pwm: &Pwm, theta0: &[f64]) -> Result<f64> {
    if theta0.len() != pwm.alphabet_size() {
        return Err(Error::DimensionMismatch(format!(
            "background has {} letters, PWM has {}",
            theta0.len(),
            pwm.alphabet_size()
        )));
    }
    if let Some(j) = theta0.iter().position(|&t| !(t > 0.0)) {
        return Err(Error::ZeroBackgroundProbability(j));
    }
    Ok(pwm
        .columns()
        .iter()
        .map(|col| {
            col.iter()
                .zip(theta0)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &q)| p * (p / q).ln())
                .sum::<f64>()
        })
        .sum())
}

/// `Σ p log(p/q)` with the motif composition as `p`.
pub fn composition_kl(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "p has {} entries, q has {}",
            p.len(),
            q.len()
        )));
    }
    let mut total = 0.0;
    for (j, (&pj, &qj)) in p.iter().zip(q).enumerate() {
        if pj > 0.0 {
            if !(qj > 0.0) {
                return Err(Error::SupportMismatch(j));
            }
            total += pj * (pj / qj).ln();
        }
    }
    Ok(total)
}

/// Complete-data log likelihood at the maximum-likelihood word usage and
/// column frequencies of a count summary.
pub fn ml_complete_loglik(counts: &CountSummary) -> f64 {
    fn block<'a>(v: impl Iterator<Item = &'a u64> + Clone) -> f64 {
        let total: u64 = v.clone().sum();
        v.map(|&n| xlogx(n as f64)).sum::<f64>() - xlogx(total as f64)
    }
    block(counts.word_counts.iter()) + counts.column_counts.iter().flatten().map(|c| block(c.iter())).sum::<f64>()
}

pub fn aic(loglik: f64, n_params: usize) -> f64 {
    -2.0 * loglik + 2.0 * n_params as f64
}

pub fn bic(loglik: f64, n_params: usize, n: usize) -> f64 {
    -2.0 * loglik + n_params as f64 * (n.max(1) as f64).ln()
}

/// Free parameters of a dictionary: `(d−1)·w` per motif plus `D−1` for the
/// word usage vector.
pub fn n_params(d: usize, widths: &[usize]) -> usize {
    let words = d + widths.len();
    widths.iter().map(|w| (d - 1) * w).sum::<usize>() + words - 1
}

/// One row of a criteria comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionRow {
    pub criterion: String,
    pub model: String,
    pub score: f64,
}

impl CriterionRow {
    pub fn new(criterion: &str, model: &str, score: f64) -> Self {
        Self { criterion: criterion.into(), model: model.into(), score }
    }
}

/// Writes `criterion,model,score` rows with 12 significant digits.
pub fn write_criteria_csv<W: Write>(out: W, rows: &[CriterionRow]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "criterion,model,score")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.criterion, r.model, fmt_sig(r.score, 12))?;
    }
    out.flush()
}
