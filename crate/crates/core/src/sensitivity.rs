//! Prior robustness: epsilon-contamination of the column prior, delta-grid
//! profiles, and local sensitivity derivatives of logMAP.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CountSummary, PriorSpec};
use crate::numeric::{fmt_sig, logaddexp, logsumexp, xlogx};
use crate::score::{log_dirichlet_norm, log_dm, log_map_value, MapScoreValue};

const SUM_TOL: f64 = 1e-9;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    Ok(())
}

/// Posterior weight of the base prior, `(1−ε)m₀ / [(1−ε)m₀ + ε m_q]`.
pub fn lambda_weight(epsilon: f64, log_m_pi0: f64, log_m_q: f64) -> f64 {
    let a = (1.0 - epsilon).ln() + log_m_pi0;
    let b = epsilon.ln() + log_m_q;
    if a == f64::NEG_INFINITY {
        return 0.0;
    }
    (a - logaddexp(a, b)).exp()
}

/// `log[(1−ε)exp(a) + ε exp(b)]`; exact at both endpoints.
pub fn contaminated_log(epsilon: f64, log_a: f64, log_b: f64) -> f64 {
    if epsilon == 0.0 {
        return log_a;
    }
    if epsilon == 1.0 {
        return log_b;
    }
    logaddexp((1.0 - epsilon).ln() + log_a, epsilon.ln() + log_b)
}

/// Contaminated MAP score for one alignment under `(1−ε)π₀ + εq`.
pub fn contaminated_map(epsilon: f64, map_pi0: &MapScoreValue, map_q: &MapScoreValue) -> f64 {
    contaminated_log(epsilon, map_pi0.log_map, map_q.log_map)
}

/// An ε-contaminated prior pair over the full model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    pub epsilon: f64,
    pub base: PriorSpec,
    pub contaminant: PriorSpec,
}

impl ContaminationSpec {
    pub fn new(epsilon: f64, base: PriorSpec, contaminant: PriorSpec) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        base.validate()?;
        contaminant.validate()?;
        Ok(Self { epsilon, base, contaminant })
    }

    /// Contaminated logMAP for a count summary.
    pub fn log_map(&self, counts: &CountSummary) -> Result<f64> {
        let a = log_map_value(counts, &self.base)?;
        let b = log_map_value(counts, &self.contaminant)?;
        Ok(contaminated_log(self.epsilon, a, b))
    }
}

/// A finite mixture of product-Dirichlet priors on one PWM (every column
/// shares the component's pseudo-counts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletMixture {
    pub weights: Vec<f64>,
    pub components: Vec<Vec<f64>>,
}

impl DirichletMixture {
    pub fn new(weights: Vec<f64>, components: Vec<Vec<f64>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(Error::InvalidPrior("mixture needs one weight per component".into()));
        }
        let d = components[0].len();
        for g in &components {
            if g.len() != d {
                return Err(Error::DimensionMismatch("mixture components differ in length".into()));
            }
            log_dirichlet_norm(g)?;
        }
        if weights.iter().any(|&w| !(w > 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidPrior("mixture weights must be positive and sum to 1".into()));
        }
        Ok(Self { weights, components })
    }

    pub fn single(gamma: Vec<f64>) -> Result<Self> {
        Self::new(vec![1.0], vec![gamma])
    }

    pub fn d(&self) -> usize {
        self.components[0].len()
    }

    fn check_counts(&self, counts: &[Vec<u64>]) -> Result<()> {
        if counts.is_empty() || counts.iter().any(|c| c.len() != self.d()) {
            return Err(Error::DimensionMismatch(format!(
                "count matrix must be non-empty with {} letters per column",
                self.d()
            )));
        }
        Ok(())
    }

    fn component_terms(&self, counts: &[Vec<u64>]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.components)
            .map(|(w, g)| w.ln() + counts.iter().map(|c| log_dm(c, g)).sum::<f64>())
            .collect()
    }

    /// Log marginal probability of the column letters.
    pub fn log_marginal(&self, counts: &[Vec<u64>]) -> Result<f64> {
        self.check_counts(counts)?;
        Ok(logsumexp(&self.component_terms(counts)))
    }

    /// Posterior mean column frequencies, one probability vector per column.
    pub fn posterior_mean(&self, counts: &[Vec<u64>]) -> Result<Vec<Vec<f64>>> {
        self.check_counts(counts)?;
        let terms = self.component_terms(counts);
        let total = logsumexp(&terms);
        let mut mean = vec![vec![0.0; self.d()]; counts.len()];
        for (t, g) in terms.iter().zip(&self.components) {
            let post = (t - total).exp();
            for (row, col) in mean.iter_mut().zip(counts) {
                let s: f64 = col.iter().sum::<u64>() as f64 + g.iter().sum::<f64>();
                for ((m, &c), &a) in row.iter_mut().zip(col).zip(g) {
                    *m += post * (c as f64 + a) / s;
                }
            }
        }
        Ok(mean)
    }
}

/// Named base priors for delta-grid studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorKind {
    /// Symmetric Dirichlet with pseudo-counts 1/d.
    Equal,
    /// Pseudo-counts proportional to a letter composition (normalised to 1).
    Data(Vec<f64>),
    /// AT-rich, GC-rich and uniform components, equal weights.
    Mix3,
    /// Uniform plus, for each letter, one enriched (0.55) and one depleted
    /// (0.05) component; equal weights.
    Mix9,
}

impl PriorKind {
    pub fn name(&self) -> &'static str {
        match self {
            PriorKind::Equal => "equal",
            PriorKind::Data(_) => "data",
            PriorKind::Mix3 => "mix3",
            PriorKind::Mix9 => "mix9",
        }
    }

    pub fn mixture(&self, d: usize) -> Result<DirichletMixture> {
        let needs_dna = || {
            if d != 4 {
                Err(Error::InvalidPrior(format!("{} prior is defined for 4 letters", self.name())))
            } else {
                Ok(())
            }
        };
        match self {
            PriorKind::Equal => DirichletMixture::single(vec![1.0 / d as f64; d]),
            PriorKind::Data(freq) => {
                if freq.len() != d {
                    return Err(Error::DimensionMismatch("data composition length".into()));
                }
                let s: f64 = freq.iter().sum();
                DirichletMixture::single(freq.iter().map(|f| f / s).collect())
            }
            PriorKind::Mix3 => {
                needs_dna()?;
                DirichletMixture::new(
                    vec![1.0 / 3.0; 3],
                    vec![
                        vec![0.35, 0.15, 0.15, 0.35],
                        vec![0.15, 0.35, 0.35, 0.15],
                        vec![0.25; 4],
                    ],
                )
            }
            PriorKind::Mix9 => {
                needs_dna()?;
                let mut comps = vec![vec![0.25; 4]];
                for i in 0..4 {
                    let mut up = vec![0.15; 4];
                    up[i] = 0.55;
                    comps.push(up);
                }
                for i in 0..4 {
                    let mut down = vec![0.95 / 3.0; 4];
                    down[i] = 0.05;
                    comps.push(down);
                }
                DirichletMixture::new(vec![1.0 / 9.0; 9], comps)
            }
        }
    }
}

/// Posterior mean of the column frequencies under `(1−ε)π₀ + εq`, where π₀
/// may itself be a mixture and q is Dirichlet(δ) on every column.
pub fn contaminated_posterior_mean_mixture(
    counts: &[Vec<u64>],
    base: &DirichletMixture,
    delta: &[f64],
    epsilon: f64,
) -> Result<Vec<Vec<f64>>> {
    check_epsilon(epsilon)?;
    let q = DirichletMixture::single(delta.to_vec())?;
    if q.d() != base.d() {
        return Err(Error::DimensionMismatch("delta and base prior lengths differ".into()));
    }
    let lambda = lambda_weight(epsilon, base.log_marginal(counts)?, q.log_marginal(counts)?);
    let m0 = base.posterior_mean(counts)?;
    let mq = q.posterior_mean(counts)?;
    Ok(m0
        .iter()
        .zip(&mq)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect())
        .collect())
}

/// Contaminated posterior mean with a single Dirichlet(γ) base, in the
/// regime where both pseudo-count vectors sum to one.
pub fn contaminated_posterior_mean(
    counts: &[Vec<u64>],
    gamma: &[f64],
    delta: &[f64],
    epsilon: f64,
) -> Result<Vec<Vec<f64>>> {
    let gs: f64 = gamma.iter().sum();
    let ds: f64 = delta.iter().sum();
    if (gs - 1.0).abs() > SUM_TOL || (ds - 1.0).abs() > SUM_TOL {
        return Err(Error::PseudoCountSumNotOne { gamma: gs, delta: ds });
    }
    contaminated_posterior_mean_mixture(counts, &DirichletMixture::single(gamma.to_vec())?, delta, epsilon)
}

/// Contaminating pseudo-count vectors `δ = (δ*/2, (1−δ*)/2, (1−δ*)/2, δ*/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaGrid {
    pub delta_star: Vec<f64>,
}

impl DeltaGrid {
    pub fn new(delta_star: Vec<f64>) -> Result<Self> {
        if delta_star.is_empty() || delta_star.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidConfig("delta* values must be non-empty and lie in (0, 1)".into()));
        }
        Ok(Self { delta_star })
    }

    /// `points` evenly spaced values `1/(points+1), …, points/(points+1)`.
    pub fn evenly_spaced(points: usize) -> Result<Self> {
        let step = 1.0 / (points + 1) as f64;
        Self::new((1..=points).map(|i| i as f64 * step).collect())
    }

    pub fn delta(delta_star: f64) -> [f64; 4] {
        let at = delta_star / 2.0;
        let gc = (1.0 - delta_star) / 2.0;
        [at, gc, gc, at]
    }

    pub fn deltas(&self) -> Vec<[f64; 4]> {
        self.delta_star.iter().map(|&x| Self::delta(x)).collect()
    }
}

impl Default for DeltaGrid {
    /// 99 points `0.01, …, 0.99`.
    fn default() -> Self {
        Self::evenly_spaced(99).expect("static grid")
    }
}

/// Per-δ results of a grid study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub delta_star: f64,
    /// Largest posterior mean frequency in each column.
    pub theta_star: Vec<f64>,
    pub d_m: f64,
    pub d_k: f64,
    pub d_e: f64,
    /// Contaminated column log marginal (additive constants of the full
    /// logMAP are identical across the grid and omitted).
    pub log_map: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub prior: String,
    pub epsilon: f64,
    pub rows: Vec<DeltaRow>,
    /// Largest per-δ value of each distance measure.
    pub d_m: f64,
    pub d_k: f64,
    pub d_e: f64,
    pub log_map_min: f64,
    pub log_map_max: f64,
}

impl SensitivityReport {
    pub fn log_map_range(&self) -> f64 {
        self.log_map_max - self.log_map_min
    }
}

/// Runs the contaminated analysis over every δ in the grid.
pub fn delta_grid_profile(
    counts: &[Vec<u64>],
    base: &DirichletMixture,
    grid: &DeltaGrid,
    epsilon: f64,
) -> Result<SensitivityReport> {
    delta_grid_profile_named(counts, base, grid, epsilon, "custom")
}

pub fn delta_grid_profile_named(
    counts: &[Vec<u64>],
    base: &DirichletMixture,
    grid: &DeltaGrid,
    epsilon: f64,
    prior_name: &str,
) -> Result<SensitivityReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if base.d() != 4 {
        return Err(Error::InvalidPrior("delta grids are defined for 4 letters".into()));
    }
    let log_m0 = base.log_marginal(counts)?;
    let cells = grid
        .delta_star
        .par_iter()
        .map(|&ds| {
            let delta = DeltaGrid::delta(ds);
            let mean = contaminated_posterior_mean_mixture(counts, base, &delta, epsilon)?;
            let theta_star: Vec<f64> =
                mean.iter().map(|r| r.iter().copied().fold(f64::MIN, f64::max)).collect();
            let log_q = DirichletMixture::single(delta.to_vec())?.log_marginal(counts)?;
            Ok((ds, theta_star, contaminated_log(epsilon, log_m0, log_q)))
        })
        .collect::<Result<Vec<_>>>()?;

    let w = counts.len();
    let mut bar = vec![0.0; w];
    for (_, ts, _) in &cells {
        for (b, t) in bar.iter_mut().zip(ts) {
            *b += t / cells.len() as f64;
        }
    }
    let rows: Vec<DeltaRow> = cells
        .into_iter()
        .map(|(delta_star, theta_star, log_map)| {
            let d_m = theta_star.iter().zip(&bar).map(|(t, b)| (t - b).powi(2)).sum::<f64>() / w as f64;
            let d_k = theta_star.iter().zip(&bar).map(|(t, b)| t * (t / b).ln()).sum();
            let d_e = -theta_star.iter().map(|&t| xlogx(t)).sum::<f64>();
            DeltaRow { delta_star, theta_star, d_m, d_k, d_e, log_map }
        })
        .collect();
    let fold = |f: fn(&DeltaRow) -> f64, init: f64, pick: fn(f64, f64) -> f64| {
        rows.iter().map(f).fold(init, pick)
    };
    Ok(SensitivityReport {
        prior: prior_name.into(),
        epsilon,
        d_m: fold(|r| r.d_m, 0.0, f64::max),
        d_k: fold(|r| r.d_k, f64::NEG_INFINITY, f64::max),
        d_e: fold(|r| r.d_e, 0.0, f64::max),
        log_map_min: fold(|r| r.log_map, f64::INFINITY, f64::min),
        log_map_max: fold(|r| r.log_map, f64::NEG_INFINITY, f64::max),
        rows,
    })
}

/// Writes `delta_star,epsilon,d_m,d_k,d_e,log_map` rows for several reports.
pub fn write_report_csv<W: Write>(out: W, reports: &[SensitivityReport]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "delta_star,epsilon,d_m,d_k,d_e,log_map")?;
    for rep in reports {
        for r in &rep.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_sig(r.delta_star, 12),
                fmt_sig(rep.epsilon, 12),
                fmt_sig(r.d_m, 12),
                fmt_sig(r.d_k, 12),
                fmt_sig(r.d_e, 12),
                fmt_sig(r.log_map, 12)
            )?;
        }
    }
    out.flush()
}

/// Derivative of the posterior mean word frequency `μⱼ` with respect to `βᵢ`.
pub fn dmu_dbeta(counts: &[u64], beta0: &[f64], j: usize, i: usize) -> Result<f64> {
    if counts.len() != beta0.len() || j >= counts.len() || i >= counts.len() {
        return Err(Error::DimensionMismatch("word counts, beta0 and indices".into()));
    }
    let s: f64 = counts.iter().zip(beta0).map(|(&n, &b)| n as f64 + b).sum();
    if i == j {
        let rest: f64 = (0..counts.len()).filter(|&k| k != i).map(|k| counts[k] as f64 + beta0[k]).sum();
        Ok(rest / (s * s))
    } else {
        Ok(-(counts[j] as f64 + beta0[j]) / (s * s))
    }
}

/// Stirling-expanded derivative of logMAP with respect to γⱼ for a
/// single-motif column count matrix (one row per column).
pub fn dlogmap_dgamma(counts: &[Vec<u64>], gamma: &[f64], j: usize) -> Result<f64> {
    log_dirichlet_norm(gamma)?;
    if j >= gamma.len() || counts.iter().any(|c| c.len() != gamma.len()) {
        return Err(Error::DimensionMismatch("column counts vs gamma".into()));
    }
    let g: f64 = gamma.iter().sum();
    let mut total = 0.0;
    for col in counts {
        let a = col[j] as f64 + gamma[j];
        let s: f64 = col.iter().sum::<u64>() as f64 + g;
        total += (a / s).ln() - 0.5 * (1.0 / a - 1.0 / s);
    }
    let w = counts.len() as f64;
    Ok(total + w * ((g / gamma[j]).ln() - 0.5 * (1.0 / g - 1.0 / gamma[j])))
}

/// Stirling-expanded derivative of logMAP with respect to a word pseudo-count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaDerivative {
    pub value: f64,
    /// `β_D > Σ_{j<D} β_j`: the regime where the letter terms can be unbounded.
    pub motif_prior_dominates: bool,
}

/// Derivative of logMAP with respect to `β_k` for a one-motif dictionary,
/// where the null model uses the letter pseudo-counts `β_1..β_{D−1}`.
/// `k < D−1` (0-based letters) uses the letter expansion, `k = D−1` the
/// motif expansion.
pub fn dlogmap_dbeta(counts: &CountSummary, beta0: &[f64], k: usize) -> Result<BetaDerivative> {
    if counts.n_motifs() != 1 {
        return Err(Error::MultiMotifUnsupported(counts.n_motifs()));
    }
    let d = counts.d();
    let big_d = d + 1;
    if beta0.len() != big_d || k >= big_d {
        return Err(Error::DimensionMismatch(format!("beta0 needs {big_d} entries")));
    }
    log_dirichlet_norm(beta0)?;
    let n1: Vec<f64> = counts.word_counts.iter().map(|&x| x as f64).collect();
    let n0: Vec<f64> = counts.total_letter_counts().iter().map(|&x| x as f64).collect();
    let b_all: f64 = beta0.iter().sum();
    let b_letters: f64 = beta0[..d].iter().sum();
    let s1: f64 = n1.iter().zip(beta0).map(|(n, b)| n + b).sum();
    let s0: f64 = n0.iter().zip(beta0).map(|(n, b)| n + b).sum();
    let beta_d = beta0[d];
    let value = if k < d {
        if n1[k] <= 0.0 || n0[k] <= 0.0 {
            return Err(Error::CountsTooSmall(0));
        }
        (n1[k] / n0[k]).ln()
            + 0.5 * (n1[k] - n0[k]) / ((n1[k] + beta0[k]) * (n0[k] + beta0[k]))
            + (s0 / s1).ln()
            + (b_all / b_letters).ln()
            + 0.5 * (n0.iter().sum::<f64>() - n1.iter().sum::<f64>() - beta_d) / (s1 * s0)
            + 0.5 * (1.0 / b_letters - 1.0 / b_all)
    } else {
        let a = n1[d] + beta_d;
        (a / s1).ln() - 0.5 * (s1 - a) / (a * s1)
            + (1.0 + b_letters / beta_d).ln()
            + 0.5 * (1.0 / beta_d - 1.0 / b_all)
    };
    Ok(BetaDerivative { value, motif_prior_dominates: beta_d > b_letters })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts3() -> Vec<Vec<u64>> {
        vec![vec![12, 1, 0, 2], vec![0, 9, 5, 1], vec![3, 3, 4, 5]]
    }

    #[test]
    fn lambda_limits_and_direct_evaluation() {
        assert_eq!(lambda_weight(0.0, -3.0, 5.0), 1.0);
        assert!((lambda_weight(0.3, -2.0, -2.0) - 0.7).abs() < 1e-15);
        let (e, a, b): (f64, f64, f64) = (0.2, -1.3, 0.4);
        let direct = (1.0 - e) * a.exp() / ((1.0 - e) * a.exp() + e * b.exp());
        assert!((lambda_weight(e, a, b) - direct).abs() < 1e-12);
        let l = lambda_weight(0.5, -800.0, -790.0);
        assert!(l > 0.0 && l < 1.0);
    }

    #[test]
    fn contaminated_log_endpoints_and_midpoint() {
        assert_eq!(contaminated_log(0.0, -4.0, 2.0), -4.0);
        assert_eq!(contaminated_log(1.0, -4.0, 2.0), 2.0);
        let mid = contaminated_log(0.5, -1.0, 2.0);
        assert!((mid - (0.5 * ((-1f64).exp() + 2f64.exp())).ln()).abs() < 1e-14);
    }

    #[test]
    fn posterior_mean_epsilon_zero_and_equal_components() {
        let c = counts3();
        let g = [0.25; 4];
        let m = contaminated_posterior_mean(&c, &g, &[0.1, 0.4, 0.4, 0.1], 0.0).unwrap();
        for (row, col) in m.iter().zip(&c) {
            let s = col.iter().sum::<u64>() as f64 + 1.0;
            for (x, &n) in row.iter().zip(col) {
                assert!((x - (n as f64 + 0.25) / s).abs() < 1e-15);
            }
        }
        let same = contaminated_posterior_mean(&c, &g, &g, 0.6).unwrap();
        assert!(same.iter().flatten().zip(m.iter().flatten()).all(|(a, b)| (a - b).abs() < 1e-15));
        let one = contaminated_posterior_mean(&c, &g, &[0.1, 0.4, 0.4, 0.1], 1.0).unwrap();
        let q = DirichletMixture::single(vec![0.1, 0.4, 0.4, 0.1]).unwrap().posterior_mean(&c).unwrap();
        assert_eq!(one, q);
        for row in &one {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            contaminated_posterior_mean(&c, &[0.5; 4], &g, 0.5),
            Err(Error::PseudoCountSumNotOne { .. })
        ));
    }

    #[test]
    fn mixture_marginal_is_weighted_sum() {
        let c = counts3();
        let mix = PriorKind::Mix3.mixture(4).unwrap();
        let direct: f64 = mix
            .weights
            .iter()
            .zip(&mix.components)
            .map(|(w, g)| w * DirichletMixture::single(g.clone()).unwrap().log_marginal(&c).unwrap().exp())
            .sum();
        assert!((mix.log_marginal(&c).unwrap() - direct.ln()).abs() < 1e-12);
        let nine = PriorKind::Mix9.mixture(4).unwrap();
        assert_eq!(nine.components.len(), 9);
        assert!(nine.components.iter().all(|g| (g.iter().sum::<f64>() - 1.0).abs() < 1e-12));
        assert!(PriorKind::Mix3.mixture(2).is_err());
    }

    #[test]
    fn delta_grid_parameterisation() {
        let g = DeltaGrid::default();
        assert_eq!(g.delta_star.len(), 99);
        assert!((g.delta_star[0] - 0.01).abs() < 1e-12 && (g.delta_star[98] - 0.99).abs() < 1e-12);
        for d in g.deltas() {
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert_eq!(d[0], d[3]);
        }
        assert!(DeltaGrid::new(vec![0.0]).is_err());
    }

    #[test]
    fn singleton_grid_has_zero_spread() {
        let base = PriorKind::Equal.mixture(4).unwrap();
        let rep = delta_grid_profile(&counts3(), &base, &DeltaGrid::new(vec![0.3]).unwrap(), 0.4).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert!(rep.d_m.abs() < 1e-30 && rep.d_k.abs() < 1e-15);
        assert!(rep.d_e >= 0.0);
        assert_eq!(rep.log_map_min, rep.log_map_max);
    }

    #[test]
    fn report_rows_are_in_grid_order() {
        let base = PriorKind::Mix3.mixture(4).unwrap();
        let grid = DeltaGrid::evenly_spaced(9).unwrap();
        let rep = delta_grid_profile(&counts3(), &base, &grid, 0.5).unwrap();
        let got: Vec<f64> = rep.rows.iter().map(|r| r.delta_star).collect();
        assert_eq!(got, grid.delta_star);
        assert!(rep.log_map_min <= rep.log_map_max && rep.d_m >= 0.0);
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &[rep]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("delta_star,epsilon,d_m,d_k,d_e,log_map\n0.1,0.5,"));
        assert_eq!(text.lines().count(), 10);
        assert!(delta_grid_profile(&counts3(), &base, &grid, 1.0).is_err());
    }

    #[test]
    fn dmu_closed_forms() {
        let n = [0u64; 5];
        let b = [1.0; 5];
        assert!((dmu_dbeta(&n, &b, 2, 2).unwrap() - 0.8 / 5.0).abs() < 1e-15);
        assert!((dmu_dbeta(&n, &b, 1, 2).unwrap() + 1.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn dgamma_blows_up_for_small_gamma() {
        let c = vec![vec![30u64, 25, 20, 25]; 6];
        let mut prev = 0.0;
        for &g0 in &[1e-2, 1e-4, 1e-6] {
            let rest = (1.0 - g0) / 3.0;
            let v = dlogmap_dgamma(&c, &[g0, rest, rest, rest], 0).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(prev > 1e5);
        assert!(matches!(dlogmap_dgamma(&c, &[0.0, 0.5, 0.25, 0.25], 0), Err(Error::NonPositivePseudoCount(_))));
    }

    #[test]
    fn dbeta_requires_one_motif() {
        let two = CountSummary {
            word_counts: vec![5, 5, 5, 5, 1, 1],
            column_counts: vec![vec![vec![1, 0, 0, 0]], vec![vec![0, 1, 0, 0]]],
            background: vec![5, 5, 5, 5],
        };
        assert!(matches!(dlogmap_dbeta(&two, &[1.0; 6], 0), Err(Error::MultiMotifUnsupported(2))));
    }
}
