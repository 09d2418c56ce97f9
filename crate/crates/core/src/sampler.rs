//! Data-augmentation sampling of alignments and parameters, and progressive
//! dictionary growth judged by the change in logMAP.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::ForwardTable;
use crate::model::{derive_counts, Alignment, Alphabet, CountSummary, Dictionary, PriorSpec, Pwm, Sequence, Site};
use crate::numeric::fmt_sig;
use crate::score::log_map_value;

/// Longest l-mer used to seed a new motif.
pub const SEED_LMER: usize = 8;
/// Site offsets tried when refining a new motif's phase.
pub const PHASE_SHIFT: isize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaConfig {
    /// Candidate widths for a newly added motif.
    pub widths: Vec<usize>,
    /// Total iterations per chain, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    pub chains: usize,
    pub seed: u64,
    pub priors: PriorSpec,
}

impl DaConfig {
    /// Engineering defaults: 5000 iterations, 1000 burn-in, 5 chains.
    pub fn new(widths: Vec<usize>, d: usize, seed: u64) -> Self {
        Self {
            widths,
            iterations: 5000,
            burn_in: 1000,
            chains: 5,
            seed,
            priors: PriorSpec::default_for(d, 0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(Error::TooFewIterations);
        }
        if self.chains == 0 {
            return Err(Error::InvalidConfig("at least one chain is required".into()));
        }
        if self.widths.contains(&0) {
            return Err(Error::InvalidConfig("motif widths must be positive".into()));
        }
        self.priors.validate()
    }
}

/// Output of [`run_da`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaTrace {
    /// Post-burn-in logMAP of each sampled alignment, one vector per chain.
    pub chains: Vec<Vec<f64>>,
    pub best_alignment: Alignment,
    pub best_log_map: f64,
    pub best_chain: usize,
    /// Best alignment with at least one site, if any was sampled.
    pub best_nonempty: Option<(Alignment, f64)>,
}

impl DaTrace {
    pub fn write_csv<W: Write>(&self, out: W, chain: usize) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(out);
        writeln!(out, "iteration,log_map")?;
        for (i, v) in self.chains[chain].iter().enumerate() {
            writeln!(out, "{},{}", i, fmt_sig(*v, 12))?;
        }
        out.flush()
    }
}

/// Draws a probability vector from Dirichlet(`params`) via gamma variates.
pub fn sample_dirichlet<R: Rng + ?Sized>(params: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let mut draws = params
        .iter()
        .map(|&a| {
            let g = Gamma::new(a, 1.0).map_err(|_| Error::NonPositivePseudoCount(a))?;
            Ok(g.sample(rng).max(f64::MIN_POSITIVE))
        })
        .collect::<Result<Vec<f64>>>()?;
    let s: f64 = draws.iter().sum();
    draws.iter_mut().for_each(|x| *x /= s);
    Ok(draws)
}

/// Draws `(ρ, Θ)` from their conditional posteriors given the counts.
pub fn sample_parameters<R: Rng + ?Sized>(
    counts: &CountSummary,
    dict: &Dictionary,
    priors: &PriorSpec,
    rng: &mut R,
) -> Result<Dictionary> {
    let rho_post: Vec<f64> =
        counts.word_counts.iter().zip(&priors.beta0).map(|(&n, &b)| n as f64 + b).collect();
    let rho = sample_dirichlet(&rho_post, rng)?;
    let motifs = counts
        .column_counts
        .iter()
        .map(|cols| {
            let columns = cols
                .iter()
                .map(|c| {
                    let post: Vec<f64> =
                        c.iter().zip(&priors.gamma).map(|(&n, &g)| n as f64 + g).collect();
                    sample_dirichlet(&post, rng)
                })
                .collect::<Result<Vec<_>>>()?;
            Pwm::new(columns)
        })
        .collect::<Result<Vec<_>>>()?;
    Dictionary::new(dict.alphabet.clone(), motifs, rho)
}

/// Posterior-mean dictionary for an alignment.
pub fn posterior_mean_dictionary(counts: &CountSummary, dict: &Dictionary, priors: &PriorSpec) -> Result<Dictionary> {
    let total: f64 = counts.word_counts.iter().zip(&priors.beta0).map(|(&n, &b)| n as f64 + b).sum();
    let rho = counts.word_counts.iter().zip(&priors.beta0).map(|(&n, &b)| (n as f64 + b) / total).collect();
    let motifs = counts
        .column_counts
        .iter()
        .map(|cols| Pwm::posterior_mean(cols, &priors.gamma))
        .collect::<Result<Vec<_>>>()?;
    Dictionary::new(dict.alphabet.clone(), motifs, rho)
}

fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

struct ChainResult {
    trace: Vec<f64>,
    best: (Alignment, f64),
    best_nonempty: Option<(Alignment, f64)>,
}

fn run_chain(seq: &Sequence, init: &Dictionary, cfg: &DaConfig, priors: &PriorSpec, chain: usize) -> Result<ChainResult> {
    let mut rng = chain_rng(cfg.seed, chain);
    let mut dict = init.clone();
    let mut trace = Vec::with_capacity(cfg.iterations - cfg.burn_in);
    let mut best: Option<(Alignment, f64)> = None;
    let mut best_nonempty: Option<(Alignment, f64)> = None;
    for it in 0..cfg.iterations {
        let table = ForwardTable::build(seq, &dict)?;
        let align = table.sample(seq, &dict, &mut rng)?;
        let counts = derive_counts(seq, &dict, &align)?;
        let score = log_map_value(&counts, priors)?;
        if it >= cfg.burn_in {
            trace.push(score);
            if best.as_ref().is_none_or(|b| score > b.1) {
                best = Some((align.clone(), score));
            }
            if !align.is_empty() && best_nonempty.as_ref().is_none_or(|b| score > b.1) {
                best_nonempty = Some((align, score));
            }
        }
        dict = sample_parameters(&counts, &dict, priors, &mut rng)?;
    }
    Ok(ChainResult { trace, best: best.expect("at least one recorded iteration"), best_nonempty })
}

/// Runs `cfg.chains` independent data-augmentation chains from `init_dict`
/// and keeps the highest-scoring alignment (ties to the lowest chain).
pub fn run_da(seq: &Sequence, init_dict: &Dictionary, cfg: &DaConfig) -> Result<DaTrace> {
    cfg.validate()?;
    init_dict.validate()?;
    let priors = cfg.priors.with_motif_count(init_dict.motifs.len());
    priors.validate()?;
    if priors.d() != init_dict.d() {
        return Err(Error::DimensionMismatch("prior and dictionary alphabets differ".into()));
    }
    let results = (0..cfg.chains)
        .into_par_iter()
        .map(|c| run_chain(seq, init_dict, cfg, &priors, c))
        .collect::<Result<Vec<_>>>()?;

    let mut best_chain = 0;
    for (i, r) in results.iter().enumerate() {
        if r.best.1 > results[best_chain].best.1 {
            best_chain = i;
        }
    }
    let mut best_nonempty: Option<(Alignment, f64)> = None;
    for r in &results {
        if let Some(b) = &r.best_nonempty {
            if best_nonempty.as_ref().is_none_or(|cur| b.1 > cur.1) {
                best_nonempty = Some(b.clone());
            }
        }
    }
    let (best_alignment, best_log_map) = results[best_chain].best.clone();
    Ok(DaTrace {
        chains: results.into_iter().map(|r| r.trace).collect(),
        best_alignment,
        best_log_map,
        best_chain,
        best_nonempty,
    })
}

fn mask_of(seq: &Sequence, align: &Alignment, widths: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; seq.len()];
    for s in align.sites() {
        mask[s.start..s.start + widths[s.motif]].iter_mut().for_each(|m| *m = true);
    }
    mask
}

/// Seeds a width-`w` motif from the most frequent l-mer (`l = min(w, 8)`) in
/// the unmasked part of the sequence. Returns the PWM built from the windows
/// starting at its non-overlapping occurrences, or `None` if no window fits.
pub fn seed_motif(seq: &Sequence, w: usize, mask: &[bool], gamma: &[f64]) -> Result<Option<Pwm>> {
    let l = w.min(SEED_LMER);
    let data = seq.data();
    let free = |start: usize, len: usize| seq.fits(start, len) && !mask[start..start + len].iter().any(|&m| m);
    let mut tally: HashMap<&[u8], (usize, usize)> = HashMap::new();
    for start in 0..seq.len().saturating_sub(l - 1) {
        if free(start, l) {
            let e = tally.entry(&data[start..start + l]).or_insert((0, start));
            e.0 += 1;
        }
    }
    // Most occurrences, then earliest first occurrence.
    let Some((lmer, _)) = tally.into_iter().max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1))) else {
        return Ok(None);
    };
    let d = seq.alphabet_size();
    let mut counts = vec![vec![0u64; d]; w];
    let mut next_free = 0;
    let mut windows = 0;
    for start in 0..seq.len().saturating_sub(w - 1) {
        if start >= next_free && &data[start..start + l] == lmer && free(start, w) {
            for (j, col) in counts.iter_mut().enumerate() {
                col[data[start + j] as usize] += 1;
            }
            next_free = start + w;
            windows += 1;
        }
    }
    if windows == 0 {
        return Ok(None);
    }
    Pwm::posterior_mean(&counts, gamma).map(Some)
}

/// Shifts every site of motif `k` by `offset`, dropping shifted sites that
/// leave their record or collide with another site.
pub fn shift_motif_sites(seq: &Sequence, align: &Alignment, widths: &[usize], k: usize, offset: isize) -> Alignment {
    let mut kept: Vec<Site> = align.sites().iter().filter(|s| s.motif != k).copied().collect();
    let mut mask = mask_of(seq, &Alignment::new(kept.clone()), widths);
    let w = widths[k];
    for s in align.sites_of(k) {
        let start = s.start as isize + offset;
        if start < 0 {
            continue;
        }
        let start = start as usize;
        if seq.fits(start, w) && !mask[start..start + w].iter().any(|&m| m) {
            mask[start..start + w].iter_mut().for_each(|m| *m = true);
            kept.push(Site { start, motif: k });
        }
    }
    Alignment::new(kept)
}

/// Tries phase shifts of motif `k` and returns the best-scoring alignment.
pub fn refine_phase(
    seq: &Sequence,
    dict: &Dictionary,
    align: &Alignment,
    k: usize,
    priors: &PriorSpec,
) -> Result<(Alignment, f64)> {
    let widths = dict.widths();
    let mut best = (align.clone(), log_map_value(&derive_counts(seq, dict, align)?, priors)?);
    for offset in -PHASE_SHIFT..=PHASE_SHIFT {
        if offset == 0 {
            continue;
        }
        let shifted = shift_motif_sites(seq, align, &widths, k, offset);
        let score = log_map_value(&derive_counts(seq, dict, &shifted)?, priors)?;
        if score > best.1 {
            best = (shifted, score);
        }
    }
    Ok(best)
}

/// One accepted motif of a progressive run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedMotif {
    pub width: usize,
    pub delta_log_map: f64,
    /// Cumulative logMAP after accepting this motif.
    pub log_map: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discovery {
    pub dictionary: Dictionary,
    pub alignment: Alignment,
    pub accepted: Vec<AcceptedMotif>,
    /// The candidate that stopped the search, as (width, ΔlogMAP, logMAP).
    pub rejected: Option<(usize, f64, f64)>,
}

impl Discovery {
    pub fn deltas(&self) -> Vec<f64> {
        self.accepted.iter().map(|a| a.delta_log_map).collect()
    }
}

struct Candidate {
    width: usize,
    dict: Dictionary,
    alignment: Alignment,
    log_map: f64,
}

fn best_candidate(
    seq: &Sequence,
    current: &Dictionary,
    current_align: &Alignment,
    cfg: &DaConfig,
) -> Result<Option<Candidate>> {
    let k = current.motifs.len();
    let priors = cfg.priors.with_motif_count(k + 1);
    let mask = mask_of(seq, current_align, &current.widths());
    let mut best: Option<Candidate> = None;
    for (wi, &w) in cfg.widths.iter().enumerate() {
        let Some(pwm) = seed_motif(seq, w, &mask, &priors.gamma)? else { continue };
        let mut motifs = current.motifs.clone();
        motifs.push(pwm);
        // Start the new word at a small usage, taken from the other words.
        let new_rho = (1.0 / seq.len() as f64).min(0.5 / w as f64);
        let mut rho: Vec<f64> = current.rho.iter().map(|r| r * (1.0 - new_rho)).collect();
        rho.push(new_rho);
        let init = Dictionary::new(current.alphabet.clone(), motifs, rho)?;
        let run_cfg = DaConfig { seed: cfg.seed.wrapping_add((k * cfg.widths.len() + wi) as u64 * 1_000_003), ..cfg.clone() };
        let trace = run_da(seq, &init, &run_cfg)?;
        let (alignment, log_map) = refine_phase(seq, &init, &trace.best_alignment, k, &priors)?;
        if best.as_ref().is_none_or(|b| log_map > b.log_map) {
            let counts = derive_counts(seq, &init, &alignment)?;
            let dict = posterior_mean_dictionary(&counts, &init, &priors)?;
            best = Some(Candidate { width: w, dict, alignment, log_map });
        }
    }
    Ok(best)
}

/// Adds motifs one at a time, keeping each iff it raises logMAP and the
/// score stays positive. Stops at the first rejection or at `max_motifs`.
pub fn progressive_discover(
    seq: &Sequence,
    alphabet: &Alphabet,
    cfg: &DaConfig,
    max_motifs: usize,
) -> Result<Discovery> {
    if max_motifs == 0 {
        return Err(Error::InvalidConfig("max_motifs must be at least 1".into()));
    }
    if cfg.widths.is_empty() {
        return Err(Error::InvalidConfig("at least one candidate width is required".into()));
    }
    cfg.validate()?;
    let d = seq.alphabet_size();
    if cfg.priors.d() != d || alphabet.size() != d {
        return Err(Error::DimensionMismatch("prior, alphabet and sequence sizes differ".into()));
    }
    let letters = seq.letter_counts();
    let n = seq.len().max(1) as f64;
    let rho = letters.iter().map(|&c| (c as f64 + 1.0) / (n + d as f64)).collect();
    let mut dict = Dictionary::letters_only(alphabet.clone(), rho)?;
    let mut align = Alignment::empty();
    let mut current = log_map_value(&derive_counts(seq, &dict, &align)?, &cfg.priors.with_motif_count(0))?;
    let mut accepted = Vec::new();
    let mut rejected = None;
    while accepted.len() < max_motifs {
        let Some(cand) = best_candidate(seq, &dict, &align, cfg)? else { break };
        let delta = cand.log_map - current;
        if delta > 0.0 && cand.log_map > 0.0 {
            accepted.push(AcceptedMotif { width: cand.width, delta_log_map: delta, log_map: cand.log_map });
            current = cand.log_map;
            dict = cand.dict;
            align = cand.alignment;
        } else {
            rejected = Some((cand.width, delta, cand.log_map));
            break;
        }
    }
    Ok(Discovery { dictionary: dict, alignment: align, accepted, rejected })
}
