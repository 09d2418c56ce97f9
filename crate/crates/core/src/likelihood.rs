//! Exact sequence likelihood under a stochastic dictionary and posterior
//! sampling of alignments.
//!
//! The forward recursion sums over every segmentation of the sequence into
//! dictionary words:
//!
//! `L(i) = logsumexp_words [ L(i - w) + log rho(word) + log P(x[i-w..i] | word) ]`
//!
//! where a letter word has width 1 and emission probability 1 for its own
//! letter, and a motif word of width `w` emits a segment with the product of
//! its column probabilities. Words never straddle a record boundary.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Alignment, CountSummary, Dictionary, Sequence, Site};
use crate::numeric::logsumexp;

/// Log partial likelihoods `L(0..=n)`, with `L(0) = 0`.
#[derive(Debug, Clone)]
pub struct ForwardTable {
    partial: Vec<f64>,
}

struct WordScorer<'a> {
    seq: &'a Sequence,
    log_rho: Vec<f64>,
    // log_theta[k][j * d + letter]
    log_theta: Vec<Vec<f64>>,
    widths: Vec<usize>,
    d: usize,
}

impl<'a> WordScorer<'a> {
    fn new(seq: &'a Sequence, dict: &Dictionary) -> Result<Self> {
        if dict.size() == 0 {
            return Err(Error::EmptyDictionary);
        }
        if seq.alphabet_size() != dict.d() {
            return Err(Error::DimensionMismatch(format!(
                "sequence alphabet has {} letters, dictionary has {}",
                seq.alphabet_size(),
                dict.d()
            )));
        }
        let log_theta = dict
            .motifs
            .iter()
            .map(|m| m.columns().iter().flatten().map(|p| p.ln()).collect())
            .collect();
        Ok(Self {
            seq,
            log_rho: dict.rho.iter().map(|p| p.ln()).collect(),
            log_theta,
            widths: dict.widths(),
            d: dict.d(),
        })
    }

    /// Log weight of motif `k` occupying `[start, start + w)`, or `None` when
    /// the site does not fit.
    fn motif_term(&self, k: usize, start: usize) -> Option<f64> {
        let w = self.widths[k];
        if !self.seq.fits(start, w) || self.log_rho[self.d + k] == f64::NEG_INFINITY {
            return None;
        }
        let data = &self.seq.data()[start..start + w];
        let lt = &self.log_theta[k];
        let emit: f64 = data
            .iter()
            .enumerate()
            .map(|(j, &x)| lt[j * self.d + x as usize])
            .sum();
        Some(self.log_rho[self.d + k] + emit)
    }

    fn letter_term(&self, pos: usize) -> f64 {
        self.log_rho[self.seq.data()[pos] as usize]
    }
}

impl ForwardTable {
    pub fn build(seq: &Sequence, dict: &Dictionary) -> Result<Self> {
        let scorer = WordScorer::new(seq, dict)?;
        let n = seq.len();
        let mut partial = vec![f64::NEG_INFINITY; n + 1];
        partial[0] = 0.0;
        let mut terms = Vec::with_capacity(1 + dict.motifs.len());
        for i in 1..=n {
            terms.clear();
            terms.push(partial[i - 1] + scorer.letter_term(i - 1));
            for (k, &w) in scorer.widths.iter().enumerate() {
                if w <= i {
                    if let Some(t) = scorer.motif_term(k, i - w) {
                        terms.push(partial[i - w] + t);
                    }
                }
            }
            partial[i] = logsumexp(&terms);
        }
        if !partial[n].is_finite() {
            return Err(Error::ZeroLikelihood);
        }
        Ok(Self { partial })
    }

    pub fn partial(&self) -> &[f64] {
        &self.partial
    }

    pub fn loglik(&self) -> f64 {
        *self.partial.last().expect("table has n + 1 entries")
    }

    /// Draws an alignment from `P(A | S, Theta, rho)` by sampling the last
    /// word ending at each cut point, right to left.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        seq: &Sequence,
        dict: &Dictionary,
        rng: &mut R,
    ) -> Result<Alignment> {
        let scorer = WordScorer::new(seq, dict)?;
        let mut sites = Vec::new();
        let mut i = seq.len();
        let mut weights: Vec<(Option<usize>, f64)> = Vec::with_capacity(1 + dict.motifs.len());
        while i > 0 {
            weights.clear();
            let total = self.partial[i];
            weights.push((None, (self.partial[i - 1] + scorer.letter_term(i - 1) - total).exp()));
            for (k, &w) in scorer.widths.iter().enumerate() {
                if w <= i {
                    if let Some(t) = scorer.motif_term(k, i - w) {
                        weights.push((Some(k), (self.partial[i - w] + t - total).exp()));
                    }
                }
            }
            let sum: f64 = weights.iter().map(|x| x.1).sum();
            let mut u = rng.random::<f64>() * sum;
            let mut chosen = weights[weights.len() - 1].0;
            for &(word, p) in &weights {
                if u < p {
                    chosen = word;
                    break;
                }
                u -= p;
            }
            match chosen {
                None => i -= 1,
                Some(k) => {
                    i -= scorer.widths[k];
                    sites.push(Site { start: i, motif: k });
                }
            }
        }
        Ok(Alignment::new(sites))
    }
}

/// `log P(S | rho, Theta)` summed over all partitions of `seq`.
pub fn sequence_loglik(seq: &Sequence, dict: &Dictionary) -> Result<f64> {
    Ok(ForwardTable::build(seq, dict)?.loglik())
}

/// One posterior draw of the alignment, reproducible from `seed`.
pub fn sample_alignment(seq: &Sequence, dict: &Dictionary, seed: u64) -> Result<Alignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_alignment_with(seq, dict, &mut rng)
}

pub fn sample_alignment_with<R: Rng + ?Sized>(
    seq: &Sequence,
    dict: &Dictionary,
    rng: &mut R,
) -> Result<Alignment> {
    ForwardTable::build(seq, dict)?.sample(seq, dict, rng)
}

/// Complete-data log likelihood `sum N_l log rho_l + sum c_ijk log theta_ijk`
/// with `0 log 0 = 0`.
pub fn complete_data_loglik(counts: &CountSummary, dict: &Dictionary) -> Result<f64> {
    if counts.word_counts.len() != dict.size() || counts.widths() != dict.widths() {
        return Err(Error::DimensionMismatch(
            "count summary does not match the dictionary".into(),
        ));
    }
    fn term(n: u64, p: f64) -> f64 {
        if n == 0 {
            0.0
        } else {
            n as f64 * p.ln()
        }
    }
    let mut total: f64 = counts
        .word_counts
        .iter()
        .zip(&dict.rho)
        .map(|(&n, &p)| term(n, p))
        .sum();
    for (cols, pwm) in counts.column_counts.iter().zip(&dict.motifs) {
        for (c, theta) in cols.iter().zip(pwm.columns()) {
            if c.len() != theta.len() {
                return Err(Error::DimensionMismatch("column length".into()));
            }
            total += c.iter().zip(theta).map(|(&n, &p)| term(n, p)).sum::<f64>();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_counts, Alphabet, Pwm};

    fn two_letter_dict(rho: Vec<f64>, motifs: Vec<Pwm>) -> Dictionary {
        Dictionary::new(Alphabet::new("AB").unwrap(), motifs, rho).unwrap()
    }

    /// Sum over all partitions by brute-force recursion.
    fn enumerate_loglik(seq: &Sequence, dict: &Dictionary) -> f64 {
        fn rec(seq: &Sequence, dict: &Dictionary, i: usize) -> f64 {
            if i == seq.len() {
                return 1.0;
            }
            let data = seq.data();
            let mut total = dict.rho[data[i] as usize] * rec(seq, dict, i + 1);
            for (k, m) in dict.motifs.iter().enumerate() {
                let w = m.width();
                if seq.fits(i, w) {
                    let mut p = dict.rho[dict.d() + k];
                    for j in 0..w {
                        p *= m.columns()[j][data[i + j] as usize];
                    }
                    total += p * rec(seq, dict, i + w);
                }
            }
            total
        }
        rec(seq, dict, 0).ln()
    }

    #[test]
    fn letters_only_is_sum_of_letter_logs() {
        let alpha = Alphabet::dna();
        let seq = Sequence::parse(&alpha, "ACGTTGCA").unwrap();
        let rho = vec![0.1, 0.2, 0.3, 0.4];
        let dict = Dictionary::letters_only(alpha, rho.clone()).unwrap();
        let expect: f64 = seq.data().iter().map(|&x| rho[x as usize].ln()).sum();
        assert!((sequence_loglik(&seq, &dict).unwrap() - expect).abs() < 1e-12);
        for seed in 0..5 {
            assert!(sample_alignment(&seq, &dict, seed).unwrap().is_empty());
        }
    }

    #[test]
    fn deterministic_motif_on_aa() {
        let pwm = Pwm::indicator(&[0, 0], 2).unwrap();
        let rho = vec![0.5, 0.3, 0.2];
        let dict = two_letter_dict(rho, vec![pwm]);
        let seq = Sequence::from_indices(vec![0, 0], 2).unwrap();
        let expect = (0.5f64 * 0.5 + 0.2).ln();
        assert!((sequence_loglik(&seq, &dict).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_motif_matches_letters_only() {
        let alpha = Alphabet::dna();
        let seq = Sequence::parse(&alpha, "ACGTACGTAAC").unwrap();
        let with = Dictionary::new(
            alpha.clone(),
            vec![Pwm::uniform(3, 4)],
            vec![0.1, 0.2, 0.3, 0.4, 0.0],
        )
        .unwrap();
        let without = Dictionary::letters_only(alpha, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(
            (sequence_loglik(&seq, &with).unwrap() - sequence_loglik(&seq, &without).unwrap())
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn zero_probability_letter_gives_zero_likelihood() {
        let alpha = Alphabet::dna();
        let seq = Sequence::parse(&alpha, "AT").unwrap();
        let dict = Dictionary::letters_only(alpha, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(sequence_loglik(&seq, &dict), Err(Error::ZeroLikelihood));
    }

    #[test]
    fn matches_partition_enumeration() {
        let m1 = Pwm::new(vec![vec![0.7, 0.3], vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap();
        let m2 = Pwm::new(vec![vec![0.1, 0.9], vec![0.5, 0.5]]).unwrap();
        let dict = two_letter_dict(vec![0.35, 0.4, 0.15, 0.1], vec![m1, m2]);
        let mut state = 12345u64;
        for n in 0..=14 {
            for _ in 0..4 {
                let data: Vec<u8> = (0..n)
                    .map(|_| {
                        state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                        (state >> 33) as u8 & 1
                    })
                    .collect();
                let seq = Sequence::from_indices(data, 2).unwrap();
                let dp = sequence_loglik(&seq, &dict).unwrap();
                assert!((dp - enumerate_loglik(&seq, &dict)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn record_boundaries_split_the_likelihood() {
        let m = Pwm::new(vec![vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap();
        let dict = two_letter_dict(vec![0.4, 0.4, 0.2], vec![m]);
        let joined = Sequence::from_records_indices(vec![vec![0, 1, 1], vec![0, 1]], 2).unwrap();
        let a = Sequence::from_indices(vec![0, 1, 1], 2).unwrap();
        let b = Sequence::from_indices(vec![0, 1], 2).unwrap();
        let sum = sequence_loglik(&a, &dict).unwrap() + sequence_loglik(&b, &dict).unwrap();
        assert!((sequence_loglik(&joined, &dict).unwrap() - sum).abs() < 1e-12);
        for seed in 0..50 {
            let al = sample_alignment(&joined, &dict, seed).unwrap();
            al.validate(&joined, &[2]).unwrap();
        }
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let m = Pwm::new(vec![vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap();
        let dict = two_letter_dict(vec![0.3, 0.3, 0.4], vec![m]);
        let seq = Sequence::from_indices(vec![0, 1, 0, 1, 1, 0, 1, 0, 0, 1], 2).unwrap();
        let a = sample_alignment(&seq, &dict, 7).unwrap();
        assert_eq!(a, sample_alignment(&seq, &dict, 7).unwrap());
        a.validate(&seq, &[2]).unwrap();
    }

    #[test]
    fn site_frequency_matches_exact_posterior() {
        let m = Pwm::new(vec![vec![0.6, 0.4], vec![0.3, 0.7]]).unwrap();
        let rho = vec![0.45, 0.35, 0.2];
        let dict = two_letter_dict(rho.clone(), vec![m]);
        let seq = Sequence::from_indices(vec![0, 1], 2).unwrap();
        let site = rho[2] * 0.6 * 0.7;
        let p = site / (site + rho[0] * rho[1]);
        let draws = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let table = ForwardTable::build(&seq, &dict).unwrap();
        let hits = (0..draws)
            .filter(|_| !table.sample(&seq, &dict, &mut rng).unwrap().is_empty())
            .count();
        let freq = hits as f64 / draws as f64;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((freq - p).abs() < 3.0 * se, "freq {freq} vs exact {p}");
    }

    #[test]
    fn complete_data_loglik_closed_forms() {
        let alpha = Alphabet::dna();
        let dict = Dictionary::letters_only(alpha.clone(), vec![0.5, 0.2, 0.2, 0.1]).unwrap();
        let zero = CountSummary {
            word_counts: vec![0; 4],
            column_counts: vec![],
            background: vec![0; 4],
        };
        assert_eq!(complete_data_loglik(&zero, &dict).unwrap(), 0.0);
        let three_a = CountSummary {
            word_counts: vec![3, 0, 0, 0],
            column_counts: vec![],
            background: vec![3, 0, 0, 0],
        };
        assert!((complete_data_loglik(&three_a, &dict).unwrap() - 3.0 * 0.5f64.ln()).abs() < 1e-14);
        let two = Dictionary::new(alpha, vec![Pwm::uniform(2, 4)], vec![0.2; 5]).unwrap();
        assert!(complete_data_loglik(&three_a, &two).is_err());
    }

    #[test]
    fn complete_data_loglik_term_by_term() {
        let alpha = Alphabet::dna();
        let pwm = Pwm::new(vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.25, 0.25, 0.4, 0.1]]).unwrap();
        let dict = Dictionary::new(alpha.clone(), vec![pwm.clone()], vec![0.3, 0.2, 0.2, 0.2, 0.1]).unwrap();
        let seq = Sequence::parse(&alpha, "ACGTTGACGGTACA").unwrap();
        let align = Alignment::new(vec![Site { start: 2, motif: 0 }, Site { start: 7, motif: 0 }]);
        let counts = derive_counts(&seq, &dict, &align).unwrap();
        // Walk the partition word by word.
        let mut expect = 0.0;
        let mut i = 0;
        let data = seq.data();
        while i < seq.len() {
            if align.sites().iter().any(|s| s.start == i) {
                expect += dict.rho[4].ln();
                for j in 0..2 {
                    expect += pwm.columns()[j][data[i + j] as usize].ln();
                }
                i += 2;
            } else {
                expect += dict.rho[data[i] as usize].ln();
                i += 1;
            }
        }
        assert!((complete_data_loglik(&counts, &dict).unwrap() - expect).abs() < 1e-12);
    }
}
