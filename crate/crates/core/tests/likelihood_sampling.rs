use std::collections::HashMap;

use motifmap::likelihood::{complete_data_loglik, sample_alignment_with, sequence_loglik};
use motifmap::model::derive_counts_for_widths;
use motifmap::numeric::logsumexp;
use motifmap::score::enumerate_alignments;
use motifmap::{derive_counts, Alignment, Alphabet, Dictionary, Pwm, Sequence, Site};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const DRAWS: usize = 100_000;
const MIN_P_VALUE: f64 = 1e-3;

fn small_dict() -> Dictionary {
    let m = Pwm::new(vec![vec![0.8, 0.2], vec![0.1, 0.9]]).unwrap();
    let n = Pwm::new(vec![vec![0.3, 0.7], vec![0.6, 0.4], vec![0.9, 0.1]]).unwrap();
    Dictionary::new(Alphabet::new("AB").unwrap(), vec![m, n], vec![0.35, 0.3, 0.2, 0.15]).unwrap()
}

#[test]
fn posterior_draws_follow_the_enumerated_distribution() {
    let alpha = Alphabet::new("AB").unwrap();
    let seq = Sequence::parse_records(&alpha, &["ABBAABA", "BABB"]).unwrap();
    let dict = small_dict();
    let all = enumerate_alignments(&seq, &dict.widths(), 10_000).unwrap();
    let logw: Vec<f64> = all
        .iter()
        .map(|a| complete_data_loglik(&derive_counts(&seq, &dict, a).unwrap(), &dict).unwrap())
        .collect();
    let total = logsumexp(&logw);
    assert!((total - sequence_loglik(&seq, &dict).unwrap()).abs() < 1e-10);

    let index: HashMap<Vec<Site>, usize> =
        all.iter().enumerate().map(|(i, a)| (a.sites().to_vec(), i)).collect();
    let mut observed = vec![0u64; all.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..DRAWS {
        let a = sample_alignment_with(&seq, &dict, &mut rng).unwrap();
        observed[index[a.sites()]] += 1;
    }

    // Pool cells with small expectations into one bin.
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pooled_o, mut pooled_e) = (0.0, 0.0);
    for (o, lw) in observed.iter().zip(&logw) {
        let e = DRAWS as f64 * (lw - total).exp();
        if e < 5.0 {
            pooled_o += *o as f64;
            pooled_e += e;
        } else {
            stat += (*o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_e > 0.0 {
        stat += (pooled_o - pooled_e).powi(2) / pooled_e;
        cells += 1;
    }
    let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
    assert!(p > MIN_P_VALUE, "chi-square {stat:.1} on {} df, p = {p:.2e}", cells - 1);
}

fn random_case() -> impl Strategy<Value = (Vec<u8>, Vec<usize>, Vec<(usize, usize)>)> {
    (1usize..80, proptest::collection::vec(1usize..7, 1..4)).prop_flat_map(|(n, widths)| {
        let k = widths.len();
        (
            proptest::collection::vec(0u8..4, n),
            Just(widths),
            proptest::collection::vec((0..n, 0..k), 0..20),
        )
    })
}

/// Greedy left-to-right filter turning arbitrary proposals into a valid alignment.
fn valid_alignment(seq: &Sequence, widths: &[usize], proposals: &[(usize, usize)]) -> Alignment {
    let mut props = proposals.to_vec();
    props.sort();
    let mut end = 0;
    let mut sites = Vec::new();
    for (start, motif) in props {
        if start >= end && seq.fits(start, widths[motif]) {
            sites.push(Site { start, motif });
            end = start + widths[motif];
        }
    }
    Alignment::new(sites)
}

proptest! {
    #[test]
    fn counts_conserve_letters_and_sites((data, widths, props) in random_case()) {
        let seq = Sequence::from_indices(data.clone(), 4).unwrap();
        let align = valid_alignment(&seq, &widths, &props);
        let counts = derive_counts_for_widths(&seq, &widths, &align).unwrap();

        let covered: u64 = widths.iter().enumerate().map(|(k, &w)| w as u64 * counts.word_counts[4 + k]).sum();
        let letters: u64 = counts.word_counts[..4].iter().sum();
        prop_assert_eq!(letters + covered, data.len() as u64);
        prop_assert_eq!(&counts.word_counts[..4], counts.background.as_slice());
        for (k, cols) in counts.column_counts.iter().enumerate() {
            for col in cols {
                prop_assert_eq!(col.iter().sum::<u64>(), counts.word_counts[4 + k]);
            }
        }
        let total = counts.total_letter_counts();
        prop_assert_eq!(total, seq.letter_counts());
    }

    #[test]
    fn indicator_form_round_trips((data, widths, props) in random_case()) {
        let seq = Sequence::from_indices(data, 4).unwrap();
        let align = valid_alignment(&seq, &widths, &props);
        let ind = align.to_indicators(seq.len());
        prop_assert_eq!(Alignment::from_indicators(&ind), align);
    }

    #[test]
    fn marginal_dominates_every_complete_data_term(data in proptest::collection::vec(0u8..2, 1..14), seed in 0u64..1000) {
        let seq = Sequence::from_indices(data, 2).unwrap();
        let dict = small_dict();
        let total = sequence_loglik(&seq, &dict).unwrap();
        let a = motifmap::likelihood::sample_alignment(&seq, &dict, seed).unwrap();
        a.validate(&seq, &dict.widths()).unwrap();
        let term = complete_data_loglik(&derive_counts(&seq, &dict, &a).unwrap(), &dict).unwrap();
        prop_assert!(term <= total + 1e-12);
    }
}
