//! Planted-motif sequence generation with known ground truth.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alignment, Pwm, Sequence, Site};

const SIMPLEX_TOL: f64 = 1e-9;
/// Placement attempts allowed per requested site.
pub const RETRIES_PER_SITE: usize = 100;

/// How a planted motif's letters are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotifSource {
    /// Overall letter composition k; every column uses it when not exact.
    Composition(Vec<f64>),
    Pwm(Pwm),
}

/// One motif type to plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub w: usize,
    pub source: MotifSource,
    /// Sites per unit length; `round(c·n)` sites are planted.
    pub c: f64,
    /// Plant one fixed consensus string instead of sampling each site.
    pub exact: bool,
}

/// A generated data set and what was planted in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub sequence: Sequence,
    pub truth: Alignment,
    /// Letter matrix each motif type was drawn from (indicator if exact).
    pub motifs: Vec<Pwm>,
}

/// JSON form of the ground truth written next to a simulated FASTA file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub seed: u64,
    pub n: usize,
    pub alignment: Alignment,
    pub consensus: Vec<String>,
    pub motifs: Vec<Pwm>,
}

fn check_probs(v: &[f64], what: &str) -> Result<()> {
    let s: f64 = v.iter().sum();
    if v.iter().any(|&x| !(x >= 0.0)) || (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidConfig(format!("{what} must be a probability vector")));
    }
    Ok(())
}

/// Letter counts of an exact consensus realising composition `k` at width
/// `w`: `floor(kᵢw)` copies each, the remainder to the largest fractional
/// parts (ties to the lower letter index).
pub fn consensus_counts(k: &[f64], w: usize) -> Vec<usize> {
    let scaled: Vec<f64> = k.iter().map(|&x| x * w as f64).collect();
    let mut counts: Vec<usize> = scaled.iter().map(|x| (x + 1e-9).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..k.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = scaled[a] - counts[a] as f64;
        let fb = scaled[b] - counts[b] as f64;
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(w.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn motif_matrix<R: Rng + ?Sized>(spec: &PlantSpec, d: usize, rng: &mut R) -> Result<Pwm> {
    if spec.w == 0 {
        return Err(Error::InvalidConfig("motif width must be positive".into()));
    }
    match &spec.source {
        MotifSource::Composition(k) => {
            if k.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "composition has {} entries, alphabet has {d}",
                    k.len()
                )));
            }
            check_probs(k, "motif composition")?;
            if spec.exact {
                let mut letters: Vec<usize> = consensus_counts(k, spec.w)
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &n)| std::iter::repeat_n(i, n))
                    .collect();
                letters.shuffle(rng);
                Pwm::indicator(&letters, d)
            } else {
                Pwm::new(vec![k.clone(); spec.w])
            }
        }
        MotifSource::Pwm(p) => {
            if p.alphabet_size() != d || p.width() != spec.w {
                return Err(Error::DimensionMismatch(format!(
                    "PWM is {}x{}, expected width {} over {d} letters",
                    p.width(),
                    p.alphabet_size(),
                    spec.w
                )));
            }
            if spec.exact {
                Pwm::indicator(&crate::model::consensus(p), d)
            } else {
                Ok(p.clone())
            }
        }
    }
}

/// Generates `n` background letters i.i.d. from `theta0` and plants each
/// motif type at `round(c·n)` uniformly placed, non-overlapping sites.
pub fn generate(n: usize, theta0: &[f64], motifs: &[PlantSpec], seed: u64) -> Result<Simulated> {
    let d = theta0.len();
    if d < 2 {
        return Err(Error::InvalidAlphabet(format!("alphabet size {d} too small")));
    }
    check_probs(theta0, "theta0")?;
    let load: f64 = motifs.iter().map(|m| m.c * m.w as f64).sum();
    if motifs.iter().any(|m| !(m.c >= 0.0)) || load >= 1.0 {
        return Err(Error::InvalidConfig(format!("need c >= 0 and sum of c*w < 1, got {load}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pwms = motifs
        .iter()
        .map(|m| motif_matrix(m, d, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    let background = WeightedIndex::new(theta0)
        .map_err(|e| Error::InvalidConfig(format!("theta0: {e}")))?;
    let mut data: Vec<u8> = (0..n).map(|_| background.sample(&mut rng) as u8).collect();

    let mut occupied = vec![false; n];
    let mut sites = Vec::new();
    for (k, spec) in motifs.iter().enumerate() {
        let m = (spec.c * n as f64).round() as usize;
        if m == 0 {
            continue;
        }
        let w = spec.w;
        let cap = RETRIES_PER_SITE * m;
        let mut placed = 0;
        let mut attempts = 0;
        while placed < m {
            if attempts == cap || w > n {
                return Err(Error::InfeasiblePlacement { sites: m, attempts });
            }
            attempts += 1;
            let start = rng.random_range(0..=n - w);
            if occupied[start..start + w].iter().any(|&o| o) {
                continue;
            }
            occupied[start..start + w].iter_mut().for_each(|o| *o = true);
            sites.push(Site { start, motif: k });
            placed += 1;
        }
    }

    let columns: Vec<Vec<WeightedIndex<f64>>> = pwms
        .iter()
        .map(|p| {
            p.columns()
                .iter()
                .map(|c| WeightedIndex::new(c).expect("validated PWM column"))
                .collect()
        })
        .collect();
    sites.sort_by_key(|s| s.start);
    for s in &sites {
        for (j, col) in columns[s.motif].iter().enumerate() {
            data[s.start + j] = col.sample(&mut rng) as u8;
        }
    }

    Ok(Simulated {
        sequence: Sequence::from_indices(data, d)?,
        truth: Alignment::new(sites),
        motifs: pwms,
    })
}
