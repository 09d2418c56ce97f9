//! Domain types of the stochastic dictionary model.
//!
//! A sequence is viewed as a concatenation of words drawn from a dictionary
//! whose first `d` words are the single letters and whose remaining words are
//! stochastic (position weight matrices). An [`Alignment`] fixes which
//! positions start a motif site; [`derive_counts`] turns a sequence and an
//! alignment into the sufficient statistics used by every scoring routine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SIMPLEX_TOL: f64 = 1e-9;

/// Ordered set of distinct letters. `d = letters.len()` and equals the number
/// of single-letter words in a dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: &str) -> Result<Self> {
        let letters: Vec<char> = letters.chars().map(|c| c.to_ascii_uppercase()).collect();
        if letters.len() < 2 {
            return Err(Error::InvalidAlphabet(format!(
                "need at least 2 letters, got {}",
                letters.len()
            )));
        }
        for (i, c) in letters.iter().enumerate() {
            if letters[..i].contains(c) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter {c:?}")));
            }
        }
        Ok(Self { letters })
    }

    pub fn dna() -> Self {
        Self {
            letters: vec!['A', 'C', 'G', 'T'],
        }
    }

    pub fn size(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn letter(&self, index: usize) -> char {
        self.letters[index]
    }

    pub fn index_of(&self, letter: char) -> Option<usize> {
        let upper = letter.to_ascii_uppercase();
        self.letters.iter().position(|&c| c == upper)
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::dna()
    }
}

impl TryFrom<String> for Alphabet {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Alphabet::new(&s)
    }
}

impl From<Alphabet> for String {
    fn from(a: Alphabet) -> String {
        a.letters.iter().collect()
    }
}

/// Letter indices with optional record boundaries.
///
/// Multi-record input is concatenated; `record_starts` holds the offset of
/// each record and no word may straddle two records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    data: Vec<u8>,
    record_starts: Vec<usize>,
    alphabet_size: usize,
}

impl Sequence {
    pub fn from_indices(data: Vec<u8>, alphabet_size: usize) -> Result<Self> {
        Self::from_records_indices(vec![data], alphabet_size)
    }

    pub fn from_records_indices(records: Vec<Vec<u8>>, alphabet_size: usize) -> Result<Self> {
        let mut data = Vec::new();
        let mut record_starts = Vec::new();
        for record in records {
            if let Some(&bad) = record.iter().find(|&&x| x as usize >= alphabet_size) {
                return Err(Error::DimensionMismatch(format!(
                    "letter index {bad} outside alphabet of size {alphabet_size}"
                )));
            }
            record_starts.push(data.len());
            data.extend(record);
        }
        if record_starts.is_empty() {
            record_starts.push(0);
        }
        Ok(Self {
            data,
            record_starts,
            alphabet_size,
        })
    }

    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        Self::parse_records(alphabet, &[text])
    }

    pub fn parse_records<S: AsRef<str>>(alphabet: &Alphabet, records: &[S]) -> Result<Self> {
        let mut offset = 0;
        let mut out = Vec::with_capacity(records.len());
        for record in records {
            let mut indices = Vec::new();
            for c in record.as_ref().chars().filter(|c| !c.is_whitespace()) {
                let idx = alphabet.index_of(c).ok_or(Error::UnknownLetter {
                    letter: c,
                    position: offset + indices.len(),
                })?;
                indices.push(idx as u8);
            }
            offset += indices.len();
            out.push(indices);
        }
        Self::from_records_indices(out, alphabet.size())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn record_starts(&self) -> &[usize] {
        &self.record_starts
    }

    /// Records as slices of letter indices.
    pub fn records(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.record_starts.iter().enumerate().map(move |(i, &s)| {
            let e = self.record_starts.get(i + 1).copied().unwrap_or(self.data.len());
            &self.data[s..e]
        })
    }

    /// Start offset of the record containing `pos`.
    pub fn record_start_of(&self, pos: usize) -> usize {
        let i = self.record_starts.partition_point(|&s| s <= pos);
        self.record_starts[i.saturating_sub(1)]
    }

    /// Whether a word of width `w` may start at `start`.
    pub fn fits(&self, start: usize, w: usize) -> bool {
        w >= 1 && start + w <= self.data.len() && self.record_start_of(start + w - 1) <= start
    }

    pub fn letter_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.alphabet_size];
        for &x in &self.data {
            counts[x as usize] += 1;
        }
        counts
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        self.data.iter().map(|&x| alphabet.letter(x as usize)).collect()
    }
}

/// Position weight matrix: `w` columns, each a probability vector over the
/// alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PwmRepr", into = "PwmRepr")]
pub struct Pwm {
    columns: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PwmRepr {
    columns: Vec<Vec<f64>>,
}

impl TryFrom<PwmRepr> for Pwm {
    type Error = Error;
    fn try_from(r: PwmRepr) -> Result<Self> {
        Pwm::new(r.columns)
    }
}

impl From<Pwm> for PwmRepr {
    fn from(p: Pwm) -> Self {
        PwmRepr { columns: p.columns }
    }
}

impl Pwm {
    pub fn new(columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidPwm("width must be positive".into()));
        }
        let d = columns[0].len();
        if d < 2 {
            return Err(Error::InvalidPwm("columns need at least 2 letters".into()));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != d {
                return Err(Error::InvalidPwm(format!("column {j} has length {}", col.len())));
            }
            if col.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidPwm(format!("column {j} has entries outside [0,1]")));
            }
            let s: f64 = col.iter().sum();
            if (s - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::InvalidPwm(format!("column {j} sums to {s}")));
            }
        }
        Ok(Self { columns })
    }

    pub fn uniform(w: usize, d: usize) -> Self {
        Self {
            columns: vec![vec![1.0 / d as f64; d]; w],
        }
    }

    /// Deterministic PWM placing all mass on the given letters.
    pub fn indicator(letters: &[usize], d: usize) -> Result<Self> {
        let columns = letters
            .iter()
            .map(|&l| {
                if l >= d {
                    return Err(Error::InvalidPwm(format!("letter {l} outside alphabet")));
                }
                let mut col = vec![0.0; d];
                col[l] = 1.0;
                Ok(col)
            })
            .collect::<Result<Vec<_>>>()?;
        Pwm::new(columns)
    }

    /// Posterior mean `(c + gamma) / |c + gamma|` column by column.
    pub fn posterior_mean(counts: &[Vec<u64>], gamma: &[f64]) -> Result<Self> {
        let columns = counts
            .iter()
            .map(|c| {
                let total: f64 = c.iter().zip(gamma).map(|(&x, &g)| x as f64 + g).sum();
                c.iter().zip(gamma).map(|(&x, &g)| (x as f64 + g) / total).collect()
            })
            .collect();
        Pwm::new(columns)
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.columns[0].len()
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }
}

/// Per-column argmax letter indices; ties go to the lowest letter index.
pub fn consensus(pwm: &Pwm) -> Vec<usize> {
    pwm.columns
        .iter()
        .map(|col| {
            let mut best = 0;
            for (i, &p) in col.iter().enumerate() {
                if p > col[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

pub fn consensus_string(pwm: &Pwm, alphabet: &Alphabet) -> String {
    consensus(pwm).into_iter().map(|i| alphabet.letter(i)).collect()
}

/// Single letters followed by stochastic words, with usage probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dictionary {
    pub alphabet: Alphabet,
    pub motifs: Vec<Pwm>,
    pub rho: Vec<f64>,
}

impl Dictionary {
    pub fn new(alphabet: Alphabet, motifs: Vec<Pwm>, rho: Vec<f64>) -> Result<Self> {
        let dict = Self {
            alphabet,
            motifs,
            rho,
        };
        dict.validate()?;
        Ok(dict)
    }

    /// Letters-only dictionary.
    pub fn letters_only(alphabet: Alphabet, rho: Vec<f64>) -> Result<Self> {
        Self::new(alphabet, Vec::new(), rho)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.alphabet.size();
        let size = d + self.motifs.len();
        if self.rho.len() != size {
            return Err(Error::InvalidDictionary(format!(
                "rho has length {}, dictionary has {size} words",
                self.rho.len()
            )));
        }
        if self.rho.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidDictionary("rho entries must lie in [0,1]".into()));
        }
        let s: f64 = self.rho.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidDictionary(format!("rho sums to {s}")));
        }
        for (k, m) in self.motifs.iter().enumerate() {
            if m.alphabet_size() != d {
                return Err(Error::InvalidDictionary(format!(
                    "motif {k} has {} letters per column, alphabet has {d}",
                    m.alphabet_size()
                )));
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.alphabet.size()
    }

    /// Number of words `D`.
    pub fn size(&self) -> usize {
        self.d() + self.motifs.len()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.motifs.iter().map(Pwm::width).collect()
    }
}

/// One motif site: start position and motif index (0-based into
/// [`Dictionary::motifs`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site {
    pub start: usize,
    pub motif: usize,
}

/// Typed, non-overlapping motif site starts, kept sorted by position.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "AlignmentRepr")]
pub struct Alignment {
    sites: Vec<Site>,
}

#[derive(Deserialize)]
struct AlignmentRepr {
    sites: Vec<Site>,
}

impl From<AlignmentRepr> for Alignment {
    fn from(r: AlignmentRepr) -> Self {
        Alignment::new(r.sites)
    }
}

impl Alignment {
    pub fn new(mut sites: Vec<Site>) -> Self {
        sites.sort();
        Self { sites }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Sites of motif `k` only.
    pub fn sites_of(&self, k: usize) -> impl Iterator<Item = &Site> + '_ {
        self.sites.iter().filter(move |s| s.motif == k)
    }

    /// Keeps only the sites whose motif index satisfies `keep`.
    pub fn filter_motifs(&self, keep: impl Fn(usize) -> bool) -> Alignment {
        Alignment::new(self.sites.iter().copied().filter(|s| keep(s.motif)).collect())
    }

    pub fn validate(&self, seq: &Sequence, widths: &[usize]) -> Result<()> {
        let mut prev_end: Option<(usize, usize)> = None;
        for site in &self.sites {
            let w = *widths
                .get(site.motif)
                .ok_or(Error::UnknownMotifIndex(site.motif))?;
            if !seq.fits(site.start, w) {
                return Err(Error::SiteOutOfRange {
                    start: site.start,
                    width: w,
                });
            }
            if let Some((prev_start, end)) = prev_end {
                if site.start < end {
                    return Err(Error::OverlappingSites {
                        first: prev_start,
                        second: site.start,
                    });
                }
            }
            prev_end = Some((site.start, site.start + w));
        }
        Ok(())
    }

    /// Indicator form: entry `i` is `Some(k)` when a site of motif `k` starts at `i`.
    pub fn to_indicators(&self, n: usize) -> Vec<Option<usize>> {
        let mut a = vec![None; n];
        for s in &self.sites {
            if s.start < n {
                a[s.start] = Some(s.motif);
            }
        }
        a
    }

    pub fn from_indicators(indicators: &[Option<usize>]) -> Self {
        let sites = indicators
            .iter()
            .enumerate()
            .filter_map(|(start, m)| m.map(|motif| Site { start, motif }))
            .collect();
        Self { sites }
    }
}

/// Sufficient statistics of a (sequence, alignment) pair.
///
/// `word_counts` lists letters first, then motifs. `column_counts[k][j]` is
/// the letter count vector of column `j` of motif `k`. `background` counts
/// letters outside every site and equals the letter part of `word_counts`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSummary {
    pub word_counts: Vec<u64>,
    pub column_counts: Vec<Vec<Vec<u64>>>,
    pub background: Vec<u64>,
}

impl CountSummary {
    pub fn d(&self) -> usize {
        self.background.len()
    }

    pub fn n_motifs(&self) -> usize {
        self.column_counts.len()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.column_counts.iter().map(Vec::len).collect()
    }

    /// Letter counts outside all sites.
    pub fn background_letter_counts(&self) -> &[u64] {
        &self.background
    }

    /// Letter counts inside motif sites, summed over motifs and columns.
    pub fn motif_letter_counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.d()];
        for col in self.column_counts.iter().flatten() {
            for (acc, &x) in c.iter_mut().zip(col) {
                *acc += x;
            }
        }
        c
    }

    /// Letter counts of the whole sequence (the null-model counts).
    pub fn total_letter_counts(&self) -> Vec<u64> {
        self.motif_letter_counts()
            .iter()
            .zip(&self.background)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// Total number of words in the partition.
    pub fn total_words(&self) -> u64 {
        self.word_counts.iter().sum()
    }

    /// Summary for a letters-only view of the same data.
    pub fn null_view(&self) -> CountSummary {
        let total = self.total_letter_counts();
        CountSummary {
            word_counts: total.clone(),
            column_counts: Vec::new(),
            background: total,
        }
    }

    pub fn check_consistent(&self) -> Result<()> {
        let d = self.d();
        if self.word_counts.len() != d + self.n_motifs() {
            return Err(Error::DimensionMismatch(format!(
                "word counts have length {}, expected {}",
                self.word_counts.len(),
                d + self.n_motifs()
            )));
        }
        if self.word_counts[..d] != self.background[..] {
            return Err(Error::DimensionMismatch(
                "letter word counts differ from background counts".into(),
            ));
        }
        for (k, cols) in self.column_counts.iter().enumerate() {
            for col in cols {
                if col.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "motif {k} column has {} letters, alphabet has {d}",
                        col.len()
                    )));
                }
                if col.iter().sum::<u64>() != self.word_counts[d + k] {
                    return Err(Error::DimensionMismatch(format!(
                        "motif {k} column total differs from its site count"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Count summary for an alignment of a dictionary's motifs.
pub fn derive_counts(seq: &Sequence, dict: &Dictionary, align: &Alignment) -> Result<CountSummary> {
    if seq.alphabet_size() != dict.d() {
        return Err(Error::DimensionMismatch(format!(
            "sequence alphabet has {} letters, dictionary has {}",
            seq.alphabet_size(),
            dict.d()
        )));
    }
    derive_counts_for_widths(seq, &dict.widths(), align)
}

/// As [`derive_counts`], with motifs described only by their widths.
pub fn derive_counts_for_widths(
    seq: &Sequence,
    widths: &[usize],
    align: &Alignment,
) -> Result<CountSummary> {
    align.validate(seq, widths)?;
    let d = seq.alphabet_size();
    let data = seq.data();
    let mut background = seq.letter_counts();
    let mut column_counts: Vec<Vec<Vec<u64>>> =
        widths.iter().map(|&w| vec![vec![0u64; d]; w]).collect();
    let mut sites = vec![0u64; widths.len()];
    for site in align.sites() {
        sites[site.motif] += 1;
        let cols = &mut column_counts[site.motif];
        for (j, col) in cols.iter_mut().enumerate() {
            let x = data[site.start + j] as usize;
            col[x] += 1;
            background[x] -= 1;
        }
    }
    let mut word_counts = background.clone();
    word_counts.extend(sites);
    Ok(CountSummary {
        word_counts,
        column_counts,
        background,
    })
}

/// Dirichlet pseudo-counts for both models.
///
/// `beta0` covers all `D` words of the motif model, `alpha` the `d` letters of
/// the null model and `gamma` one motif column (shared by all columns). When
/// `mixture` is present the prior is the weighted mixture of its components
/// and the top-level vectors are used only for dimension checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub beta0: Vec<f64>,
    pub alpha: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<Vec<MixtureComponent>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub prior: PriorSpec,
}

/// Default pseudo-count for every word of the motif model and every letter of
/// the null model.
pub const DEFAULT_WORD_PSEUDO_COUNT: f64 = 1.0;

impl PriorSpec {
    /// Defaults: unit word pseudo-counts, `alpha` equal to the letter part of
    /// `beta0`, and equal motif-column pseudo-counts summing to one.
    pub fn default_for(d: usize, n_motifs: usize) -> Self {
        Self {
            beta0: vec![DEFAULT_WORD_PSEUDO_COUNT; d + n_motifs],
            alpha: vec![DEFAULT_WORD_PSEUDO_COUNT; d],
            gamma: vec![1.0 / d as f64; d],
            mixture: None,
        }
    }

    pub fn d(&self) -> usize {
        self.alpha.len()
    }

    pub fn n_motifs(&self) -> usize {
        self.beta0.len().saturating_sub(self.d())
    }

    /// Same prior resized to `n_motifs` motif words. New motif pseudo-counts
    /// copy the last existing one (or the default when there is none).
    pub fn with_motif_count(&self, n_motifs: usize) -> Self {
        let d = self.d();
        let fill = if self.beta0.len() > d {
            *self.beta0.last().unwrap()
        } else {
            DEFAULT_WORD_PSEUDO_COUNT
        };
        let mut beta0 = self.beta0.clone();
        beta0.resize(d + n_motifs, fill);
        Self {
            beta0,
            alpha: self.alpha.clone(),
            gamma: self.gamma.clone(),
            mixture: self.mixture.as_ref().map(|comps| {
                comps
                    .iter()
                    .map(|c| MixtureComponent {
                        weight: c.weight,
                        prior: c.prior.with_motif_count(n_motifs),
                    })
                    .collect()
            }),
        }
    }

    /// Same prior with a different motif-column pseudo-count vector.
    pub fn with_gamma(&self, gamma: Vec<f64>) -> Self {
        Self {
            gamma,
            mixture: None,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d();
        if d < 2 {
            return Err(Error::InvalidPrior("alpha needs at least 2 letters".into()));
        }
        if self.gamma.len() != d || self.beta0.len() < d {
            return Err(Error::InvalidPrior(format!(
                "expected gamma of length {d} and beta0 of length >= {d}"
            )));
        }
        for &v in self.beta0.iter().chain(&self.alpha).chain(&self.gamma) {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositivePseudoCount(v));
            }
        }
        if let Some(comps) = &self.mixture {
            if comps.is_empty() {
                return Err(Error::InvalidPrior("mixture has no components".into()));
            }
            let total: f64 = comps.iter().map(|c| c.weight).sum();
            if (total - 1.0).abs() > SIMPLEX_TOL || comps.iter().any(|c| c.weight <= 0.0) {
                return Err(Error::InvalidPrior(format!(
                    "mixture weights must be positive and sum to 1, got {total}"
                )));
            }
            for c in comps {
                c.prior.validate()?;
                if c.prior.d() != d || c.prior.n_motifs() != self.n_motifs() {
                    return Err(Error::InvalidPrior(
                        "mixture components differ in dimension".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Checks that the prior matches a count summary's dimensions.
    pub fn check_against(&self, counts: &CountSummary) -> Result<()> {
        self.validate()?;
        if self.d() != counts.d() || self.beta0.len() != counts.word_counts.len() {
            return Err(Error::DimensionMismatch(format!(
                "prior covers {} letters and {} words, counts have {} letters and {} words",
                self.d(),
                self.beta0.len(),
                counts.d(),
                counts.word_counts.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dna_seq(s: &str) -> Sequence {
        Sequence::parse(&Alphabet::dna(), s).unwrap()
    }

    fn dict_with_width(w: usize) -> Dictionary {
        Dictionary::new(
            Alphabet::dna(),
            vec![Pwm::uniform(w, 4)],
            vec![0.2, 0.2, 0.2, 0.2, 0.2],
        )
        .unwrap()
    }

    #[test]
    fn empty_alignment_counts_letters() {
        let seq = dna_seq("ACGT");
        let counts = derive_counts(&seq, &dict_with_width(2), &Alignment::empty()).unwrap();
        assert_eq!(counts.background, vec![1, 1, 1, 1]);
        assert_eq!(counts.word_counts, vec![1, 1, 1, 1, 0]);
        assert!(counts.column_counts[0].iter().flatten().all(|&c| c == 0));
    }

    #[test]
    fn single_site_hand_count() {
        let seq = dna_seq("AAAAA");
        let align = Alignment::new(vec![Site { start: 0, motif: 0 }]);
        let counts = derive_counts(&seq, &dict_with_width(2), &align).unwrap();
        assert_eq!(counts.background, vec![3, 0, 0, 0]);
        assert_eq!(counts.column_counts[0], vec![vec![1, 0, 0, 0], vec![1, 0, 0, 0]]);
        assert_eq!(counts.word_counts, vec![3, 0, 0, 0, 1]);
        counts.check_consistent().unwrap();
    }

    #[test]
    fn overlapping_sites_rejected() {
        let seq = dna_seq("ACGT");
        let align = Alignment::new(vec![Site { start: 0, motif: 0 }, Site { start: 1, motif: 0 }]);
        let err = derive_counts(&seq, &dict_with_width(2), &align).unwrap_err();
        assert!(matches!(err, Error::OverlappingSites { .. }));
    }

    #[test]
    fn out_of_range_and_unknown_motif() {
        let seq = dna_seq("ACGT");
        let align = Alignment::new(vec![Site { start: 3, motif: 0 }]);
        assert!(matches!(
            derive_counts(&seq, &dict_with_width(2), &align),
            Err(Error::SiteOutOfRange { .. })
        ));
        let align = Alignment::new(vec![Site { start: 0, motif: 1 }]);
        assert!(matches!(
            derive_counts(&seq, &dict_with_width(2), &align),
            Err(Error::UnknownMotifIndex(1))
        ));
    }

    #[test]
    fn sites_cannot_straddle_records() {
        let seq = Sequence::parse_records(&Alphabet::dna(), &["ACG", "TTA"]).unwrap();
        assert!(seq.fits(0, 3));
        assert!(!seq.fits(2, 2));
        assert!(seq.fits(3, 3));
        let align = Alignment::new(vec![Site { start: 2, motif: 0 }]);
        assert!(matches!(
            align.validate(&seq, &[2]),
            Err(Error::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn consensus_tie_break_and_indicator() {
        assert_eq!(consensus(&Pwm::uniform(3, 4)), vec![0, 0, 0]);
        let a = Alphabet::dna();
        let letters: Vec<usize> = "TATAAT".chars().map(|c| a.index_of(c).unwrap()).collect();
        let pwm = Pwm::indicator(&letters, 4).unwrap();
        assert_eq!(consensus_string(&pwm, &a), "TATAAT");
    }

    #[test]
    fn pwm_validation() {
        assert!(Pwm::new(vec![]).is_err());
        assert!(Pwm::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(Pwm::new(vec![vec![0.5, 0.5], vec![1.0]]).is_err());
        assert!(Pwm::new(vec![vec![1.5, -0.5]]).is_err());
    }

    #[test]
    fn dictionary_validation() {
        assert!(Dictionary::new(Alphabet::dna(), vec![], vec![0.25; 4]).is_ok());
        assert!(Dictionary::new(Alphabet::dna(), vec![], vec![0.3; 4]).is_err());
        assert!(Dictionary::new(Alphabet::dna(), vec![Pwm::uniform(2, 3)], vec![0.2; 5]).is_err());
    }

    #[test]
    fn prior_validation_and_resize() {
        let p = PriorSpec::default_for(4, 1);
        p.validate().unwrap();
        assert_eq!(p.with_motif_count(3).beta0.len(), 7);
        assert_eq!(p.with_motif_count(0).beta0.len(), 4);
        let mut bad = p.clone();
        bad.gamma[0] = 0.0;
        assert!(matches!(bad.validate(), Err(Error::NonPositivePseudoCount(_))));
        let mut mix = p.clone();
        mix.mixture = Some(vec![
            MixtureComponent { weight: 0.5, prior: p.clone() },
            MixtureComponent { weight: 0.4, prior: p.clone() },
        ]);
        assert!(mix.validate().is_err());
    }

    #[test]
    fn json_round_trip_of_model_objects() {
        let dict = dict_with_width(3);
        let s = serde_json::to_string(&dict).unwrap();
        assert_eq!(serde_json::from_str::<Dictionary>(&s).unwrap(), dict);
        let bad = s.replace("0.2,0.2,0.2,0.2,0.2", "0.2,0.2");
        let parsed: Dictionary = serde_json::from_str(&bad).unwrap();
        assert!(parsed.validate().is_err());
        let align = Alignment::new(vec![Site { start: 4, motif: 0 }, Site { start: 0, motif: 1 }]);
        let s = serde_json::to_string(&align).unwrap();
        assert_eq!(serde_json::from_str::<Alignment>(&s).unwrap(), align);
        assert!(serde_json::from_str::<Alphabet>("\"AAC\"").is_err());
    }
}
