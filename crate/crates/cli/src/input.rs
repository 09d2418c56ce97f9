//! Parsing of command-line values and input files.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use motifmap::simulate::{MotifSource, PlantSpec};
use motifmap::{Alignment, Alphabet, Error, PriorSpec, Pwm, Sequence};
use serde::Deserialize;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

/// Comma-separated reals.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| invalid(format!("not a number: {x:?}"))))
        .collect()
}

/// `START:END:STEP` (inclusive) or a single value.
pub fn parse_c_range(s: &str) -> Result<Vec<f64>, Error> {
    let parts = parse_colon(s)?;
    match parts.as_slice() {
        [x] => Ok(vec![*x]),
        [a, b, step] if *step > 0.0 && b >= a => Ok(motifmap::asymptotics::linspace_step(*a, *b, *step)),
        _ => Err(invalid(format!("c range must be START:END:STEP or a value, got {s:?}"))),
    }
}

/// `START:END` (inclusive) or a single width.
pub fn parse_w_range(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || invalid(format!("w range must be START:END or a width, got {s:?}"));
    let parts: Vec<usize> = s.split(':').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [w] => Ok(vec![*w]),
        [a, b] if a <= b => Ok((*a..=*b).collect()),
        _ => Err(bad()),
    }
}

fn parse_colon(s: &str) -> Result<Vec<f64>, Error> {
    s.split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| invalid(format!("not a number: {x:?}"))))
        .collect()
}

/// `W:C:K` with a comma-separated composition K, or `PATH:C` for a PWM file.
pub fn parse_motif(s: &str, exact: bool) -> anyhow::Result<PlantSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        if let Ok(w) = parts[0].parse::<usize>() {
            let c = parts[1].parse::<f64>().map_err(|_| invalid(format!("bad proportion in {s:?}")))?;
            let k = parse_vector(parts[2])?;
            return Ok(PlantSpec { w, source: MotifSource::Composition(k), c, exact });
        }
    }
    let (path, c) = s
        .rsplit_once(':')
        .ok_or_else(|| invalid(format!("motif must be W:C:K or PATH:C, got {s:?}")))?;
    let c = c.parse::<f64>().map_err(|_| invalid(format!("bad proportion in {s:?}")))?;
    let pwm: Pwm = read_json(Path::new(path))?;
    Ok(PlantSpec { w: pwm.width(), source: MotifSource::Pwm(pwm), c, exact })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let file = File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

pub fn read_fasta(path: &Path, alphabet: &Alphabet) -> anyhow::Result<Sequence> {
    let file = File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(motifmap::fasta::read_sequence(BufReader::new(file), alphabet)?)
}

/// Priors from a JSON file, or defaults, resized to `n_motifs` motif words.
pub fn load_priors(path: Option<&Path>, d: usize, n_motifs: usize) -> anyhow::Result<PriorSpec> {
    let priors = match path {
        Some(p) => read_json::<PriorSpec>(p)?.with_motif_count(n_motifs),
        None => PriorSpec::default_for(d, n_motifs),
    };
    priors.validate()?;
    if priors.d() != d {
        return Err(Error::DimensionMismatch(format!("prior covers {} letters, alphabet has {d}", priors.d())).into());
    }
    Ok(priors)
}

/// The alignment file forms `score` accepts.
#[derive(Deserialize)]
#[serde(untagged)]
enum AlignmentFile {
    Wrapped { alignment: Alignment, #[serde(default)] motifs: Vec<MotifWidth> },
    Bare { sites: Vec<motifmap::Site>, #[serde(default)] widths: Vec<usize> },
}

/// Anything carrying a PWM (truth files) or an explicit width (discovery).
#[derive(Deserialize)]
#[serde(untagged)]
enum MotifWidth {
    Width { width: usize },
    Pwm(Pwm),
}

impl MotifWidth {
    fn width(&self) -> usize {
        match self {
            MotifWidth::Width { width } => *width,
            MotifWidth::Pwm(p) => p.width(),
        }
    }
}

/// Reads an alignment and the motif widths it implies.
pub fn read_alignment(path: &Path) -> anyhow::Result<(Alignment, Vec<usize>)> {
    Ok(match read_json::<AlignmentFile>(path)? {
        AlignmentFile::Wrapped { alignment, motifs } => (alignment, motifs.iter().map(MotifWidth::width).collect()),
        AlignmentFile::Bare { sites, widths } => (Alignment::new(sites), widths),
    })
}

/// Count matrix CSV: one row per motif column, `d` non-negative integers.
/// A header row of letters is allowed.
pub fn read_counts(path: &Path, d: usize) -> anyhow::Result<Vec<Vec<u64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let parsed: Result<Vec<u64>, _> = rec.iter().map(str::parse).collect();
        match parsed {
            Ok(row) if row.len() == d => rows.push(row),
            Ok(row) => {
                return Err(Error::DimensionMismatch(format!("row {} has {} counts, need {d}", i + 1, row.len())).into())
            }
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::Parse(format!("row {} is not a list of counts", i + 1)).into()),
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("count matrix has no rows".into()).into());
    }
    Ok(rows)
}
