//! The MAP divergence factor: the exponential rate at which logMAP of the
//! true alignment grows with sequence length, plus its special cases.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{fmt_sig, ls_slope, xlogx};

const SIMPLEX_TOL: f64 = 1e-9;
// Arguments to x log x may undershoot zero by rounding when θ₀ᵢ = kᵢcw exactly.
const LOG_ARG_TOL: f64 = 1e-12;

/// Limiting proportions for a single motif type planted in i.i.d. background.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifProfile {
    /// Sites per unit of sequence length.
    pub c: f64,
    pub w: usize,
    pub theta0: Vec<f64>,
    /// Fraction of each letter inside the motif instances.
    pub k: Vec<f64>,
}

impl MotifProfile {
    pub fn new(c: f64, w: usize, theta0: Vec<f64>, k: Vec<f64>) -> Result<Self> {
        let p = Self { c, w, theta0, k };
        p.validate()?;
        Ok(p)
    }

    pub fn symmetric(c: f64, w: usize, d: usize) -> Result<Self> {
        let u = vec![1.0 / d as f64; d];
        Self::new(c, w, u.clone(), u)
    }

    pub fn d(&self) -> usize {
        self.theta0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.theta0.len();
        if d == 0 || self.k.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "theta0 has {} entries, k has {}",
                d,
                self.k.len()
            )));
        }
        if self.w == 0 {
            return Err(Error::DomainViolation("motif width must be positive".into()));
        }
        check_rate(self.c, self.w)?;
        if self.theta0.iter().any(|&t| !(t >= 0.0)) {
            return Err(Error::DomainViolation("theta0 entries must be non-negative".into()));
        }
        let s: f64 = self.theta0.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::DomainViolation(format!("theta0 sums to {s}, not 1")));
        }
        if self.k.iter().any(|&k| !k.is_finite()) {
            return Err(Error::DomainViolation("k entries must be finite".into()));
        }
        Ok(())
    }
}

fn check_rate(c: f64, w: usize) -> Result<()> {
    if !(c >= 0.0) || c * w as f64 >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "need 0 <= c*w < 1, got c = {c}, w = {w}"
        )));
    }
    Ok(())
}

fn xlogx_checked(x: f64) -> Result<f64> {
    if x < -LOG_ARG_TOL || x.is_nan() {
        return Err(Error::DomainViolation(format!("log of negative argument {x}")));
    }
    Ok(xlogx(x.max(0.0)))
}

/// `c log c − [1 − c(w−1)] log[1 − c(w−1)]`, shared by every form.
fn rate_terms(c: f64, w: usize) -> Result<f64> {
    Ok(xlogx(c) - xlogx_checked(1.0 - c * (w as f64 - 1.0))?)
}

/// General divergence factor r for a profile; logMAP(A⁰) ≈ rN.
pub fn map_df(profile: &MotifProfile) -> Result<f64> {
    profile.validate()?;
    let cw = profile.c * profile.w as f64;
    let mut r = rate_terms(profile.c, profile.w)?;
    for (&t, &k) in profile.theta0.iter().zip(&profile.k) {
        r += xlogx_checked(t - k * cw)? - xlogx(t);
    }
    Ok(r)
}

/// Divergence factor at the uniform profile θ₀ᵢ = kᵢ = 1/d.
pub fn map_df_symmetric(c: f64, w: usize, d: usize) -> Result<f64> {
    check_rate(c, w)?;
    let cw = c * w as f64;
    Ok(rate_terms(c, w)? + xlogx(1.0 - cw) + cw * (d as f64).ln())
}

/// Divergence factor for a repeat motif (one letter throughout) in uniform
/// background, evaluated with k₁ = d exactly as in the closed form.
pub fn map_df_repeat(c: f64, w: usize, d: usize) -> Result<f64> {
    check_rate(c, w)?;
    let df = d as f64;
    let cw = c * w as f64;
    if cw >= 1.0 / (df * df) {
        return Err(Error::DomainViolation(format!(
            "repeat form needs c*w < 1/d^2, got {cw}"
        )));
    }
    Ok(rate_terms(c, w)? + df.ln() / df + xlogx(1.0 / df - df * cw))
}

/// Claimed maximum of r over all profiles at fixed (c, w, d).
pub fn map_df_max(c: f64, w: usize, d: usize) -> Result<f64> {
    map_df_symmetric(c, w, d)
}

/// Rate for a second motif given a dictionary already holding letters (and
/// possibly a first motif). `rho` are letter usage proportions per word of
/// the smaller model, `rho_next` the new motif's usage.
pub fn multi_motif_df(rho: &[f64], kappa: &[f64], w: usize, rho_next: f64) -> Result<f64> {
    if rho.len() != kappa.len() || rho.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "rho has {} entries, kappa has {}",
            rho.len(),
            kappa.len()
        )));
    }
    let ks: f64 = kappa.iter().sum();
    if (ks - 1.0).abs() > SIMPLEX_TOL || kappa.iter().any(|&k| k < 0.0) {
        return Err(Error::DomainViolation(format!("kappa must be a probability vector (sum {ks})")));
    }
    if w == 0 || !(rho_next >= 0.0) || (w > 1 && rho_next * (w as f64 - 1.0) >= 1.0) {
        return Err(Error::DomainViolation(format!(
            "need 0 <= rho_next < 1/(w-1), got {rho_next} with w = {w}"
        )));
    }
    if rho.iter().any(|&r| !(r >= 0.0)) {
        return Err(Error::DomainViolation("rho entries must be non-negative".into()));
    }
    let wr = w as f64 * rho_next;
    let mut r = 0.0;
    for (&p, &k) in rho.iter().zip(kappa) {
        r += xlogx_checked(p - k * wr)? - xlogx(p);
    }
    Ok(r + rate_terms(rho_next, w)?)
}

/// Which closed form a grid evaluates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Symmetric,
    Repeat,
    Custom { theta0: Vec<f64>, k: Vec<f64> },
}

impl ProfileKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::Symmetric => "symmetric",
            ProfileKind::Repeat => "repeat",
            ProfileKind::Custom { .. } => "custom",
        }
    }

    pub fn eval(&self, c: f64, w: usize, d: usize) -> Result<f64> {
        match self {
            ProfileKind::Symmetric => map_df_symmetric(c, w, d),
            ProfileKind::Repeat => map_df_repeat(c, w, d),
            ProfileKind::Custom { theta0, k } => {
                map_df(&MotifProfile::new(c, w, theta0.clone(), k.clone())?)
            }
        }
    }
}

/// One cell of a divergence grid; `r` is `None` outside the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub c: f64,
    pub w: usize,
    pub r: Option<f64>,
    pub max: Option<f64>,
}

/// Evaluates r on every (c, w) pair, w-major then c, rows in parallel.
/// With `with_max` each cell also carries the closed-form maximum.
pub fn df_grid(
    c_values: &[f64],
    w_values: &[usize],
    kind: &ProfileKind,
    d: usize,
    with_max: bool,
) -> Result<Vec<GridCell>> {
    if c_values.is_empty() || w_values.is_empty() {
        return Err(Error::InvalidConfig("grid ranges must be non-empty".into()));
    }
    if d < 2 {
        return Err(Error::InvalidAlphabet(format!("alphabet size {d} too small")));
    }
    if let ProfileKind::Custom { theta0, k } = kind {
        if theta0.len() != d || k.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "custom profile vectors must have {d} entries"
            )));
        }
    }
    let rows: Vec<Vec<GridCell>> = w_values
        .par_iter()
        .map(|&w| {
            c_values
                .iter()
                .map(|&c| GridCell {
                    c,
                    w,
                    r: kind.eval(c, w, d).ok(),
                    max: if with_max { map_df_max(c, w, d).ok() } else { None },
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Writes a grid as CSV with 12 significant digits; missing cells are empty.
pub fn write_grid_csv<W: Write>(
    out: W,
    cells: &[GridCell],
    kind: &ProfileKind,
    with_max: bool,
) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(out);
    let opt = |x: Option<f64>| x.map(|v| fmt_sig(v, 12)).unwrap_or_default();
    if with_max {
        writeln!(out, "c,w,r,profile,max")?;
    } else {
        writeln!(out, "c,w,r,profile")?;
    }
    for cell in cells {
        write!(out, "{},{},{},{}", fmt_sig(cell.c, 12), cell.w, opt(cell.r), kind.name())?;
        if with_max {
            write!(out, ",{}", opt(cell.max))?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Least-squares slope of logMAP against N.
pub fn empirical_rate(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if points.windows(2).any(|p| !(p[1].0 > p[0].0)) {
        return Err(Error::InvalidConfig("N values must be strictly increasing".into()));
    }
    Ok(ls_slope(points))
}

/// Convenience: evenly spaced values `start, start+step, …` not exceeding `end`.
pub fn linspace_step(start: f64, end: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || end < start {
        return Vec::new();
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}
