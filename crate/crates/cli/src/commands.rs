use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use motifmap::asymptotics::{df_grid, write_grid_csv, ProfileKind};
use motifmap::criteria::{aic, bic, kli, ml_complete_loglik, n_params};
use motifmap::fasta::{write_records, Record};
use motifmap::model::derive_counts_for_widths;
use motifmap::numeric::fmt_sig;
use motifmap::sampler::{progressive_discover, DaConfig};
use motifmap::score::{count_alignments, exact_bayes_numerator, null_log_marginal};
use motifmap::sensitivity::{delta_grid_profile_named, write_report_csv, DeltaGrid, PriorKind};
use motifmap::simulate::{generate, TruthFile};
use motifmap::{consensus_string, log_map, Alignment, Alphabet, Error, Pwm};
use serde_json::{json, Value};

use crate::{input, Kind};

/// A number rounded to 12 significant digits; non-finite values become strings.
fn num(x: f64) -> Value {
    let s = fmt_sig(x, 12);
    match s.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(n) => Value::Number(n),
        None => Value::String(s),
    }
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn pwm_json(p: &Pwm) -> Value {
    json!({ "columns": p.columns().iter().map(|c| nums(c)).collect::<Vec<_>>() })
}

fn emit(value: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

pub fn simulate(
    n: usize,
    theta0: &str,
    motifs: &[String],
    exact: bool,
    seed: u64,
    alphabet: &str,
    out: &Path,
) -> anyhow::Result<()> {
    let alpha = Alphabet::new(alphabet)?;
    let theta0 = input::parse_vector(theta0)?;
    if theta0.len() != alpha.size() {
        return Err(Error::DimensionMismatch(format!(
            "theta0 has {} entries, alphabet has {}",
            theta0.len(),
            alpha.size()
        ))
        .into());
    }
    let specs = motifs.iter().map(|m| input::parse_motif(m, exact)).collect::<anyhow::Result<Vec<_>>>()?;
    let sim = generate(n, &theta0, &specs, seed)?;

    let fasta = BufWriter::new(File::create(with_suffix(out, ".fasta"))?);
    write_records(fasta, &[Record { id: format!("simulated seed={seed}"), seq: sim.sequence.to_text(&alpha) }])?;
    let truth = TruthFile {
        seed,
        n,
        alignment: sim.truth.clone(),
        consensus: sim.motifs.iter().map(|m| consensus_string(m, &alpha)).collect(),
        motifs: sim.motifs.clone(),
    };
    fs::write(with_suffix(out, ".truth.json"), serde_json::to_string_pretty(&truth)? + "\n")?;
    Ok(())
}

pub fn score(
    fasta: &Path,
    alignment: Option<&Path>,
    widths: &[usize],
    priors: Option<&Path>,
    null_align: bool,
    alphabet: &str,
) -> anyhow::Result<()> {
    let alpha = Alphabet::new(alphabet)?;
    let seq = input::read_fasta(fasta, &alpha)?;
    let (mut align, mut file_widths) = match alignment {
        Some(p) => input::read_alignment(p)?,
        None => (Alignment::empty(), Vec::new()),
    };
    if !widths.is_empty() {
        file_widths = widths.to_vec();
    }
    if null_align {
        align = Alignment::empty();
    }
    let widths = file_widths;
    let d = alpha.size();
    let priors = input::load_priors(priors, d, widths.len())?;
    let counts = derive_counts_for_widths(&seq, &widths, &align)?;
    let value = log_map(&counts, &priors)?;

    let ll = ml_complete_loglik(&counts);
    let k = n_params(d, &widths);
    let letters = seq.letter_counts();
    let total: f64 = letters.iter().zip(&priors.alpha).map(|(&n, &a)| n as f64 + a).sum();
    let theta0: Vec<f64> = letters.iter().zip(&priors.alpha).map(|(&n, &a)| (n as f64 + a) / total).collect();
    let klis = counts
        .column_counts
        .iter()
        .map(|cols| kli(&Pwm::posterior_mean(cols, &priors.gamma)?, &theta0))
        .collect::<motifmap::Result<Vec<f64>>>()?;

    emit(
        &json!({
            "log_map": num(value.log_map),
            "components": {
                "word_usage": num(value.components.word_usage),
                "background": num(value.components.background),
                "motif_columns": num(value.components.motif_columns),
            },
            "sites": counts.word_counts[d..],
            "widths": widths,
            "loglik": num(ll),
            "n_params": k,
            "aic": num(aic(ll, k)),
            "bic": num(bic(ll, k, seq.len())),
            "kli": nums(&klis),
        }),
        None,
    )
}

pub struct DiscoverRun {
    pub widths: Vec<usize>,
    pub max_motifs: usize,
    pub iters: usize,
    pub burnin: usize,
    pub chains: usize,
    pub seed: u64,
}

pub fn discover(
    fasta: &Path,
    run: DiscoverRun,
    priors: Option<&Path>,
    alphabet: &str,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let alpha = Alphabet::new(alphabet)?;
    let seq = input::read_fasta(fasta, &alpha)?;
    let cfg = DaConfig {
        iterations: run.iters,
        burn_in: run.burnin,
        chains: run.chains,
        priors: input::load_priors(priors, alpha.size(), 0)?,
        ..DaConfig::new(run.widths, alpha.size(), run.seed)
    };
    let found = progressive_discover(&seq, &alpha, &cfg, run.max_motifs)?;
    let d = alpha.size();
    let motifs: Vec<Value> = found
        .accepted
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let pwm = &found.dictionary.motifs[k];
            json!({
                "width": a.width,
                "consensus": consensus_string(pwm, &alpha),
                "pwm": pwm_json(pwm),
                "rho": num(found.dictionary.rho[d + k]),
                "sites": found.alignment.sites_of(k).map(|s| s.start).collect::<Vec<_>>(),
                "delta_log_map": num(a.delta_log_map),
                "log_map": num(a.log_map),
            })
        })
        .collect();
    let rejected = found.rejected.map(|(w, delta, lm)| json!({ "width": w, "delta_log_map": num(delta), "log_map": num(lm) }));
    emit(
        &json!({
            "log_map": num(found.accepted.last().map_or(0.0, |a| a.log_map)),
            "motifs": motifs,
            "alignment": found.alignment,
            "rejected": rejected,
        }),
        out,
    )
}

pub fn divergence(
    kind: &ProfileKind,
    w_range: &str,
    c_range: &str,
    d: usize,
    with_max: bool,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let w = input::parse_w_range(w_range)?;
    let c = input::parse_c_range(c_range)?;
    let cells = df_grid(&c, &w, kind, d, with_max)?;
    match out {
        Some(p) => write_grid_csv(File::create(p)?, &cells, kind, with_max)?,
        None => write_grid_csv(io::stdout().lock(), &cells, kind, with_max)?,
    }
    Ok(())
}

pub fn sensitivity(
    counts: &Path,
    gamma: Option<&str>,
    epsilons: &[f64],
    grid_points: usize,
    kinds: &[Kind],
    out: &Path,
) -> anyhow::Result<()> {
    let cols = input::read_counts(counts, 4)?;
    let grid = DeltaGrid::evenly_spaced(grid_points)?;
    let composition = match gamma {
        Some(g) => input::parse_vector(g)?,
        None => {
            let mut tot = vec![0.0; 4];
            for c in &cols {
                for (t, &x) in tot.iter_mut().zip(c) {
                    *t += x as f64;
                }
            }
            tot
        }
    };
    fs::create_dir_all(out)?;
    let mut summary = Vec::new();
    for &k in kinds {
        let kind = match k {
            Kind::Equal => PriorKind::Equal,
            Kind::Data => PriorKind::Data(composition.clone()),
            Kind::Mix3 => PriorKind::Mix3,
            Kind::Mix9 => PriorKind::Mix9,
        };
        let base = kind.mixture(4)?;
        for &eps in epsilons {
            let rep = delta_grid_profile_named(&cols, &base, &grid, eps, kind.name())?;
            let path = out.join(format!("{}_eps{}.csv", kind.name(), fmt_sig(eps, 12)));
            write_report_csv(File::create(path)?, std::slice::from_ref(&rep))?;
            summary.push(json!({
                "prior": rep.prior,
                "epsilon": num(eps),
                "log_map_min": num(rep.log_map_min),
                "log_map_max": num(rep.log_map_max),
                "log_map_range": num(rep.log_map_range()),
                "d_m": num(rep.d_m),
                "d_k": num(rep.d_k),
                "d_e": num(rep.d_e),
            }));
        }
    }
    let summary = Value::Array(summary);
    emit(&summary, Some(&out.join("summary.json")))?;
    emit(&summary, None)
}

pub fn oracle(fasta: &Path, widths: &[usize], priors: Option<&Path>, cap: u128, alphabet: &str) -> anyhow::Result<()> {
    let alpha = Alphabet::new(alphabet)?;
    let seq = input::read_fasta(fasta, &alpha)?;
    let priors = input::load_priors(priors, alpha.size(), widths.len())?;
    let numerator = exact_bayes_numerator(&seq, &priors, widths, cap)?;
    let null = null_log_marginal(&seq.letter_counts(), &priors.alpha)?;
    emit(
        &json!({
            "alignments": count_alignments(&seq, widths).to_string(),
            "log_numerator": num(numerator),
            "log_null": num(null),
            "log_bayes_factor": num(numerator - null),
        }),
        None,
    )?;
    io::stdout().flush()?;
    Ok(())
}
