//! `motifmap` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 refused as too large,
//! 4 numeric domain violation.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use motifmap::ErrorKind;

#[derive(Parser)]
#[command(name = "motifmap", version, about = "MAP model selection for stochastic-dictionary motif models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an i.i.d. background with planted motif sites.
    ///
    /// Writes `<out>.fasta` and `<out>.truth.json`.
    Simulate {
        #[arg(long)]
        n: usize,
        /// Background letter frequencies, comma separated.
        #[arg(long, default_value = "0.25,0.25,0.25,0.25")]
        theta0: String,
        /// `W:C:K` (width, sites per letter, comma-separated composition) or
        /// `PATH:C` for a PWM JSON file. Repeat for several motif types.
        #[arg(long)]
        motif: Vec<String>,
        /// Plant one fixed consensus per motif instead of sampling each site.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "ACGT")]
        alphabet: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score one alignment: logMAP, its components, AIC, BIC and KLI.
    Score {
        #[arg(long)]
        fasta: PathBuf,
        /// Alignment JSON: `{"sites": [...], "widths": [...]}`, or a truth
        /// or discovery file.
        #[arg(long, required_unless_present = "null_align")]
        alignment: Option<PathBuf>,
        /// Motif widths; overrides widths found in the alignment file.
        #[arg(long, value_delimiter = ',')]
        widths: Vec<usize>,
        /// Prior JSON; defaults to unit word pseudo-counts and gamma = 1/d.
        #[arg(long)]
        priors: Option<PathBuf>,
        /// Score the empty alignment.
        #[arg(long)]
        null_align: bool,
        #[arg(long, default_value = "ACGT")]
        alphabet: String,
    },
    /// Progressive motif discovery by data augmentation.
    Discover {
        #[arg(long)]
        fasta: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        widths: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        max_motifs: usize,
        #[arg(long, default_value_t = 5000)]
        iters: usize,
        #[arg(long, default_value_t = 1000)]
        burnin: usize,
        #[arg(long, default_value_t = 5)]
        chains: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        priors: Option<PathBuf>,
        #[arg(long, default_value = "ACGT")]
        alphabet: String,
        /// Write the JSON result here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid of the MAP divergence factor over motif proportion and width.
    Divergence {
        #[arg(long, value_enum, default_value_t = Profile::Symmetric)]
        profile: Profile,
        /// Background frequencies for a custom profile.
        #[arg(long)]
        theta0: Option<String>,
        /// Motif composition for a custom profile.
        #[arg(long)]
        k: Option<String>,
        /// `START:END` widths (step 1) or a single width.
        #[arg(long, default_value = "2:50")]
        w_range: String,
        /// `START:END:STEP` proportions or a single value.
        #[arg(long, default_value = "0.001:0.1:0.001")]
        c_range: String,
        #[arg(long, default_value_t = 4)]
        d: usize,
        /// Add the closed-form maximum as a column.
        #[arg(long)]
        max: bool,
        /// CSV destination; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contaminated-prior sensitivity of a motif count matrix over the delta grid.
    Sensitivity {
        /// CSV of motif column counts, one column per row, letters A,C,G,T.
        #[arg(long)]
        counts: PathBuf,
        /// Composition for the `data` prior; defaults to the counts' own.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        epsilon: Vec<f64>,
        #[arg(long, default_value_t = 99)]
        grid_points: usize,
        #[arg(long = "prior-kind", value_enum, value_delimiter = ',', default_value = "equal,mix3,mix9")]
        prior_kind: Vec<Kind>,
        /// Output directory for per-(prior, epsilon) CSVs and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact Bayes-factor numerator by enumerating every alignment.
    Oracle {
        #[arg(long)]
        fasta: PathBuf,
        #[arg(long, value_delimiter = ',')]
        widths: Vec<usize>,
        #[arg(long)]
        priors: Option<PathBuf>,
        /// Refuse instances with more alignments than this.
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
        #[arg(long, default_value = "ACGT")]
        alphabet: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Symmetric,
    Repeat,
    Custom,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
pub(crate) enum Kind {
    Equal,
    Data,
    Mix3,
    Mix9,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("MOTIFMAP_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| motifmap::Error::InvalidConfig(format!("MOTIFMAP_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Simulate { n, theta0, motif, exact, seed, alphabet, out } => {
            commands::simulate(n, &theta0, &motif, exact, seed, &alphabet, &out)
        }
        Command::Score { fasta, alignment, widths, priors, null_align, alphabet } => {
            commands::score(&fasta, alignment.as_deref(), &widths, priors.as_deref(), null_align, &alphabet)
        }
        Command::Discover { fasta, widths, max_motifs, iters, burnin, chains, seed, priors, alphabet, out } => {
            let run = commands::DiscoverRun { widths, max_motifs, iters, burnin, chains, seed };
            commands::discover(&fasta, run, priors.as_deref(), &alphabet, out.as_deref())
        }
        Command::Divergence { profile, theta0, k, w_range, c_range, d, max, out } => {
            let kind = match profile {
                Profile::Symmetric => motifmap::asymptotics::ProfileKind::Symmetric,
                Profile::Repeat => motifmap::asymptotics::ProfileKind::Repeat,
                Profile::Custom => {
                    let need = |v: Option<String>, name: &str| {
                        v.ok_or_else(|| motifmap::Error::InvalidConfig(format!("custom profile needs --{name}")))
                    };
                    motifmap::asymptotics::ProfileKind::Custom {
                        theta0: input::parse_vector(&need(theta0, "theta0")?)?,
                        k: input::parse_vector(&need(k, "k")?)?,
                    }
                }
            };
            commands::divergence(&kind, &w_range, &c_range, d, max, out.as_deref())
        }
        Command::Sensitivity { counts, gamma, epsilon, grid_points, prior_kind, out } => {
            commands::sensitivity(&counts, gamma.as_deref(), &epsilon, grid_points, &prior_kind, &out)
        }
        Command::Oracle { fasta, widths, priors, cap, alphabet } => {
            commands::oracle(&fasta, &widths, priors.as_deref(), cap, &alphabet)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<motifmap::Error>().map(|e| e.kind()) {
        Some(ErrorKind::Resource) => 3,
        Some(ErrorKind::Numeric) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
