mod commands;
mod failure;
mod manifest;
mod measure;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Report;

/// Exact and Monte Carlo random walks on free solvable groups.
#[derive(Debug, Parser)]
#[command(name = "swalk", version)]
pub struct Cli {
    /// Emit a versioned JSON document instead of text or CSV.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Magnus image of a word: lamp configuration and base element.
    Embed(WordArgs),
    /// Edge flow of a word on the Cayley graph of the group.
    Flow(WordArgs),
    /// Decide whether two words agree modulo [N,N].
    Wp(WordProblemArgs),
    /// Return probabilities, exact or by Monte Carlo.
    ReturnProb(ReturnProbArgs),
    /// Check the three conditions for an exclusive pair.
    CheckExclusive(ExclusiveArgs),
    /// Evaluate a return-probability profile on a grid.
    Curves(CurvesArgs),
    /// The γ-function of a volume growth on a grid.
    Gamma(GammaArgs),
    /// Sphere and ball sizes in the word metric.
    Ball(BallArgs),
    /// Smallest Dirichlet eigenvalue on a ball or box.
    Dirichlet(DirichletArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
    /// Run every job of a JSON manifest, writing each output file.
    Manifest(ManifestArgs),
}

#[derive(Debug, Args)]
pub struct WordArgs {
    /// Group spec, e.g. zr:2, ll:2, bs:2, sdr:2,2, wr(zr:1, zr:2).
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Args)]
pub struct WordProblemArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub u: String,
    #[arg(long, default_value = "")]
    pub v: String,
}

#[derive(Debug, Args)]
pub struct ReturnProbArgs {
    #[arg(long)]
    pub group: String,
    /// lazy, simple, two-point:M, power-law:ALPHA[:CUTOFF], phi-lazy or sws:DEPTH.
    #[arg(long, default_value = "lazy")]
    pub measure: String,
    /// A number of steps N or a range A:B.
    #[arg(long)]
    pub n: String,
    /// Exact rational convolution.
    #[arg(long)]
    pub exact: bool,
    /// Monte Carlo estimate; needs --seed.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest support kept during exact convolution.
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: usize,
    /// Always print the CSV table, even for a single N.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct ExclusiveArgs {
    #[arg(long)]
    pub group: String,
    /// Subgroup generators separated by ';'.
    #[arg(long)]
    pub gamma: String,
    #[arg(long)]
    pub rho: String,
    /// Index of the letter s in rho = u s v.
    #[arg(long)]
    pub split_at: usize,
    /// Moduli m_1,…,m_r of the finite quotient criterion.
    #[arg(long)]
    pub m: Option<String>,
    /// Membership predicate for the image of Γ: full, even-t,
    /// sublattice:m1,m2,… or a registered name. Defaults to the predicate
    /// of H_m when --m is given and to full otherwise.
    #[arg(long)]
    pub predicate: Option<String>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// One of the profile families, e.g. metabelian or free-solvable.
    #[arg(long)]
    pub family: String,
    /// Comma-separated parameters of the family.
    #[arg(long, default_value = "")]
    pub params: String,
    /// Geometric grid A:B:STEPS.
    #[arg(long)]
    pub n_grid: String,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    /// power:D, stretched:ALPHA, tower or lift(C,INNER).
    #[arg(long)]
    pub volume: String,
    /// Geometric grid A:B:STEPS.
    #[arg(long)]
    pub t_grid: String,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub radius: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value = "lazy")]
    pub measure: String,
    /// Radius of the word-metric ball, or half-width of the box with --box.
    #[arg(long)]
    pub radius: usize,
    /// Use the coordinate box [-R,R]^r of a free abelian group.
    #[arg(long = "box")]
    pub coordinate_box: bool,
    #[arg(long, default_value_t = 1 << 20)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Run one criterion only.
    #[arg(long)]
    pub criterion: Option<u8>,
}

#[derive(Debug, Args)]
pub struct ManifestArgs {
    pub path: PathBuf,
}

/// Worker threads for Monte Carlo, from `SOLVWALK_THREADS`; 0 lets the
/// pool choose.
pub fn threads() -> anyhow::Result<usize> {
    match std::env::var("SOLVWALK_THREADS") {
        Ok(value) => value.trim().parse().map_err(|_| {
            failure::usage(format!("SOLVWALK_THREADS must be a count, got '{value}'"))
        }),
        Err(_) => Ok(0),
    }
}

pub fn run(command: Command) -> anyhow::Result<Report> {
    match command {
        Command::Embed(args) => commands::embed(&args),
        Command::Flow(args) => commands::flow(&args),
        Command::Wp(args) => commands::word_problem(&args),
        Command::ReturnProb(args) => commands::return_prob(&args),
        Command::CheckExclusive(args) => commands::check_exclusive(&args),
        Command::Curves(args) => commands::curves(&args),
        Command::Gamma(args) => commands::gamma(&args),
        Command::Ball(args) => commands::ball(&args),
        Command::Dirichlet(args) => commands::dirichlet(&args),
        Command::Selftest(args) => commands::selftest(&args),
        Command::Manifest(args) => manifest::run(&args.path),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() {
                failure::EXIT_PARSE
            } else {
                0
            });
        }
    };
    match run(cli.command) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(report.render(cli.json).as_bytes())
                .is_err()
            {
                return ExitCode::from(failure::EXIT_FAILURE);
            }
            ExitCode::from(report.status.exit_code())
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(failure::exit_code(&err))
        }
    }
}
