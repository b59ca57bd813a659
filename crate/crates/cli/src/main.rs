//! hecke-lab: runs the library's lemma sweeps, theorem witnesses and
//! structure computations from the command line.
//!
//! Exit codes: 0 every check passed, 1 a check failed, 2 usage or
//! hypothesis error, 3 precision exhausted.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_core::harness::{CaseName, ExceptRegime, Slope};
use hecke_core::Error;

use report::{write_out, Format};

/// Caps the worker pool used for parallel sweeps.
const THREADS_ENV: &str = "HECKE_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "hecke-lab", version, about = "Verification runs for Hecke-operator witness computations")]
struct Cli {
    #[command(flatten)]
    out: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compare the report with this file; a difference is a failed check.
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
}

/// Arithmetic universe and weights shared by most commands.
#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 3)]
    pub p: u32,
    #[arg(long, default_value_t = 2)]
    pub f: usize,
    /// Precision: arithmetic is modulo p^N.
    #[arg(long = "N", default_value_t = 6)]
    pub n: u32,
    /// Ramification index of the coefficient ring when no slope fixes it.
    #[arg(long, default_value_t = 1)]
    pub e: u32,
    /// A single weight r_0,…,r_{f−1}.
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<u32>>,
    /// Lower end of the weight box.
    #[arg(long)]
    pub rmin: Option<u32>,
    /// Upper end of the weight box.
    #[arg(long)]
    pub rmax: Option<u32>,
    /// v(a_p) as exact fractions c/e, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_slope)]
    pub slope: Vec<Slope>,
    /// Unit part u of a_p = π^c·u.
    #[arg(long, default_value_t = 1)]
    pub unit: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_slope(s: &str) -> Result<Slope, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep one lemma over its parameter range.
    VerifyLemma {
        lemma: Lemma,
        #[command(flatten)]
        common: Common,
        /// Random trials (or sampled weights) for randomized lemmas.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Build a theorem's witness and check that (T − a_p) of it factors as claimed.
    VerifyTheorem {
        case: Case,
        #[command(flatten)]
        common: Common,
        /// Force an exceptional-case regime instead of the default one.
        #[arg(long, value_enum)]
        regime: Option<Regime>,
        /// At most this many cases from the weight box.
        #[arg(long)]
        limit: Option<usize>,
        /// Level-1 vertices expanded by T⁺ when q > 9.
        #[arg(long, default_value_t = 3)]
        spot_checks: usize,
    },
    /// Dimensions and radical layers of V_r/(V_r* + X_r).
    Structure {
        #[command(flatten)]
        common: Common,
    },
    /// Apply T (or T − a_p) to one elementary function [g, X^{r−j}Y^j].
    HeckeApply {
        #[command(flatten)]
        common: Common,
        /// Y-exponents j of the monomial.
        #[arg(long, value_delimiter = ',')]
        j: Vec<u32>,
        /// Vertex: id, alpha, plus:d1,d2,… or minus:d1,d2,… (digit indices in F_q).
        #[arg(long, default_value = "id")]
        rep: String,
    },
    /// List the weights and slopes in a box satisfying a theorem's hypotheses.
    FindCases {
        case: Case,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Lemma {
    Binomialsum,
    Gbinomialsum,
    Vanishing,
    XrIso,
    EqsolKernel,
    Xrinkernel,
    Thetainkernel,
    CoeffFormula,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Case {
    Requivzero,
    Nonexcep,
    #[value(alias = "thmexcept")]
    Except,
    Middle1,
    Middle2,
    Gmiddle1,
    Gmiddle2,
}

impl Case {
    pub fn name(self) -> CaseName {
        match self {
            Case::Requivzero => CaseName::RequivZero,
            Case::Nonexcep => CaseName::NonExcep,
            Case::Except => CaseName::Except,
            Case::Middle1 => CaseName::Middle1,
            Case::Middle2 => CaseName::Middle2,
            Case::Gmiddle1 => CaseName::GMiddle1,
            Case::Gmiddle2 => CaseName::GMiddle2,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Regime {
    DividesRh,
    SmallSlope,
    LargeSlope,
}

impl Regime {
    pub fn get(self) -> ExceptRegime {
        match self {
            Regime::DividesRh => ExceptRegime::DividesRh,
            Regime::SmallSlope => ExceptRegime::SmallSlope,
            Regime::LargeSlope => ExceptRegime::LargeSlope,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted(_) => 3,
        Error::InvalidInput(_) | Error::Hypothesis(_) | Error::WeightBound(_) | Error::Unsupported(_) => 2,
        _ => 1,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::VerifyLemma { lemma, common, trials } => commands::verify_lemma(lemma, &common, trials),
        Command::VerifyTheorem { case, common, regime, limit, spot_checks } => {
            commands::verify_theorem(case, &common, regime, limit, spot_checks)
        }
        Command::Structure { common } => commands::structure(&common),
        Command::HeckeApply { common, j, rep } => commands::hecke_apply(&common, &j, &rep),
        Command::FindCases { case, common } => commands::find(case, &common),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::PrecisionExhausted(_)) {
                eprintln!("hint: raise the precision with --N");
            }
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match report.render(cli.out.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write_out(&text, cli.out.out.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    let mut ok = report.pass;
    if let Some(path) = &cli.out.golden {
        match std::fs::read_to_string(path) {
            Ok(want) if want == text => {}
            Ok(_) => {
                eprintln!("golden mismatch: {}", path.display());
                ok = false;
            }
            Err(e) => {
                eprintln!("error: cannot read golden file {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::from(if ok { 0 } else { 1 })
}
