use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use imt_cli::commands::{self, CliError, Outcome};
use imt_core::ecmatch::{DEFAULT_COEFF_BOUND, DEFAULT_PRIME_BOUND};

#[derive(Parser)]
#[command(
    name = "imt",
    version,
    about = "Verify imaginary multiplication on genus 3 Jacobians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        matches!(s, Switch::On)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify every good prime up to a bound and write one record per prime.
    Run {
        spec: PathBuf,
        #[arg(long, default_value_t = 100)]
        primes_up_to: u64,
        #[arg(long, value_enum, default_value = "off")]
        shortcut: Switch,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate results and compare against a golden file.
    Verify {
        spec: PathBuf,
        golden: PathBuf,
        /// Defaults to the golden header's bound.
        #[arg(long)]
        primes_up_to: Option<u64>,
        /// Defaults to the golden header's setting.
        #[arg(long, value_enum)]
        shortcut: Option<Switch>,
    },
    /// Time the full and shortcut paths at inert primes.
    Bench {
        spec: PathBuf,
        #[arg(long, default_value_t = 300)]
        primes_up_to: u64,
    },
    /// Eigenvalues and signature of the spec's automorphism on differentials.
    Signature { spec: PathBuf },
    /// Class numbers of imaginary quadratic discriminants.
    Classnum {
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<i64>,
        #[arg(long, requires = "bound")]
        enumerate_h1: bool,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Search short Weierstrass models matching the traces in a results file.
    MatchEc {
        results: PathBuf,
        #[arg(long, default_value_t = DEFAULT_COEFF_BOUND)]
        coeff_bound: i64,
        #[arg(long, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
        /// Write survivors here instead of stdout.
        #[arg(long)]
        candidates: Option<PathBuf>,
    },
}

fn dispatch(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Run {
            spec,
            primes_up_to,
            shortcut,
            out,
        } => commands::cmd_run(&spec, primes_up_to, shortcut.into(), out.as_deref()),
        Command::Verify {
            spec,
            golden,
            primes_up_to,
            shortcut,
        } => commands::cmd_verify(&spec, &golden, primes_up_to, shortcut.map(Into::into)),
        Command::Bench { spec, primes_up_to } => commands::cmd_bench(&spec, primes_up_to),
        Command::Signature { spec } => commands::cmd_signature(&spec),
        Command::Classnum {
            disc,
            enumerate_h1,
            bound,
        } => commands::cmd_classnum(disc, if enumerate_h1 { bound } else { None }),
        Command::MatchEc {
            results,
            coeff_bound,
            prime_bound,
            candidates,
        } => commands::cmd_match_ec(&results, coeff_bound, prime_bound, candidates.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(o) => {
            print!("{}", o.stdout);
            eprint!("{}", o.stderr);
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
