//! Subcommand bodies. Each returns what to print and the exit status so the
//! binary stays a thin wrapper.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use imt_core::diffsig::{act, differential_basis, SigError};
use imt_core::ecmatch::{find_matching_curve, EcError, WeierstrassCurve};
use imt_core::imstruct::{check_inert, shortcut_pipeline};
use imt_core::lpoly::LPolynomial;
use imt_core::pipeline::{good_primes, run, PipelineError, RunOptions, RunOutput};
use imt_core::quadfield::{class_number, enumerate_class_number_one, QuadError, SplitType};

use crate::output::{self, Mismatch, OutputError};
use crate::spec::{CurveSpec, SpecError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error(transparent)]
    Ec(#[from] EcError),
    #[error("spec has no automorphism field")]
    NoAutomorphism,
    #[error("{0}")]
    Usage(String),
}

/// Text for stdout and stderr plus the exit status.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_spec(path: &Path) -> Result<CurveSpec, CliError> {
    Ok(CurveSpec::parse(&read(path)?)?)
}

pub fn run_spec(spec: &CurveSpec, primes_up_to: u64, shortcut: bool) -> Result<RunOutput, CliError> {
    let opts = RunOptions {
        primes_up_to,
        shortcut,
        ..RunOptions::default()
    };
    Ok(run(&spec.curve()?, &spec.field()?, &opts)?)
}

pub fn render_run(spec: &CurveSpec, out: &RunOutput, primes_up_to: u64, shortcut: bool) -> String {
    let header = output::header_for(&spec.name, spec.d, primes_up_to, shortcut);
    output::render(&header, out)
}

fn violation_summary(out: &RunOutput) -> String {
    let items: Vec<serde_json::Value> = out
        .records
        .iter()
        .filter(|r| !r.is_clean())
        .map(|r| {
            let failed: Vec<&String> = r.verdicts.iter().filter(|(_, v)| !**v).map(|(k, _)| k).collect();
            serde_json::json!({ "p": r.p, "failed": failed, "reasons": r.violations })
        })
        .collect();
    serde_json::json!({ "violations": items.len(), "primes": items }).to_string()
}

pub fn cmd_run(spec_path: &Path, primes_up_to: u64, shortcut: bool, out: Option<&Path>) -> Result<Outcome, CliError> {
    let spec = load_spec(spec_path)?;
    let result = run_spec(&spec, primes_up_to, shortcut)?;
    let text = render_run(&spec, &result, primes_up_to, shortcut);
    let mut o = Outcome::default();
    match out {
        Some(path) => write(path, &text)?,
        None => o.stdout = text,
    }
    if result.violation_count() > 0 {
        o.stderr = violation_summary(&result) + "\n";
        o.code = 1;
    }
    Ok(o)
}

pub fn cmd_verify(
    spec_path: &Path,
    golden_path: &Path,
    primes_up_to: Option<u64>,
    shortcut: Option<bool>,
) -> Result<Outcome, CliError> {
    let spec = load_spec(spec_path)?;
    let golden = read(golden_path)?;
    let header = output::read_header(&golden)?;
    let p = primes_up_to.unwrap_or(header.primes_up_to);
    let sc = shortcut.unwrap_or(header.shortcut);
    let result = run_spec(&spec, p, sc)?;
    let text = render_run(&spec, &result, p, sc);
    Ok(match output::compare(&golden, &text) {
        Ok(()) => Outcome {
            stdout: format!("identical: {} records\n", result.records.len()),
            ..Outcome::default()
        },
        Err(m) => mismatch(m),
    })
}

fn mismatch(m: Mismatch) -> Outcome {
    Outcome {
        stdout: format!("{m}\n"),
        stderr: String::new(),
        code: 1,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub p: u64,
    pub full: Duration,
    pub shortcut: Duration,
}

/// Times the full three-count path and the two-count shortcut at every
/// inert good prime. Each path is run `repeats` times and the minimum kept.
pub fn bench_rows(spec: &CurveSpec, primes_up_to: u64, repeats: usize) -> Result<Vec<BenchRow>, CliError> {
    let c = spec.curve()?;
    let m = spec.field()?;
    let mut rows = Vec::new();
    for p in good_primes(&c, primes_up_to) {
        if m.split_type(p) != SplitType::Inert {
            continue;
        }
        let mut full = Duration::MAX;
        let mut short = Duration::MAX;
        for _ in 0..repeats.max(1) {
            let t = Instant::now();
            let ok = c
                .count_triple(p)
                .ok()
                .and_then(|pc| LPolynomial::from_counts(&pc).ok())
                .map(|l| check_inert(&l, p).is_ok());
            full = full.min(t.elapsed());
            let t = Instant::now();
            let ok2 = shortcut_pipeline(&c, &m, p).is_ok();
            short = short.min(t.elapsed());
            if ok != Some(true) || !ok2 {
                break;
            }
        }
        rows.push(BenchRow {
            p,
            full,
            shortcut: short,
        });
    }
    Ok(rows)
}

pub fn aggregate_ratio(rows: &[BenchRow]) -> Option<f64> {
    let full: f64 = rows.iter().map(|r| r.full.as_secs_f64()).sum();
    let short: f64 = rows.iter().map(|r| r.shortcut.as_secs_f64()).sum();
    (short > 0.0).then(|| full / short)
}

pub fn cmd_bench(spec_path: &Path, primes_up_to: u64) -> Result<Outcome, CliError> {
    let spec = load_spec(spec_path)?;
    let rows = bench_rows(&spec, primes_up_to, 1)?;
    let mut o = Outcome::default();
    o.stdout.push_str("p,full_us,shortcut_us,ratio\n");
    for r in &rows {
        let ratio = r.full.as_secs_f64() / r.shortcut.as_secs_f64().max(1e-9);
        let _ = writeln!(
            o.stdout,
            "{},{},{},{:.2}",
            r.p,
            r.full.as_micros(),
            r.shortcut.as_micros(),
            ratio
        );
    }
    match aggregate_ratio(&rows) {
        Some(ratio) => {
            let full: u128 = rows.iter().map(|r| r.full.as_micros()).sum();
            let short: u128 = rows.iter().map(|r| r.shortcut.as_micros()).sum();
            let _ = writeln!(o.stdout, "total,{full},{short},{ratio:.2}");
        }
        None => o.stderr = format!("warning: no inert good primes up to {primes_up_to}\n"),
    }
    Ok(o)
}

pub fn cmd_signature(spec_path: &Path) -> Result<Outcome, CliError> {
    let spec = load_spec(spec_path)?;
    let c = spec.curve()?;
    let a = spec.monomial_automorphism()?.ok_or(CliError::NoAutomorphism)?;
    let basis = match spec.user_basis() {
        Some(b) => b,
        None => differential_basis(&c)?,
    };
    let r = act(&a, &c, &basis)?;
    let join = |v: Vec<String>| v.join(", ");
    let mut s = String::new();
    let _ = writeln!(s, "curve: {}", spec.name);
    let _ = writeln!(s, "automorphism: (x, y) -> ({} x, {} y)", a.zeta_x, a.zeta_y);
    let _ = writeln!(s, "basis: {}", join(basis.iter().map(|w| w.to_string()).collect()));
    let _ = writeln!(
        s,
        "eigenvalues: {}",
        join(r.eigenvalues.iter().map(|z| z.to_string()).collect())
    );
    match r.signature {
        Some((a, b)) => {
            let _ = writeln!(s, "signature: ({a}, {b})");
        }
        None => {
            let _ = writeln!(s, "signature: none");
        }
    }
    let _ = writeln!(s, "algebra: {}", r.generated_algebra);
    let _ = writeln!(s, "unital: {}", r.unital);
    let _ = writeln!(s, "verdict: {}", r.verdict());
    Ok(Outcome {
        stdout: s,
        ..Outcome::default()
    })
}

pub fn cmd_classnum(disc: Option<i64>, enumerate_bound: Option<u64>) -> Result<Outcome, CliError> {
    let mut s = String::from("disc,h\n");
    match (disc, enumerate_bound) {
        (Some(d), None) => {
            let r = class_number(d)?;
            let _ = writeln!(s, "{},{}", r.disc, r.h);
        }
        (None, Some(b)) => {
            let found = enumerate_class_number_one(b);
            for d in &found {
                let _ = writeln!(s, "{d},1");
            }
            let _ = writeln!(s, "# {} fields", found.len());
        }
        _ => return Err(CliError::Usage("give exactly one of --disc or --enumerate-h1".into())),
    }
    Ok(Outcome {
        stdout: s,
        ..Outcome::default()
    })
}

pub fn render_survivors(found: &[WeierstrassCurve]) -> String {
    let mut s = String::from("a,b\n");
    for e in found {
        let _ = writeln!(s, "{},{}", e.a, e.b);
    }
    s
}

pub fn cmd_match_ec(
    results_path: &Path,
    coeff_bound: i64,
    prime_bound: u64,
    candidates: Option<&Path>,
) -> Result<Outcome, CliError> {
    let text = read(results_path)?;
    let records = output::read_records(&text)?;
    let aps: Vec<_> = records
        .iter()
        .filter_map(|r| r.a_p.map(|a_p| imt_core::ecmatch::EllipticAp { p: r.p, a_p }))
        .collect();
    let found = find_matching_curve(&aps, coeff_bound, prime_bound)?;
    let body = render_survivors(&found);
    let mut o = Outcome::default();
    match candidates {
        Some(path) => {
            write(path, &body)?;
            o.stdout = format!("{} survivors\n", found.len());
        }
        None => o.stdout = body,
    }
    Ok(o)
}
