//! Results files: a header line, one JSON record per prime, a summary line,
//! then a timing section that comparisons ignore.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use imt_core::pipeline::{PrimeRecord, RunOutput};

use crate::spec::FORMAT_VERSION;

pub const TIMING_MARKER: &str = r#"{"section":"timings"}"#;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("empty results file")]
    Empty,
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format: u32,
    pub curve: String,
    pub d: u64,
    pub primes_up_to: u64,
    pub shortcut: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub violations: usize,
    pub unresolved: usize,
    pub character_modulus: Option<u64>,
    pub character_samples: usize,
    pub character_table: usize,
}

#[derive(Serialize, Deserialize)]
struct SummaryLine {
    summary: Summary,
}

#[derive(Serialize)]
struct TimingLine {
    p: u64,
    us: u128,
}

pub fn summarize(out: &RunOutput) -> Summary {
    let ch = out.character.as_ref();
    Summary {
        records: out.records.len(),
        violations: out.violation_count(),
        unresolved: out
            .records
            .iter()
            .filter(|r| r.resolution == Some(imt_core::pipeline::Resolution::Unresolved))
            .count(),
        character_modulus: ch.and_then(|c| c.modulus),
        character_samples: ch.map_or(0, |c| c.samples),
        character_table: ch.map_or(0, |c| c.table.len()),
    }
}

pub fn render(header: &Header, out: &RunOutput) -> String {
    let mut s = String::new();
    let push = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    push(&mut s, serde_json::to_string(header).expect("header serializes"));
    for r in &out.records {
        push(&mut s, serde_json::to_string(r).expect("record serializes"));
    }
    let summary = SummaryLine {
        summary: summarize(out),
    };
    push(&mut s, serde_json::to_string(&summary).expect("summary serializes"));
    push(&mut s, TIMING_MARKER.to_string());
    for (p, t) in &out.timings {
        let line = TimingLine {
            p: *p,
            us: t.as_micros(),
        };
        push(&mut s, serde_json::to_string(&line).expect("timing serializes"));
    }
    s
}

pub fn header_for(name: &str, d: u64, primes_up_to: u64, shortcut: bool) -> Header {
    Header {
        format: FORMAT_VERSION,
        curve: name.to_string(),
        d,
        primes_up_to,
        shortcut,
    }
}

/// Lines before the timing section.
fn comparable(text: &str) -> Vec<&str> {
    text.lines().take_while(|l| *l != TIMING_MARKER).collect()
}

pub fn read_header(text: &str) -> Result<Header, OutputError> {
    let first = text.lines().next().ok_or(OutputError::Empty)?;
    serde_json::from_str(first).map_err(|source| OutputError::Json { line: 1, source })
}

pub fn read_records(text: &str) -> Result<Vec<PrimeRecord>, OutputError> {
    let lines = comparable(text);
    if lines.is_empty() {
        return Err(OutputError::Empty);
    }
    lines[1..]
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.starts_with(r#"{"summary""#))
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| OutputError::Json { line: i + 2, source }))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    Header {
        expected: String,
        actual: String,
    },
    Length {
        expected: usize,
        actual: usize,
    },
    Record {
        line: usize,
        p: Option<u64>,
        expected: String,
        actual: String,
    },
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mismatch::Header { expected, actual } => {
                write!(f, "header differs\n  golden: {expected}\n  actual: {actual}")
            }
            Mismatch::Length { expected, actual } => {
                write!(
                    f,
                    "length mismatch: golden has {expected} lines, regenerated has {actual}"
                )
            }
            Mismatch::Record {
                line,
                p,
                expected,
                actual,
            } => {
                match p {
                    Some(p) => write!(f, "first divergence at p = {p} (line {line})")?,
                    None => write!(f, "first divergence at line {line}")?,
                }
                write!(f, "\n  golden: {expected}\n  actual: {actual}")
            }
        }
    }
}

fn parse(line: &str) -> Option<Value> {
    serde_json::from_str(line).ok()
}

/// Compares two results files up to the timing section. Records must match
/// byte for byte, except that `n3` is ignored when either side lacks it.
/// The header's `shortcut` and `primes_up_to` are not compared; a different
/// bound shows up as a length mismatch.
pub fn compare(golden: &str, actual: &str) -> Result<(), Mismatch> {
    let g = comparable(golden);
    let a = comparable(actual);
    if let (Some(gh), Some(ah)) = (g.first(), a.first()) {
        let strip = |l: &str| {
            parse(l).map(|mut v| {
                if let Some(o) = v.as_object_mut() {
                    o.remove("shortcut");
                    o.remove("primes_up_to");
                }
                v
            })
        };
        if strip(gh) != strip(ah) || strip(gh).is_none() {
            return Err(Mismatch::Header {
                expected: gh.to_string(),
                actual: ah.to_string(),
            });
        }
    }
    if g.len() != a.len() {
        return Err(Mismatch::Length {
            expected: g.len(),
            actual: a.len(),
        });
    }
    for (i, (gl, al)) in g.iter().zip(&a).enumerate().skip(1) {
        if gl == al {
            continue;
        }
        let (gv, av) = (parse(gl), parse(al));
        let equal = match (gv.clone(), av.clone()) {
            (Some(mut x), Some(mut y)) => {
                let gn = x.get("n3").is_some();
                let an = y.get("n3").is_some();
                if gn != an {
                    if let Some(o) = x.as_object_mut() {
                        o.remove("n3");
                    }
                    if let Some(o) = y.as_object_mut() {
                        o.remove("n3");
                    }
                }
                x == y
            }
            _ => false,
        };
        if !equal {
            let p = gv.as_ref().and_then(|v| v.get("p")).and_then(Value::as_u64);
            return Err(Mismatch::Record {
                line: i + 1,
                p,
                expected: gl.to_string(),
                actual: al.to_string(),
            });
        }
    }
    Ok(())
}
