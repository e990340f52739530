//! Per-prime verification over a range of good primes, with split-prime
//! candidates resolved against the character learned from unambiguous primes.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::CurveModel;
use crate::ecmatch::{ap_from_psi, EllipticAp};
use crate::ff::is_prime;
use crate::imstruct::{
    character_consistency, check_inert, conjugation_check, extract_psi_inert, extract_psi_split, learn_character,
    shortcut_pipeline, split_cubic_factors, table_agrees, CharacterConsistencyReport, HeckeKind, HeckeValue, ImError,
    DEFAULT_MAX_MODULUS,
};
use crate::lpoly::LPolynomial;
use crate::quadfield::{ImagQuadField, QuadInt, SplitType};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub primes_up_to: u64,
    pub shortcut: bool,
    pub workers: Option<usize>,
    pub max_modulus: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            primes_up_to: 100,
            shortcut: false,
            workers: None,
            max_modulus: DEFAULT_MAX_MODULUS,
        }
    }
}

/// Worker count from `IMT_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var("IMT_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// `psi = x + y omega` stored as `(x, y, d)`.
pub type PsiTriple = [i64; 3];

/// A learned table is trusted for resolution only when each residue was
/// seen this many times on average.
pub const MIN_TABLE_DENSITY: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub split_type: String,
    pub n1: u64,
    pub n2: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n3: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a3: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_p: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_conj: Option<PsiTriple>,
    /// Number of exactly verified conjugate factor pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_pairs: Option<usize>,
    /// Distinct values of `psi` across those pairs, when there is more than one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub psi_candidates: Vec<PsiTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Resolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_p: Option<i64>,
    pub verdicts: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    /// A single verified pair.
    Unique,
    /// Several values; exactly one agrees with the learned character table.
    Character,
    /// Several pairs that the character does not separate.
    Unresolved,
}

impl PrimeRecord {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.verdicts.values().all(|&v| v)
    }

    /// Recomputes the verdicts that depend only on stored fields.
    pub fn self_check(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let p = self.p as i128;
        if let Some(a) = self.a_p {
            let ok = match self.split_type.as_str() {
                "inert" => a == 0,
                _ => i128::from(a) * i128::from(a) <= 4 * p,
            };
            if ok != self.verdicts.get("trace_rule").copied().unwrap_or(ok) {
                bad.push("trace_rule".into());
            }
        }
        if let Some(t) = self.t_p {
            let ok = self.a1 == Some(0) && self.a3 == Some(0) && i128::from(t).abs() <= 2 * p;
            if ok != self.verdicts.get("inert_factorization").copied().unwrap_or(ok) {
                bad.push("inert_factorization".into());
            }
        }
        bad
    }
}

pub fn psi_triple(m: &ImagQuadField, q: &QuadInt) -> PsiTriple {
    let x = i64::try_from(&q.x).expect("psi fits in i64");
    let y = i64::try_from(&q.y).expect("psi fits in i64");
    [x, y, m.d() as i64]
}

pub fn psi_from_triple(t: &PsiTriple) -> QuadInt {
    QuadInt::new(t[0], t[1])
}

#[derive(Clone, Debug)]
struct Candidate {
    psi: HeckeValue,
    conj: HeckeValue,
}

struct Stage {
    record: PrimeRecord,
    candidates: Vec<Candidate>,
    elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<PrimeRecord>,
    pub timings: Vec<(u64, Duration)>,
    pub character: Option<CharacterConsistencyReport>,
}

impl RunOutput {
    pub fn violation_count(&self) -> usize {
        self.records.iter().filter(|r| !r.is_clean()).count()
    }

    pub fn hecke_values(&self) -> Vec<HeckeValue> {
        self.records
            .iter()
            .filter_map(|r| {
                let kind = match r.split_type.as_str() {
                    "split" => HeckeKind::Split,
                    _ => return None,
                };
                r.psi.map(|t| HeckeValue {
                    p: r.p,
                    kind,
                    psi: psi_from_triple(&t),
                })
            })
            .collect()
    }

    pub fn elliptic_aps(&self) -> Vec<EllipticAp> {
        self.records
            .iter()
            .filter_map(|r| r.a_p.map(|a_p| EllipticAp { p: r.p, a_p }))
            .collect()
    }
}

pub fn good_primes(c: &CurveModel, up_to: u64) -> Vec<u64> {
    (2..=up_to).filter(|&p| is_prime(p) && !c.is_listed_bad(p)).collect()
}

fn lpoly_fields(r: &mut PrimeRecord, l: &LPolynomial) {
    r.a1 = Some(l.a1);
    r.a2 = Some(l.a2);
    r.a3 = Some(l.a3);
}

fn analyze(c: &CurveModel, m: &ImagQuadField, p: u64, shortcut: bool) -> Stage {
    let start = Instant::now();
    let split = m.split_type(p);
    let mut r = PrimeRecord {
        p,
        split_type: split.label().to_string(),
        n1: 0,
        n2: 0,
        n3: None,
        a1: None,
        a2: None,
        a3: None,
        t_p: None,
        psi: None,
        psi_conj: None,
        factor_pairs: None,
        psi_candidates: Vec::new(),
        resolution: None,
        a_p: None,
        verdicts: BTreeMap::new(),
        violations: Vec::new(),
    };
    let mut candidates = Vec::new();

    if split == SplitType::Inert && shortcut {
        match shortcut_pipeline(c, m, p) {
            Ok(out) => {
                r.n1 = out.counts[0];
                r.n2 = out.counts[1];
                lpoly_fields(&mut r, &out.lpoly);
                r.verdicts.insert("weil".into(), true);
                inert_tail(&mut r, m, Ok(out.factorization));
            }
            Err(e) => {
                if let Ok([n1, n2]) = c.count_pair(p) {
                    r.n1 = n1;
                    r.n2 = n2;
                }
                r.verdicts.insert("inert_factorization".into(), false);
                r.violations.push(e.to_string());
            }
        }
        return Stage {
            record: r,
            candidates,
            elapsed: start.elapsed(),
        };
    }

    let counts = match c.count_triple(p) {
        Ok(pc) => pc,
        Err(e) => {
            r.violations.push(e.to_string());
            return Stage {
                record: r,
                candidates,
                elapsed: start.elapsed(),
            };
        }
    };
    r.n1 = counts.n[0];
    r.n2 = counts.n[1];
    r.n3 = Some(counts.n[2]);
    let l = match LPolynomial::from_counts(&counts) {
        Ok(l) => l,
        Err(e) => {
            r.verdicts.insert("weil".into(), false);
            r.violations.push(e.to_string());
            return Stage {
                record: r,
                candidates,
                elapsed: start.elapsed(),
            };
        }
    };
    r.verdicts.insert("weil".into(), true);
    lpoly_fields(&mut r, &l);

    match split {
        SplitType::Inert => inert_tail(&mut r, m, check_inert(&l, p)),
        SplitType::Split { .. } => match split_cubic_factors(&l, m) {
            Ok(pairs) => {
                let mut reasons = Vec::new();
                for pair in &pairs {
                    let h = extract_psi_split(p, &pair.factor, m);
                    let hc = extract_psi_split(p, &pair.conjugate, m);
                    match (h, hc) {
                        (Ok(h), Ok(hc)) if conjugation_check(&h, &hc, m) => {
                            candidates.push(Candidate { psi: h, conj: hc })
                        }
                        (Ok(_), Ok(_)) => reasons.push("conjugation".to_string()),
                        (Err(e), _) | (_, Err(e)) => reasons.push(e.to_string()),
                    }
                }
                r.factor_pairs = Some(candidates.len());
                // pairs sharing psi differ only in u, v
                let mut seen: Vec<QuadInt> = Vec::new();
                candidates.retain(|k: &Candidate| {
                    let fresh = !seen.contains(&k.psi.psi);
                    seen.push(k.psi.psi.clone());
                    fresh
                });
                r.verdicts.insert("cubic_factor".into(), !candidates.is_empty());
                if candidates.is_empty() {
                    r.violations.extend(reasons);
                }
            }
            Err(e) => {
                r.verdicts.insert("cubic_factor".into(), false);
                r.violations.push(e.to_string());
            }
        },
        SplitType::Ramified => {}
    }
    Stage {
        record: r,
        candidates,
        elapsed: start.elapsed(),
    }
}

fn inert_tail(r: &mut PrimeRecord, m: &ImagQuadField, fact: Result<crate::imstruct::InertFactorization, ImError>) {
    match fact.and_then(|f| extract_psi_inert(&f, m).map(|h| (f, h))) {
        Ok((f, h)) => {
            r.t_p = Some(f.t);
            r.verdicts.insert("inert_factorization".into(), true);
            match ap_from_psi(&h, m) {
                Ok(ap) => {
                    r.a_p = Some(ap.a_p);
                    r.verdicts.insert("trace_rule".into(), ap.a_p == 0);
                }
                Err(e) => r.violations.push(e.to_string()),
            }
        }
        Err(e) => {
            r.verdicts.insert("inert_factorization".into(), false);
            r.violations.push(e.to_string());
        }
    }
}

fn settle(r: &mut PrimeRecord, m: &ImagQuadField, c: &Candidate) {
    r.psi = Some(psi_triple(m, &c.psi.psi));
    r.psi_conj = Some(psi_triple(m, &c.conj.psi));
    r.verdicts.insert("conjugation".into(), true);
    match ap_from_psi(&c.psi, m) {
        Ok(ap) => {
            r.a_p = Some(ap.a_p);
            r.verdicts.insert("trace_rule".into(), true);
        }
        Err(e) => {
            r.verdicts.insert("trace_rule".into(), false);
            r.violations.push(e.to_string());
        }
    }
}

/// Verifies every good prime up to `opts.primes_up_to`, in ascending order.
pub fn run(c: &CurveModel, m: &ImagQuadField, opts: &RunOptions) -> Result<RunOutput, PipelineError> {
    let primes = good_primes(c, opts.primes_up_to);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers.or_else(workers_from_env) {
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;
    let stages: Vec<Stage> = pool.install(|| primes.par_iter().map(|&p| analyze(c, m, p, opts.shortcut)).collect());

    let base: Vec<HeckeValue> = stages
        .iter()
        .filter(|s| s.candidates.len() == 1)
        .map(|s| s.candidates[0].psi.clone())
        .collect();
    let learned = learn_character(&base, m, opts.max_modulus)
        .ok()
        .filter(|r| r.consistent && r.density() >= MIN_TABLE_DENSITY);

    let mut records = Vec::with_capacity(stages.len());
    let mut timings = Vec::with_capacity(stages.len());
    for Stage {
        mut record,
        candidates,
        elapsed,
    } in stages
    {
        match candidates.len() {
            0 => {}
            1 => {
                record.resolution = Some(Resolution::Unique);
                settle(&mut record, m, &candidates[0]);
            }
            _ => {
                record.psi_candidates = candidates.iter().map(|k| psi_triple(m, &k.psi.psi)).collect();
                let chosen = learned.as_ref().and_then(|table| {
                    let fits: Vec<Option<bool>> = candidates
                        .iter()
                        .map(|k| table_agrees(table, &k.psi, m).ok().flatten())
                        .collect();
                    let winners: Vec<usize> = (0..fits.len()).filter(|&i| fits[i] == Some(true)).collect();
                    let rejected = fits.iter().filter(|f| **f == Some(false)).count();
                    (winners.len() == 1 && rejected + 1 == fits.len()).then(|| winners[0])
                });
                match chosen {
                    Some(i) => {
                        record.resolution = Some(Resolution::Character);
                        settle(&mut record, m, &candidates[i]);
                    }
                    None => record.resolution = Some(Resolution::Unresolved),
                }
            }
        }
        timings.push((record.p, elapsed));
        records.push(record);
    }

    let out = RunOutput {
        records,
        timings,
        character: None,
    };
    let character = character_consistency(&out.hecke_values(), m, opts.max_modulus).ok();
    Ok(RunOutput { character, ..out })
}
