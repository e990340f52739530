//! Curve spec files: `key: value` lines, `#` comments, blank lines.
//!
//! ```text
//! format: 1
//! name: d1
//! model: hyperelliptic
//! coefficients: 0, 1, 0, 1, 0, -1, 0, 1
//! d: 1
//! bad_primes: 2, 11
//! automorphism: 1/2, 1/4
//! ```
//!
//! Polynomial coefficients are ascending by degree. Quartic coefficients
//! follow [`QUARTIC_MONOMIALS`]. An automorphism is `(x, y) -> (zeta_x x,
//! zeta_y y)` with each root written `num/order`. An optional `differentials`
//! line lists `i/j` for `x^i dx / y^j`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use imt_core::curves::{CurveError, CurveModel, QUARTIC_MONOMIALS};
use imt_core::diffsig::{Differential, MonomialAutomorphism, RootOfUnity, SigError};
use imt_core::quadfield::{ImagQuadField, QuadError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{key}`: {msg}")]
    Field { key: String, msg: String },
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Sig(#[from] SigError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Hyperelliptic,
    Superelliptic,
    PlaneQuartic,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Hyperelliptic => "hyperelliptic",
            ModelKind::Superelliptic => "superelliptic",
            ModelKind::PlaneQuartic => "plane_quartic",
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hyperelliptic" => Ok(ModelKind::Hyperelliptic),
            "superelliptic" => Ok(ModelKind::Superelliptic),
            "plane_quartic" => Ok(ModelKind::PlaneQuartic),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Line {
    Blank,
    Comment(String),
    Field { key: String, value: String },
}

const KEYS: [&str; 9] = [
    "format",
    "name",
    "model",
    "coefficients",
    "m",
    "d",
    "bad_primes",
    "automorphism",
    "differentials",
];

/// A parsed spec. Keeps every line so formatting reproduces the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    lines: Vec<Line>,
    trailing_newline: bool,
    pub name: String,
    pub model: ModelKind,
    pub coefficients: Vec<BigInt>,
    pub m: Option<u32>,
    pub d: u64,
    pub bad_primes: Vec<u64>,
    pub automorphism: Option<((i64, u32), (i64, u32))>,
    pub differentials: Option<Vec<(u32, u32)>>,
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, SpecError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|t| {
            t.trim().parse::<T>().map_err(|_| SpecError::Field {
                key: key.into(),
                msg: format!("cannot parse `{}`", t.trim()),
            })
        })
        .collect()
}

fn ratio(key: &str, t: &str) -> Result<(i64, u32), SpecError> {
    let err = || SpecError::Field {
        key: key.into(),
        msg: format!("expected num/order, got `{}`", t.trim()),
    };
    let (a, b) = t.trim().split_once('/').ok_or_else(err)?;
    Ok((
        a.trim().parse().map_err(|_| err())?,
        b.trim().parse().map_err(|_| err())?,
    ))
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

impl CurveSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut lines = Vec::new();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let t = raw.trim();
            if t.is_empty() {
                lines.push(Line::Blank);
            } else if t.starts_with('#') {
                lines.push(Line::Comment(raw.to_string()));
            } else {
                let (k, v) = t.split_once(':').ok_or_else(|| SpecError::Syntax {
                    line: i + 1,
                    msg: "expected `key: value`".into(),
                })?;
                let key = k.trim().to_string();
                if !KEYS.contains(&key.as_str()) {
                    return Err(SpecError::Syntax {
                        line: i + 1,
                        msg: format!("unknown key `{key}`"),
                    });
                }
                if seen.contains(&key) {
                    return Err(SpecError::Syntax {
                        line: i + 1,
                        msg: format!("duplicate key `{key}`"),
                    });
                }
                seen.push(key.clone());
                lines.push(Line::Field {
                    key,
                    value: v.trim().to_string(),
                });
            }
        }
        let mut spec = CurveSpec {
            lines,
            trailing_newline: text.ends_with('\n'),
            name: String::new(),
            model: ModelKind::Hyperelliptic,
            coefficients: Vec::new(),
            m: None,
            d: 0,
            bad_primes: Vec::new(),
            automorphism: None,
            differentials: None,
        };
        spec.load()?;
        Ok(spec)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find_map(|l| match l {
            Line::Field { key: k, value } if k == key => Some(value.as_str()),
            _ => None,
        })
    }

    fn load(&mut self) -> Result<(), SpecError> {
        let field = |key: &str, msg: String| SpecError::Field { key: key.into(), msg };
        let version: u32 = self
            .get("format")
            .ok_or(SpecError::Missing("format"))?
            .parse()
            .map_err(|_| field("format", "not an integer".into()))?;
        if version != FORMAT_VERSION {
            return Err(SpecError::Version(version));
        }
        self.name = self.get("name").ok_or(SpecError::Missing("name"))?.to_string();
        self.model = self
            .get("model")
            .ok_or(SpecError::Missing("model"))?
            .parse()
            .map_err(|e| field("model", e))?;
        self.coefficients = list(
            "coefficients",
            self.get("coefficients").ok_or(SpecError::Missing("coefficients"))?,
        )?;
        self.m = self
            .get("m")
            .map(|v| v.parse().map_err(|_| field("m", "not an integer".into())))
            .transpose()?;
        self.d = self
            .get("d")
            .ok_or(SpecError::Missing("d"))?
            .parse()
            .map_err(|_| field("d", "not a positive integer".into()))?;
        self.bad_primes = list(
            "bad_primes",
            self.get("bad_primes").ok_or(SpecError::Missing("bad_primes"))?,
        )?;
        self.automorphism = match self.get("automorphism") {
            None => None,
            Some(v) => {
                let parts: Vec<&str> = v.split(',').collect();
                if parts.len() != 2 {
                    return Err(field("automorphism", "expected `zeta_x, zeta_y`".into()));
                }
                Some((ratio("automorphism", parts[0])?, ratio("automorphism", parts[1])?))
            }
        };
        self.differentials = match self.get("differentials") {
            None => None,
            Some(v) => Some(
                v.split(',')
                    .map(|t| {
                        let (i, j) = ratio("differentials", t)?;
                        u32::try_from(i)
                            .map(|i| (i, j))
                            .map_err(|_| field("differentials", "negative exponent".into()))
                    })
                    .collect::<Result<_, _>>()?,
            ),
        };
        if self.model == ModelKind::Superelliptic && self.m.is_none() {
            return Err(SpecError::Missing("m"));
        }
        Ok(())
    }

    /// Builds a spec in canonical layout from typed fields.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        model: ModelKind,
        coefficients: Vec<BigInt>,
        m: Option<u32>,
        d: u64,
        bad_primes: Vec<u64>,
        automorphism: Option<((i64, u32), (i64, u32))>,
        comments: &[&str],
    ) -> Self {
        let mut lines: Vec<Line> = comments.iter().map(|c| Line::Comment(format!("# {c}"))).collect();
        let mut push = |k: &str, v: String| {
            lines.push(Line::Field {
                key: k.into(),
                value: v,
            })
        };
        push("format", FORMAT_VERSION.to_string());
        push("name", name.to_string());
        push("model", model.as_str().to_string());
        push("coefficients", join(&coefficients));
        if let Some(m) = m {
            push("m", m.to_string());
        }
        push("d", d.to_string());
        push("bad_primes", join(&bad_primes));
        if let Some(((a, b), (c, e))) = automorphism {
            push("automorphism", format!("{a}/{b}, {c}/{e}"));
        }
        CurveSpec {
            lines,
            trailing_newline: true,
            name: name.to_string(),
            model,
            coefficients,
            m,
            d,
            bad_primes,
            automorphism,
            differentials: None,
        }
    }

    pub fn curve(&self) -> Result<CurveModel, SpecError> {
        let c = self.coefficients.clone();
        let bad = self.bad_primes.clone();
        Ok(match self.model {
            ModelKind::Hyperelliptic => CurveModel::hyperelliptic(&self.name, c, bad)?,
            ModelKind::Superelliptic => {
                CurveModel::superelliptic(&self.name, self.m.ok_or(SpecError::Missing("m"))?, c, bad)?
            }
            ModelKind::PlaneQuartic => {
                if c.len() != QUARTIC_MONOMIALS.len() {
                    return Err(SpecError::Field {
                        key: "coefficients".into(),
                        msg: format!("plane quartic needs {} coefficients", QUARTIC_MONOMIALS.len()),
                    });
                }
                CurveModel::plane_quartic(&self.name, c, bad)?
            }
        })
    }

    pub fn field(&self) -> Result<ImagQuadField, SpecError> {
        Ok(ImagQuadField::new(self.d)?)
    }

    pub fn monomial_automorphism(&self) -> Result<Option<MonomialAutomorphism>, SpecError> {
        self.automorphism
            .map(|((a, b), (c, e))| {
                Ok(MonomialAutomorphism::new(
                    RootOfUnity::new(a, b)?,
                    RootOfUnity::new(c, e)?,
                )?)
            })
            .transpose()
    }

    pub fn user_basis(&self) -> Option<Vec<Differential>> {
        self.differentials
            .as_ref()
            .map(|v| v.iter().map(|&(i, j)| Differential { i, j }).collect())
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self
            .lines
            .iter()
            .map(|l| match l {
                Line::Blank => String::new(),
                Line::Comment(c) => c.clone(),
                Line::Field { key, value } if value.is_empty() => format!("{key}:"),
                Line::Field { key, value } => format!("{key}: {value}"),
            })
            .collect();
        write!(f, "{}", rendered.join("\n"))?;
        if self.trailing_newline {
            writeln!(f)?;
        }
        Ok(())
    }
}
