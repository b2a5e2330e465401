//! The destination set of a random field and its little parser.
//!
//! Grammar: `R` | `R>=0` | `R<=0` | `Z` | `Z\0` | `N` | `{a,b,...}` | `[lo,hi]`.
//! Only closed sets are representable; open or half-open intervals are
//! rejected at parse time because the realizability characterizations break
//! down on non-closed codomains.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Codomain {
    AllReals,
    NonNegReals,
    NonPosReals,
    Integers,
    NonzeroIntegers,
    /// Non-negative integers, zero included.
    Naturals,
    /// Two-point set `{a, b}` with `a < b`.
    TwoPoint(f64, f64),
    /// Closed bounded interval `[lo, hi]` with `lo < hi`.
    ClosedInterval(f64, f64),
    /// Finite set of at least one value, strictly sorted.
    FiniteSet(Vec<f64>),
}

#[derive(Debug, Error, PartialEq)]
pub enum CodomainError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("empty set")]
    EmptySet,
    #[error("interval requires lo < hi, got [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    #[error("non-finite literal {0}")]
    NonFinite(f64),
    #[error("two-point set requires distinct values, got {0}")]
    DegenerateTwoPoint(f64),
}

impl Codomain {
    /// Normalizing two-point constructor (orders the endpoints).
    pub fn two_point(a: f64, b: f64) -> Result<Self, CodomainError> {
        if !a.is_finite() {
            return Err(CodomainError::NonFinite(a));
        }
        if !b.is_finite() {
            return Err(CodomainError::NonFinite(b));
        }
        if a == b {
            return Err(CodomainError::DegenerateTwoPoint(a));
        }
        Ok(if a < b {
            Codomain::TwoPoint(a, b)
        } else {
            Codomain::TwoPoint(b, a)
        })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self, CodomainError> {
        if !lo.is_finite() {
            return Err(CodomainError::NonFinite(lo));
        }
        if !hi.is_finite() {
            return Err(CodomainError::NonFinite(hi));
        }
        if !(lo < hi) {
            return Err(CodomainError::BadInterval { lo, hi });
        }
        Ok(Codomain::ClosedInterval(lo, hi))
    }

    /// Sorts, deduplicates, and normalizes two-element sets to `TwoPoint`.
    pub fn finite_set(mut values: Vec<f64>) -> Result<Self, CodomainError> {
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(CodomainError::NonFinite(bad));
        }
        if values.is_empty() {
            return Err(CodomainError::EmptySet);
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        if values.len() == 2 {
            return Codomain::two_point(values[0], values[1]);
        }
        Ok(Codomain::FiniteSet(values))
    }

    /// Parses the codomain grammar. Errors report a byte position.
    pub fn parse(spec: &str) -> Result<Self, CodomainError> {
        let s = spec.trim();
        let offset = spec.len() - spec.trim_start().len();
        match s {
            "R" => return Ok(Codomain::AllReals),
            "R>=0" => return Ok(Codomain::NonNegReals),
            "R<=0" => return Ok(Codomain::NonPosReals),
            "Z" => return Ok(Codomain::Integers),
            "Z\\0" => return Ok(Codomain::NonzeroIntegers),
            "N" => return Ok(Codomain::Naturals),
            _ => {}
        }
        if let Some(body) = s.strip_prefix('{') {
            let body = body.strip_suffix('}').ok_or(CodomainError::Syntax {
                pos: offset + s.len(),
                msg: "expected closing `}`".into(),
            })?;
            if body.trim().is_empty() {
                return Err(CodomainError::EmptySet);
            }
            let mut values = Vec::new();
            let mut pos = offset + 1;
            for tok in body.split(',') {
                let v: f64 = tok.trim().parse().map_err(|_| CodomainError::Syntax {
                    pos,
                    msg: format!("invalid number `{}`", tok.trim()),
                })?;
                if !v.is_finite() {
                    return Err(CodomainError::NonFinite(v));
                }
                values.push(v);
                pos += tok.len() + 1;
            }
            return Codomain::finite_set(values);
        }
        if let Some(body) = s.strip_prefix('[') {
            let body = body.strip_suffix(']').ok_or(CodomainError::Syntax {
                pos: offset + s.len(),
                msg: "expected closing `]`".into(),
            })?;
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 2 {
                return Err(CodomainError::Syntax {
                    pos: offset + 1,
                    msg: "interval takes exactly two endpoints".into(),
                });
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| CodomainError::Syntax {
                pos: offset + 1,
                msg: format!("invalid number `{}`", parts[0].trim()),
            })?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| CodomainError::Syntax {
                pos: offset + 2 + parts[0].len(),
                msg: format!("invalid number `{}`", parts[1].trim()),
            })?;
            return Codomain::interval(lo, hi);
        }
        if s.starts_with('(') || s.ends_with(')') {
            return Err(CodomainError::Syntax {
                pos: offset,
                msg: "open or half-open intervals are not representable".into(),
            });
        }
        Err(CodomainError::Syntax {
            pos: offset,
            msg: format!("unrecognized codomain `{s}`"),
        })
    }

    /// Inverse of [`Codomain::parse`].
    pub fn render(&self) -> String {
        match self {
            Codomain::AllReals => "R".into(),
            Codomain::NonNegReals => "R>=0".into(),
            Codomain::NonPosReals => "R<=0".into(),
            Codomain::Integers => "Z".into(),
            Codomain::NonzeroIntegers => "Z\\0".into(),
            Codomain::Naturals => "N".into(),
            Codomain::TwoPoint(a, b) => format!("{{{a},{b}}}"),
            Codomain::ClosedInterval(lo, hi) => format!("[{lo},{hi}]"),
            Codomain::FiniteSet(values) => {
                let toks: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
                format!("{{{}}}", toks.join(","))
            }
        }
    }

    /// Every representable variant is a closed subset of the real line.
    pub fn is_closed(&self) -> bool {
        true
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            Codomain::AllReals => true,
            Codomain::NonNegReals => x >= 0.0,
            Codomain::NonPosReals => x <= 0.0,
            Codomain::Integers => x == x.round(),
            Codomain::NonzeroIntegers => x == x.round() && x != 0.0,
            Codomain::Naturals => x == x.round() && x >= 0.0,
            Codomain::TwoPoint(a, b) => x == *a || x == *b,
            Codomain::ClosedInterval(lo, hi) => *lo <= x && x <= *hi,
            Codomain::FiniteSet(values) => values.iter().any(|v| *v == x),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// Enumeration values for finite variants, ascending.
    pub fn enumerable_values(&self) -> Option<Vec<f64>> {
        match self {
            Codomain::TwoPoint(a, b) => Some(vec![*a, *b]),
            Codomain::FiniteSet(values) => Some(values.clone()),
            _ => None,
        }
    }

    /// The reflected set `-E`.
    pub fn reflected(&self) -> Codomain {
        match self {
            Codomain::NonNegReals => Codomain::NonPosReals,
            Codomain::NonPosReals => Codomain::NonNegReals,
            Codomain::TwoPoint(a, b) => Codomain::TwoPoint(-b, -a),
            Codomain::ClosedInterval(lo, hi) => Codomain::ClosedInterval(-hi, -lo),
            Codomain::FiniteSet(values) => {
                let mut v: Vec<f64> = values.iter().map(|x| -x).collect();
                v.reverse();
                Codomain::FiniteSet(v)
            }
            other => other.clone(),
        }
    }

    /// The scaled set `a * E` for `a != 0`.
    pub fn scaled(&self, a: f64) -> Option<Codomain> {
        if a == 0.0 || !a.is_finite() {
            return None;
        }
        Some(match self {
            Codomain::AllReals => Codomain::AllReals,
            Codomain::NonNegReals if a > 0.0 => Codomain::NonNegReals,
            Codomain::NonNegReals => Codomain::NonPosReals,
            Codomain::NonPosReals if a > 0.0 => Codomain::NonPosReals,
            Codomain::NonPosReals => Codomain::NonNegReals,
            Codomain::TwoPoint(p, q) => Codomain::two_point(a * p, a * q).ok()?,
            Codomain::ClosedInterval(lo, hi) => {
                let (x, y) = (a * lo, a * hi);
                Codomain::interval(x.min(y), x.max(y)).ok()?
            }
            Codomain::FiniteSet(values) => {
                Codomain::finite_set(values.iter().map(|v| a * v).collect()).ok()?
            }
            _ => return None,
        })
    }
}

impl fmt::Display for Codomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Codomain {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Codomain {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Codomain::parse(&s).map_err(serde::de::Error::custom)
    }
}
