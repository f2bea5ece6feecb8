//! Problem descriptions: JSON in, typed [`ProblemSpec`] out.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use skewtorus::lattice::IntMatrix;
use skewtorus::torus::ScalarGroupElement;

/// Integers above this magnitude are written as strings.
pub const MAX_SAFE_INTEGER: i64 = 1 << 53;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Arbitrary-precision integer; JSON number or decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Int, E> {
                Err(E::custom(format!("{v} is not an integer")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
                BigInt::from_str(v.trim())
                    .map(Int)
                    .map_err(|_| E::custom(format!("{v:?} is not an integer")))
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) if v.abs() <= MAX_SAFE_INTEGER => s.serialize_i64(v),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

/// Exact rational, written `"a/N"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub BigRational);

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| format!("{s:?} is not a rational a/N"))?;
    let d = BigInt::from_str(d).map_err(|_| format!("{s:?} is not a rational a/N"))?;
    if d.is_zero() {
        return Err(format!("{s:?} has a zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"a/N\" or an integer")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
                Err(E::custom(format!("{v}: write rationals as strings \"a/N\"")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                parse_rational(v).map(Rat).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<Rat>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub free: BTreeMap<String, Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CosetSpec {
    pub characters: Vec<Vec<Int>>,
    pub targets: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum ShapeSpec {
    Zero,
    ContainsT { coset: CosetSpec },
    InducedFromCosetOrbit { cosets: Vec<CosetSpec> },
}

fn zero_shape() -> ShapeSpec {
    ShapeSpec::Zero
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "camelCase", deny_unknown_fields)]
pub enum Query {
    Analyze,
    PeriodicPoints {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<u64>,
    },
    Dichotomy,
    SkewPoly {
        #[serde(default = "zero_shape")]
        shape: ShapeSpec,
    },
    SkewLaurent {
        #[serde(default = "zero_shape")]
        shape: ShapeSpec,
    },
    Oracle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<u64>,
    },
    Avoid {
        #[serde(default)]
        cosets: Vec<CosetSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<u64>,
    },
}

impl Query {
    pub fn name(&self) -> &'static str {
        match self {
            Query::Analyze => "analyze",
            Query::PeriodicPoints { .. } => "periodicPoints",
            Query::Dichotomy => "dichotomy",
            Query::SkewPoly { .. } => "skewPoly",
            Query::SkewLaurent { .. } => "skewLaurent",
            Query::Oracle { .. } => "oracle",
            Query::Avoid { .. } => "avoid",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "Budgets::default_prime")]
    pub prime: u64,
    #[serde(default = "Budgets::default_oracle_points")]
    pub oracle_points: u64,
    #[serde(default = "Budgets::default_n_max")]
    pub n_max: u64,
}

impl Budgets {
    fn default_prime() -> u64 {
        200
    }
    fn default_oracle_points() -> u64 {
        skewtorus::torus::DEFAULT_POINT_BUDGET
    }
    fn default_n_max() -> u64 {
        64
    }
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            prime: Self::default_prime(),
            oracle_points: Self::default_oracle_points(),
            n_max: Self::default_n_max(),
        }
    }
}

/// The wire format, kept for echoing.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawSpec {
    pub dimension: usize,
    pub matrix: Vec<Vec<Int>>,
    #[serde(default)]
    pub free_generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<ScalarSpec>>,
    #[serde(default)]
    pub queries: Vec<Query>,
    #[serde(default)]
    pub budgets: Budgets,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub raw: RawSpec,
    pub matrix: IntMatrix,
    pub translation: Vec<ScalarGroupElement>,
}

impl ProblemSpec {
    pub fn dimension(&self) -> usize {
        self.raw.dimension
    }

    pub fn queries(&self) -> &[Query] {
        &self.raw.queries
    }

    pub fn budgets(&self) -> &Budgets {
        &self.raw.budgets
    }

    pub fn free_generators(&self) -> &[String] {
        &self.raw.free_generators
    }
}

/// Line and column (1-based) of the first occurrence of `"key"` in `text`.
fn locate(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    let Some(pos) = text.find(&needle) else {
        return (1, 1);
    };
    let before = &text[..pos];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec, ParseError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| ParseError {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    let fail = |key: &str, message: String| {
        let (line, column) = locate(text, key);
        ParseError { message, line, column }
    };
    let d = raw.dimension;
    if d == 0 {
        return Err(fail("dimension", "dimension must be at least 1".into()));
    }
    if raw.matrix.len() != d {
        return Err(fail("matrix", format!("matrix has {} rows, expected {d}", raw.matrix.len())));
    }
    if let Some(i) = raw.matrix.iter().position(|r| r.len() != d) {
        return Err(fail(
            "matrix",
            format!("matrix row {i} has {} entries, expected {d}", raw.matrix[i].len()),
        ));
    }
    let rows: Vec<Vec<BigInt>> = raw.matrix.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect();
    let matrix = IntMatrix::from_big_rows(rows, d).map_err(|e| fail("matrix", e.to_string()))?;

    let gens = &raw.free_generators;
    for (i, g) in gens.iter().enumerate() {
        if gens[..i].contains(g) {
            return Err(fail("freeGenerators", format!("free generator {g:?} declared twice")));
        }
    }
    let translation = match &raw.translation {
        None => vec![ScalarGroupElement::identity(gens.len()); d],
        Some(ys) => {
            if ys.len() != d {
                return Err(fail("translation", format!("translation has {} entries, expected {d}", ys.len())));
            }
            let mut out = Vec::with_capacity(d);
            for y in ys {
                let mut free = vec![BigRational::zero(); gens.len()];
                for (name, e) in &y.free {
                    let j = gens
                        .iter()
                        .position(|g| g == name)
                        .ok_or_else(|| fail("translation", format!("free generator {name:?} is not declared")))?;
                    free[j] = e.0.clone();
                }
                let torsion = y.torsion.as_ref().map_or_else(BigRational::zero, |t| t.0.clone());
                out.push(ScalarGroupElement::new(torsion, free));
            }
            out
        }
    };
    for q in &raw.queries {
        let cosets: Vec<&CosetSpec> = match q {
            Query::SkewPoly { shape } | Query::SkewLaurent { shape } => match shape {
                ShapeSpec::Zero => vec![],
                ShapeSpec::ContainsT { coset } => vec![coset],
                ShapeSpec::InducedFromCosetOrbit { cosets } => cosets.iter().collect(),
            },
            Query::Avoid { cosets, .. } => cosets.iter().collect(),
            _ => vec![],
        };
        for c in cosets {
            if c.characters.len() != c.targets.len() {
                return Err(fail("characters", "a coset needs one target per character".into()));
            }
            if c.characters.iter().any(|r| r.len() != d) {
                return Err(fail("characters", format!("coset characters must have {d} entries")));
            }
        }
    }
    Ok(ProblemSpec { raw, matrix, translation })
}
