//! JSON views of the core types.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use skewtorus::lattice::{IntMatrix, IntPoly, Order};
use skewtorus::oracle::FiniteDynamicsSummary;
use skewtorus::primitivity::{Flag, PrimitivityReport, Witness};
use skewtorus::torus::{
    AffineTorusMap, AvoidingPoint, CosetPeriodicity, DensityCertificate, DichotomyResult, FixedCharacter,
    PeriodicFamilyCertificate, ScalarGroupElement, TorsionCoset, TorsionVector, Verdict,
};

use crate::spec::{format_rational, MAX_SAFE_INTEGER};

pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if v.abs() <= MAX_SAFE_INTEGER => json!(v),
        _ => json!(x.to_string()),
    }
}

pub fn u64_value(x: u64) -> Value {
    int(&BigInt::from(x))
}

pub fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rat(r: &BigRational) -> Value {
    json!(format_rational(r))
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| ints(m.row(i))).collect())
}

pub fn point(x: &TorsionVector) -> Value {
    Value::Array(x.to_rationals().iter().map(rat).collect())
}

pub fn poly(p: &IntPoly) -> Value {
    json!({ "coefficients": ints(p.coeffs()), "text": p.to_string() })
}

pub fn order(o: Order) -> Value {
    match o {
        Order::Finite(n) => u64_value(n),
        Order::Infinite => json!("infinite"),
    }
}

pub fn flag(f: Flag) -> Value {
    match f {
        Flag::Value(b) => json!(b),
        Flag::NotApplicable => json!("notApplicable"),
    }
}

pub fn coset(c: &TorsionCoset) -> Value {
    json!({
        "characters": matrix(c.characters()),
        "targets": Value::Array(c.targets().iter().map(rat).collect()),
        "dimension": c.dimension(),
    })
}

pub fn cosets(cs: &[TorsionCoset]) -> Value {
    Value::Array(cs.iter().map(coset).collect())
}

pub fn scalar(y: &ScalarGroupElement) -> Value {
    json!({
        "torsion": rat(y.torsion()),
        "free": Value::Array(y.free().iter().map(rat).collect()),
    })
}

pub fn map(phi: &AffineTorusMap) -> Value {
    json!({
        "matrix": matrix(phi.matrix()),
        "translation": Value::Array(phi.translation().iter().map(scalar).collect()),
    })
}

pub fn family_certificate(c: &PeriodicFamilyCertificate) -> Value {
    json!({
        "prime": c.prime,
        "eigenvector": c.eigenvector,
        "eigenvalue": c.eigenvalue,
        "point": point(&c.point),
        "period": c.period,
    })
}

pub fn density(d: &DensityCertificate) -> Value {
    match d {
        DensityCertificate::EigenvectorFamily { subtorus, certificates } => json!({
            "kind": "eigenvectorFamily",
            "subtorus": matrix(subtorus),
            "certificates": Value::Array(certificates.iter().map(family_certificate).collect()),
        }),
        DensityCertificate::FixedCosetFamily {
            character,
            iterate,
            kernel_power,
        } => json!({
            "kind": "fixedCosetFamily",
            "character": ints(character),
            "iterate": iterate,
            "kernelPower": kernel_power,
        }),
    }
}

pub fn dichotomy(r: &DichotomyResult) -> Value {
    let mut out = Map::new();
    match &r.verdict {
        Verdict::A { trapping } => {
            out.insert("verdict".into(), json!("A"));
            out.insert("trapping".into(), cosets(trapping));
        }
        Verdict::B { density: ds } => {
            out.insert("verdict".into(), json!("B"));
            out.insert("density".into(), Value::Array(ds.iter().map(density).collect()));
        }
    }
    out.insert(
        "transcript".into(),
        Value::Array(r.transcript.iter().map(|s| json!(s.to_string())).collect()),
    );
    Value::Object(out)
}

pub fn fixed_character(c: &FixedCharacter) -> Value {
    json!({ "k": c.k, "w": ints(&c.w) })
}

pub fn witness(w: &Witness) -> Value {
    match w {
        Witness::Dichotomy(d) => json!({ "kind": "dichotomy", "dichotomy": dichotomy(d) }),
        Witness::SigmaSpecial(y) => json!({ "kind": "sigmaSpecial", "closedSet": cosets(y) }),
        Witness::FixedCharacter(c) => json!({ "kind": "fixedCharacter", "character": fixed_character(c) }),
        Witness::NoFixedCharacter { k_max } => json!({ "kind": "noFixedCharacter", "kMax": k_max }),
        Witness::DenseOrbitCriterion => json!({ "kind": "denseOrbitCriterion" }),
        Witness::CommutativeQuotient { coset: c, point: p } => json!({
            "kind": "commutativeQuotient",
            "coset": coset(c),
            "point": p.as_ref().map_or(Value::Null, point),
        }),
        Witness::Restriction { iterate, map: m, report } => json!({
            "kind": "restriction",
            "iterate": iterate,
            "map": map(m),
            "report": report.as_deref().map_or(Value::Null, primitivity),
        }),
    }
}

pub fn primitivity(r: &PrimitivityReport) -> Value {
    json!({
        "ring": r.ring.to_string(),
        "sigmaOrder": order(r.sigma_order),
        "locallyClosed": flag(r.locally_closed),
        "rational": flag(r.rational),
        "primitive": r.primitive,
        "witnesses": Value::Array(r.witnesses.iter().map(witness).collect()),
        "caveats": r.caveats,
    })
}

fn histogram(h: &std::collections::BTreeMap<u64, u64>) -> Value {
    Value::Object(h.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

pub fn periodic_points(level: u64, points: &[(TorsionVector, u64)]) -> Value {
    let mut by_period = std::collections::BTreeMap::new();
    for (_, p) in points {
        *by_period.entry(*p).or_insert(0u64) += 1;
    }
    json!({
        "level": level,
        "count": points.len(),
        "pointsByPeriod": histogram(&by_period),
        "points": Value::Array(
            points
                .iter()
                .map(|(x, p)| json!({ "point": point(x), "period": p }))
                .collect()
        ),
    })
}

pub fn oracle(s: &FiniteDynamicsSummary) -> Value {
    json!({
        "level": s.level,
        "pointCount": s.point_count,
        "periodicCount": s.periodic_points.len(),
        "cycleCount": histogram(&s.cycle_count),
        "tailHistogram": histogram(&s.tail_histogram),
        "cycles": Value::Array(
            s.cycles
                .iter()
                .map(|c| json!({ "representative": point(&c.representative), "length": c.length }))
                .collect()
        ),
    })
}

pub fn avoiding(a: &AvoidingPoint) -> Value {
    json!({
        "point": point(&a.point),
        "period": a.period(),
        "orbit": Value::Array(a.orbit.iter().map(point).collect()),
        "certificate": a.certificate.as_ref().map_or(Value::Null, family_certificate),
    })
}

pub fn coset_periodicity(p: CosetPeriodicity) -> Value {
    match p {
        CosetPeriodicity::Periodic(n) => json!({ "periodic": n }),
        CosetPeriodicity::NotWithin(n) => json!({ "notWithin": n }),
    }
}
