//! Query execution and certificate re-verification.

use std::time::Instant;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use skewtorus::lattice::{char_poly, matrix_order, min_poly, IntMatrix};
use skewtorus::oracle::oracle_enumerate_with_budget;
use skewtorus::primitivity::{decide_skew_laurent, decide_skew_poly, PrimeIdealShape, PrimitivityReport, Witness};
use skewtorus::torus::{
    default_k_max, dense_periodic_family, dichotomy, find_avoiding_periodic_point, fixed_monomial_character,
    image_coset, is_periodic_coset, period, periodic_level_with_budget, AffineTorusMap, Periodicity, TorsionCoset,
};
use skewtorus::Error;

use crate::render;
use crate::spec::{CosetSpec, ProblemSpec, Query, ShapeSpec};

pub const TOOL_VERSION: &str = concat!("skewtorus ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub verify: bool,
    pub level: Option<u64>,
    pub prime_budget: Option<u64>,
    pub seed: Option<u64>,
    pub timings: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryError {
    pub kind: String,
    pub message: String,
}

impl From<Error> for QueryError {
    fn from(e: Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("Error")
            .to_string();
        QueryError {
            kind,
            message: e.to_string(),
        }
    }
}

impl QueryError {
    fn missing_level() -> Self {
        QueryError {
            kind: "MissingLevel".into(),
            message: "no level given in the query or on the command line".into(),
        }
    }
}

/// Certificate checks collected while a query runs.
#[derive(Default)]
struct Checks {
    enabled: bool,
    count: usize,
    failures: Vec<String>,
}

impl Checks {
    fn record(&mut self, what: &str, r: Result<(), String>) {
        if !self.enabled {
            return;
        }
        self.count += 1;
        if let Err(e) = r {
            self.failures.push(format!("{what}: {e}"));
        }
    }

    fn enabled(&self) -> bool {
        self.enabled
    }
}

pub struct Outcome {
    pub report: Value,
    /// 0 when every query succeeded and verified, 1 otherwise.
    pub exit_code: i32,
    pub verification_failures: Vec<String>,
}

struct Context<'a> {
    phi: &'a AffineTorusMap,
    spec: &'a ProblemSpec,
    opts: &'a Options,
}

impl Context<'_> {
    fn prime_budget(&self) -> u64 {
        self.opts.prime_budget.unwrap_or(self.spec.budgets().prime)
    }

    fn level(&self, q: Option<u64>) -> Result<u64, QueryError> {
        q.or(self.opts.level).ok_or_else(QueryError::missing_level)
    }
}

fn build_coset(c: &CosetSpec, d: usize) -> Result<TorsionCoset, QueryError> {
    let rows: Vec<Vec<BigInt>> = c.characters.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect();
    let w = IntMatrix::from_big_rows(rows, d)?;
    Ok(TorsionCoset::new(w, c.targets.iter().map(|t| t.0.clone()).collect())?)
}

fn build_shape(s: &ShapeSpec, d: usize) -> Result<PrimeIdealShape, QueryError> {
    Ok(match s {
        ShapeSpec::Zero => PrimeIdealShape::Zero,
        ShapeSpec::ContainsT { coset } => PrimeIdealShape::ContainsT(build_coset(coset, d)?),
        ShapeSpec::InducedFromCosetOrbit { cosets } => PrimeIdealShape::InducedFromCosetOrbit(
            cosets.iter().map(|c| build_coset(c, d)).collect::<Result<_, _>>()?,
        ),
    })
}

fn verify_report(sigma: &AffineTorusMap, r: &PrimitivityReport, checks: &mut Checks) {
    for w in &r.witnesses {
        match w {
            Witness::Dichotomy(d) => checks.record("dichotomy witness", d.verify(sigma)),
            Witness::FixedCharacter(c) => checks.record("fixed character", c.verify(sigma)),
            Witness::SigmaSpecial(y) => {
                let stable = y.iter().try_for_each(|c| match image_coset(sigma, c) {
                    Ok(Some(img)) if y.contains(&img) => Ok(()),
                    _ => Err(format!("image of {c} leaves the closed set")),
                });
                checks.record("σ-special closed set", stable);
            }
            Witness::CommutativeQuotient { coset, point } => {
                let ok = match point {
                    Some(p) if !coset.contains(p) => Err(format!("{p} is not on {coset}")),
                    Some(_) if !coset.is_point() => Err("a point was reported for a positive-dimensional coset".into()),
                    None if coset.is_point() => Err("a point coset lacks its point".into()),
                    _ => Ok(()),
                };
                checks.record("commutative quotient", ok);
            }
            Witness::Restriction { map, report, .. } => {
                if let Some(inner) = report {
                    verify_report(map, inner, checks);
                }
            }
            Witness::NoFixedCharacter { .. } | Witness::DenseOrbitCriterion => {}
        }
    }
}

fn analyze(ctx: &Context, checks: &mut Checks) -> Result<Value, QueryError> {
    let phi = ctx.phi;
    let mut out = Map::new();
    out.insert("dimension".into(), json!(phi.dim()));
    out.insert("det".into(), render::int(&phi.det()));
    out.insert("automorphism".into(), json!(phi.is_automorphism()));
    out.insert("characteristicPolynomial".into(), render::poly(&char_poly(phi.matrix())));
    out.insert("minimalPolynomial".into(), render::poly(&min_poly(phi.matrix())));
    out.insert(
        "translationLevel".into(),
        phi.translation_level().map_or(Value::Null, render::u64_value),
    );
    let dich = dichotomy(phi)?;
    checks.record("dichotomy", dich.verify(phi));
    out.insert("dichotomy".into(), render::dichotomy(&dich));
    if phi.is_automorphism() {
        out.insert("matrixOrder".into(), render::order(matrix_order(phi.matrix())?));
        let k_max = default_k_max(phi.dim());
        let fc = fixed_monomial_character(phi, Some(k_max))?;
        if let Some(c) = &fc {
            checks.record("fixed character", c.verify(phi));
        }
        out.insert(
            "fixedCharacter".into(),
            json!({ "kMax": k_max, "character": fc.as_ref().map_or(Value::Null, render::fixed_character) }),
        );
        let poly = decide_skew_poly(phi, &PrimeIdealShape::Zero)?;
        let laurent = decide_skew_laurent(phi, &PrimeIdealShape::Zero)?;
        out.insert("sigmaOrder".into(), render::order(poly.sigma_order));
        for (key, r) in [("skewPoly", poly), ("skewLaurent", laurent)] {
            verify_report(phi, &r, checks);
            out.insert(key.into(), render::primitivity(&r));
        }
    }
    if phi.has_zero_translation() {
        let budget = ctx.prime_budget();
        let family = match dense_periodic_family(phi, budget) {
            Ok(certs) => {
                for c in &certs {
                    checks.record("eigenvector certificate", c.verify(phi.matrix()));
                }
                json!({ "primeBudget": budget, "certificates": certs.iter().map(render::family_certificate).collect::<Vec<_>>() })
            }
            Err(e) => json!({ "primeBudget": budget, "error": e.to_string() }),
        };
        out.insert("periodicFamily".into(), family);
    }
    Ok(Value::Object(out))
}

fn execute(ctx: &Context, q: &Query, checks: &mut Checks) -> Result<Value, QueryError> {
    let phi = ctx.phi;
    let d = phi.dim();
    let points = ctx.spec.budgets().oracle_points;
    match q {
        Query::Analyze => analyze(ctx, checks),
        Query::PeriodicPoints { level } => {
            let n = ctx.level(*level)?;
            let pts = periodic_level_with_budget(phi, n, points)?;
            if checks.enabled() {
                for (x, p) in &pts {
                    let got = period(phi, x).map_err(|e| e.to_string());
                    let ok = match got {
                        Ok(Periodicity::Periodic(q)) if q == *p => Ok(()),
                        Ok(other) => Err(format!("{x}: reported period {p}, found {other}")),
                        Err(e) => Err(e),
                    };
                    checks.record("periodic point", ok);
                }
            }
            Ok(render::periodic_points(n, &pts))
        }
        Query::Oracle { level } => {
            let n = ctx.level(*level)?;
            let s = oracle_enumerate_with_budget(phi, n, points)?;
            if checks.enabled() {
                let fast = periodic_level_with_budget(phi, n, points).map_err(|e| e.to_string());
                let ok = match fast {
                    Ok(f) if f == s.periodic_points => Ok(()),
                    Ok(_) => Err("periodic points differ from the level algorithm".into()),
                    Err(e) => Err(e),
                };
                checks.record("oracle cross-check", ok);
            }
            Ok(render::oracle(&s))
        }
        Query::Dichotomy => {
            let r = dichotomy(phi)?;
            checks.record("dichotomy", r.verify(phi));
            Ok(render::dichotomy(&r))
        }
        Query::SkewPoly { shape } | Query::SkewLaurent { shape } => {
            let shape = build_shape(shape, d)?;
            let r = if matches!(q, Query::SkewPoly { .. }) {
                decide_skew_poly(phi, &shape)?
            } else {
                decide_skew_laurent(phi, &shape)?
            };
            verify_report(phi, &r, checks);
            Ok(render::primitivity(&r))
        }
        Query::Avoid { cosets, budget } => {
            let ys: Vec<TorsionCoset> = cosets.iter().map(|c| build_coset(c, d)).collect::<Result<_, _>>()?;
            let budget = budget.unwrap_or_else(|| ctx.prime_budget());
            let found = find_avoiding_periodic_point(phi, &ys, budget)?;
            checks.record("avoiding orbit", found.verify(phi, &ys));
            let n_max = ctx.spec.budgets().n_max;
            let periodicity = ys
                .iter()
                .map(|c| Ok(render::coset_periodicity(is_periodic_coset(phi, c, n_max)?)))
                .collect::<Result<Vec<_>, QueryError>>()?;
            let mut v = render::avoiding(&found);
            v["primeBudget"] = json!(budget);
            v["cosetPeriodicity"] = Value::Array(periodicity);
            Ok(v)
        }
    }
}

fn options_value(opts: &Options) -> Value {
    let mut m = Map::new();
    m.insert("verify".into(), json!(opts.verify));
    if let Some(n) = opts.level {
        m.insert("level".into(), json!(n));
    }
    if let Some(b) = opts.prime_budget {
        m.insert("primeBudget".into(), json!(b));
    }
    if let Some(s) = opts.seed {
        m.insert("seed".into(), json!(s));
    }
    Value::Object(m)
}

pub fn run(spec: &ProblemSpec, opts: &Options) -> Outcome {
    let phi = AffineTorusMap::new(spec.matrix.clone(), spec.translation.clone()).map_err(QueryError::from);
    let mut results = Vec::new();
    let mut timings = Vec::new();
    let mut exit_code = 0;
    let mut all_failures = Vec::new();
    let mut total_checks = 0;
    for (i, q) in spec.queries().iter().enumerate() {
        let start = opts.timings.then(Instant::now);
        let mut checks = Checks {
            enabled: opts.verify,
            ..Checks::default()
        };
        let result = phi.as_ref().map_err(Clone::clone).and_then(|phi| {
            let ctx = Context { phi, spec, opts };
            execute(&ctx, q, &mut checks)
        });
        if let Some(start) = start {
            timings.push(json!({ "index": i, "millis": start.elapsed().as_secs_f64() * 1e3 }));
        }
        let mut entry = Map::new();
        entry.insert("index".into(), json!(i));
        entry.insert("query".into(), json!(q.name()));
        match result {
            Ok(v) => {
                entry.insert("status".into(), json!("ok"));
                entry.insert("result".into(), v);
            }
            Err(e) => {
                exit_code = 1;
                entry.insert("status".into(), json!("error"));
                entry.insert("error".into(), json!({ "kind": e.kind, "message": e.message }));
            }
        }
        if opts.verify {
            total_checks += checks.count;
            entry.insert(
                "verification".into(),
                json!({ "checks": checks.count, "failures": checks.failures }),
            );
            if !checks.failures.is_empty() {
                exit_code = 1;
                all_failures.extend(checks.failures.iter().map(|f| format!("query {i}: {f}")));
            }
        }
        results.push(Value::Object(entry));
    }

    let mut report = Map::new();
    report.insert("toolVersion".into(), json!(TOOL_VERSION));
    report.insert(
        "inputEcho".into(),
        serde_json::to_value(&spec.raw).expect("spec serializes"),
    );
    report.insert("options".into(), options_value(opts));
    report.insert("results".into(), Value::Array(results));
    if opts.verify {
        report.insert(
            "verification".into(),
            json!({ "checks": total_checks, "passed": all_failures.is_empty() }),
        );
    }
    if opts.timings {
        report.insert("timings".into(), Value::Array(timings));
    }
    Outcome {
        report: Value::Object(report),
        exit_code,
        verification_failures: all_failures,
    }
}

pub fn parse_error_report(e: &crate::spec::ParseError) -> Value {
    json!({
        "toolVersion": TOOL_VERSION,
        "error": {
            "kind": "ParseError",
            "message": e.message,
            "line": e.line,
            "column": e.column,
        }
    })
}
