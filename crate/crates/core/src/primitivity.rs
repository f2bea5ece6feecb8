//! Primitivity, local closedness and rationality of primes in `R[t; σ]` and
//! `R[t^{±1}; σ]` for `R = k[x_1^{±1}, …, x_d^{±1}]` and monomial `σ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lattice::{matrix_order, Order};
use crate::torus::{
    default_k_max, dichotomy, fixed_monomial_character, image_coset, restrict_to_coset,
    AffineTorusMap, DichotomyResult, FixedCharacter, TorsionCoset, TorsionVector,
};

pub const RATIONALITY_CAVEAT: &str = "rationality is decided by the monomial-character criterion: \
     (0) is reported rational iff no iterate of σ fixes a nonconstant monomial up to scalars";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    SkewPoly,
    SkewLaurent,
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingKind::SkewPoly => write!(f, "skewPoly"),
            RingKind::SkewLaurent => write!(f, "skewLaurent"),
        }
    }
}

/// The prime shapes handled by the deciders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeIdealShape {
    Zero,
    /// `P = (t) + I(C)`.
    ContainsT(TorsionCoset),
    /// `P ∩ R` is the vanishing ideal of a σ-orbit of cosets `C_0, …, C_{m-1}`.
    InducedFromCosetOrbit(Vec<TorsionCoset>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    Value(bool),
    NotApplicable,
}

impl Flag {
    pub fn value(self) -> Option<bool> {
        match self {
            Flag::Value(b) => Some(b),
            Flag::NotApplicable => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Dichotomy(DichotomyResult),
    /// Closed set `Y` for the σ-special criterion; empty means vacuous.
    SigmaSpecial(Vec<TorsionCoset>),
    FixedCharacter(FixedCharacter),
    NoFixedCharacter { k_max: u64 },
    /// Rational case: primitivity follows from a Zariski-dense σ-orbit.
    DenseOrbitCriterion,
    /// The commutative quotient `R/I(C)`; maximal iff `C` is a point.
    CommutativeQuotient { coset: TorsionCoset, point: Option<TorsionVector> },
    /// The restricted system on `C_0` under `σ^m`.
    Restriction {
        iterate: u64,
        map: AffineTorusMap,
        report: Option<Box<PrimitivityReport>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitivityReport {
    pub ring: RingKind,
    pub sigma_order: Order,
    pub locally_closed: Flag,
    pub rational: Flag,
    pub primitive: bool,
    pub witnesses: Vec<Witness>,
    pub caveats: Vec<String>,
}

fn require_automorphism(sigma: &AffineTorusMap) -> Result<()> {
    if sigma.is_automorphism() {
        Ok(())
    } else {
        Err(Error::NotAutomorphism(sigma.det().to_string()))
    }
}

/// Order of `σ` as a ring automorphism, scalars included.
pub fn sigma_order(sigma: &AffineTorusMap) -> Result<Order> {
    require_automorphism(sigma)?;
    let m = match matrix_order(sigma.matrix())? {
        Order::Infinite => return Ok(Order::Infinite),
        Order::Finite(m) => m,
    };
    let ym = sigma.iterate(m);
    let mut level = BigInt::from(1);
    for y in ym.translation() {
        match y.order() {
            Some(n) => level = level.lcm(&n),
            None => return Ok(Order::Infinite),
        }
    }
    let level = u64::try_from(level).map_err(|_| Error::LevelOverflow)?;
    m.checked_mul(level).map(Order::Finite).ok_or(Error::LevelOverflow)
}

/// Trapping cosets of a verdict-A dichotomy; `None` under verdict B.
pub fn sigma_special_witness(sigma: &AffineTorusMap) -> Result<Option<Vec<TorsionCoset>>> {
    require_automorphism(sigma)?;
    Ok(dichotomy(sigma)?.trapping().map(<[_]>::to_vec))
}

fn zero_poly(sigma: &AffineTorusMap) -> Result<PrimitivityReport> {
    let order = sigma_order(sigma)?;
    let dich = dichotomy(sigma)?;
    let locally_closed = dich.is_a();
    let special = dich.trapping().map(<[_]>::to_vec);
    let route = special.is_some() && !order.is_finite();
    if route != locally_closed {
        return Err(Error::Inconsistent(format!(
            "locally closed = {locally_closed} but σ-special and infinite order = {route}"
        )));
    }
    let mut witnesses = vec![Witness::Dichotomy(dich)];
    if let Some(y) = special {
        witnesses.push(Witness::SigmaSpecial(y));
    }
    Ok(PrimitivityReport {
        ring: RingKind::SkewPoly,
        sigma_order: order,
        locally_closed: Flag::Value(locally_closed),
        rational: Flag::NotApplicable,
        primitive: locally_closed,
        witnesses,
        caveats: Vec::new(),
    })
}

fn zero_laurent(sigma: &AffineTorusMap) -> Result<PrimitivityReport> {
    let order = sigma_order(sigma)?;
    let k_max = default_k_max(sigma.dim());
    let fixed = fixed_monomial_character(sigma, Some(k_max))?;
    let rational = fixed.is_none();
    if order.is_finite() && rational {
        return Err(Error::Inconsistent("σ has finite order but no fixed character was found".into()));
    }
    let witnesses = match fixed {
        Some(fc) => vec![Witness::FixedCharacter(fc)],
        None => vec![Witness::NoFixedCharacter { k_max }, Witness::DenseOrbitCriterion],
    };
    Ok(PrimitivityReport {
        ring: RingKind::SkewLaurent,
        sigma_order: order,
        locally_closed: Flag::NotApplicable,
        rational: Flag::Value(rational),
        primitive: rational,
        witnesses,
        caveats: vec![RATIONALITY_CAVEAT.to_string()],
    })
}

fn check_orbit(sigma: &AffineTorusMap, orbit: &[TorsionCoset]) -> Result<()> {
    if orbit.is_empty() {
        return Err(Error::InvalidShape("empty coset orbit".into()));
    }
    let m = orbit.len();
    for (i, c) in orbit.iter().enumerate() {
        if c.ambient_dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(sigma.dim(), c.ambient_dim()));
        }
        if !c.is_proper() {
            return Err(Error::InvalidShape("orbit coset is the whole torus; use the zero shape".into()));
        }
        if orbit[..i].contains(c) {
            return Err(Error::InvalidShape(format!("coset {c} repeats in the orbit")));
        }
        let next = &orbit[(i + 1) % m];
        if image_coset(sigma, c)?.as_ref() != Some(next) {
            return Err(Error::InvalidShape(format!("σ does not map coset {i} onto coset {}", (i + 1) % m)));
        }
    }
    Ok(())
}

fn induced(sigma: &AffineTorusMap, orbit: &[TorsionCoset], ring: RingKind) -> Result<PrimitivityReport> {
    check_orbit(sigma, orbit)?;
    let order = sigma_order(sigma)?;
    let m = orbit.len() as u64;
    let restriction = restrict_to_coset(&sigma.iterate(m), &orbit[0])?;
    let map = restriction.map.clone();
    if map.dim() == 0 {
        // The quotient is k[t^m] or k[t^{±m}]: a commutative domain that is not a field.
        let (lc, rat) = match ring {
            RingKind::SkewPoly => (Flag::Value(false), Flag::NotApplicable),
            RingKind::SkewLaurent => (Flag::NotApplicable, Flag::Value(false)),
        };
        return Ok(PrimitivityReport {
            ring,
            sigma_order: order,
            locally_closed: lc,
            rational: rat,
            primitive: false,
            witnesses: vec![Witness::Restriction {
                iterate: m,
                map,
                report: None,
            }],
            caveats: Vec::new(),
        });
    }
    let inner = match ring {
        RingKind::SkewPoly => zero_poly(&map)?,
        RingKind::SkewLaurent => zero_laurent(&map)?,
    };
    Ok(PrimitivityReport {
        ring,
        sigma_order: order,
        locally_closed: inner.locally_closed,
        rational: inner.rational,
        primitive: inner.primitive,
        caveats: inner.caveats.clone(),
        witnesses: vec![Witness::Restriction {
            iterate: m,
            map,
            report: Some(Box::new(inner)),
        }],
    })
}

pub fn decide_skew_poly(sigma: &AffineTorusMap, shape: &PrimeIdealShape) -> Result<PrimitivityReport> {
    require_automorphism(sigma)?;
    match shape {
        PrimeIdealShape::Zero => zero_poly(sigma),
        PrimeIdealShape::ContainsT(c) => {
            if c.ambient_dim() != sigma.dim() {
                return Err(Error::DimensionMismatch(sigma.dim(), c.ambient_dim()));
            }
            let point = c.as_point();
            let maximal = point.is_some();
            Ok(PrimitivityReport {
                ring: RingKind::SkewPoly,
                sigma_order: sigma_order(sigma)?,
                locally_closed: Flag::Value(maximal),
                rational: Flag::NotApplicable,
                primitive: maximal,
                witnesses: vec![Witness::CommutativeQuotient {
                    coset: c.clone(),
                    point,
                }],
                caveats: Vec::new(),
            })
        }
        PrimeIdealShape::InducedFromCosetOrbit(orbit) => induced(sigma, orbit, RingKind::SkewPoly),
    }
}

pub fn decide_skew_laurent(sigma: &AffineTorusMap, shape: &PrimeIdealShape) -> Result<PrimitivityReport> {
    require_automorphism(sigma)?;
    match shape {
        PrimeIdealShape::Zero => zero_laurent(sigma),
        PrimeIdealShape::ContainsT(_) => Err(Error::InvalidShapeForLaurent),
        PrimeIdealShape::InducedFromCosetOrbit(orbit) => induced(sigma, orbit, RingKind::SkewLaurent),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntMatrix;
    use crate::torus::ScalarGroupElement;

    fn jordan() -> AffineTorusMap {
        AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[0, 1], [-1, 1]])).unwrap()
    }

    fn q_map() -> AffineTorusMap {
        AffineTorusMap::translation_only(vec![ScalarGroupElement::generator(0, 1)]).unwrap()
    }

    fn zeta(n: i64) -> AffineTorusMap {
        AffineTorusMap::translation_only(vec![ScalarGroupElement::root_of_unity(1, n, 0)]).unwrap()
    }

    fn cat() -> AffineTorusMap {
        AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[2, 1], [1, 1]])).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(sigma_order(&jordan()).unwrap(), Order::Finite(6));
        assert_eq!(sigma_order(&q_map()).unwrap(), Order::Infinite);
        assert_eq!(sigma_order(&zeta(3)).unwrap(), Order::Finite(3));
        let twisted = AffineTorusMap::new(
            IntMatrix::from_rows(&[[0, 1], [1, 0]]),
            vec![ScalarGroupElement::root_of_unity(1, 3, 0), ScalarGroupElement::identity(0)],
        )
        .unwrap();
        assert_eq!(sigma_order(&twisted).unwrap(), Order::Finite(6));
    }

    #[test]
    fn jordan_is_not_primitive() {
        let p = decide_skew_poly(&jordan(), &PrimeIdealShape::Zero).unwrap();
        assert!(!p.primitive);
        assert_eq!(p.locally_closed, Flag::Value(false));
        let l = decide_skew_laurent(&jordan(), &PrimeIdealShape::Zero).unwrap();
        assert!(!l.primitive);
    }

    #[test]
    fn quantum_torus_is_primitive() {
        let p = decide_skew_poly(&q_map(), &PrimeIdealShape::Zero).unwrap();
        assert!(p.primitive);
        assert!(p.witnesses.contains(&Witness::SigmaSpecial(Vec::new())));
        let l = decide_skew_laurent(&q_map(), &PrimeIdealShape::Zero).unwrap();
        assert!(l.primitive);
        assert_eq!(l.rational, Flag::Value(true));
        assert_eq!(sigma_special_witness(&q_map()).unwrap(), Some(Vec::new()));
    }

    #[test]
    fn roots_of_unity_are_not_primitive() {
        for n in [2, 3, 4, 6] {
            let l = decide_skew_laurent(&zeta(n), &PrimeIdealShape::Zero).unwrap();
            assert!(!l.primitive);
            let fc = FixedCharacter { k: 1, w: vec![BigInt::from(n)] };
            assert_eq!(l.witnesses, vec![Witness::FixedCharacter(fc)]);
            assert!(!decide_skew_poly(&zeta(n), &PrimeIdealShape::Zero).unwrap().primitive);
        }
        assert_eq!(sigma_special_witness(&zeta(3)).unwrap(), None);
    }

    #[test]
    fn hyperbolic_contrast() {
        assert!(!decide_skew_poly(&cat(), &PrimeIdealShape::Zero).unwrap().primitive);
        assert!(decide_skew_laurent(&cat(), &PrimeIdealShape::Zero).unwrap().primitive);
    }

    #[test]
    fn contains_t() {
        let pt = TorsionCoset::point(&TorsionVector::new(&[1, 2], 5).unwrap());
        let r = decide_skew_poly(&cat(), &PrimeIdealShape::ContainsT(pt.clone())).unwrap();
        assert!(r.primitive);
        let line = TorsionCoset::from_rows(&[[1, 0]], &[(0, 1)], 2).unwrap();
        assert!(!decide_skew_poly(&cat(), &PrimeIdealShape::ContainsT(line)).unwrap().primitive);
        assert_eq!(
            decide_skew_laurent(&cat(), &PrimeIdealShape::ContainsT(pt)),
            Err(Error::InvalidShapeForLaurent)
        );
    }

    #[test]
    fn induced_from_orbit() {
        // σ(x, y) = (x, q y) preserves {x = -1}
        let sigma = AffineTorusMap::new(
            IntMatrix::identity(2),
            vec![ScalarGroupElement::identity(1), ScalarGroupElement::generator(0, 1)],
        )
        .unwrap();
        let c = TorsionCoset::from_rows(&[[1, 0]], &[(1, 2)], 2).unwrap();
        let shape = PrimeIdealShape::InducedFromCosetOrbit(vec![c]);
        let r = decide_skew_poly(&sigma, &shape).unwrap();
        assert!(r.primitive);
        let l = decide_skew_laurent(&sigma, &shape).unwrap();
        assert!(l.primitive);

        // orbit of length 2 under the swap, restricted map is the identity on a circle
        let swap = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap();
        let a = TorsionCoset::from_rows(&[[1, 0]], &[(0, 1)], 2).unwrap();
        let b = TorsionCoset::from_rows(&[[0, 1]], &[(0, 1)], 2).unwrap();
        let shape = PrimeIdealShape::InducedFromCosetOrbit(vec![a.clone(), b]);
        assert!(!decide_skew_poly(&swap, &shape).unwrap().primitive);
        let bad = PrimeIdealShape::InducedFromCosetOrbit(vec![a]);
        assert!(matches!(decide_skew_poly(&swap, &bad), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn zero_dimensional_restriction() {
        let pt = TorsionCoset::point(&TorsionVector::new(&[1], 2).unwrap());
        let orbit = vec![pt.clone(), TorsionCoset::point(&TorsionVector::new(&[5], 6).unwrap()), TorsionCoset::point(&TorsionVector::new(&[1], 6).unwrap())];
        let r = decide_skew_poly(&zeta(3), &PrimeIdealShape::InducedFromCosetOrbit(orbit.clone())).unwrap();
        assert!(!r.primitive);
        let l = decide_skew_laurent(&zeta(3), &PrimeIdealShape::InducedFromCosetOrbit(orbit)).unwrap();
        assert_eq!(l.rational, Flag::Value(false));
    }

    #[test]
    fn requires_automorphism() {
        let dbl = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[2]])).unwrap();
        assert!(matches!(decide_skew_poly(&dbl, &PrimeIdealShape::Zero), Err(Error::NotAutomorphism(_))));
    }
}
