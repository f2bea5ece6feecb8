use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::map::AffineTorusMap;
use crate::error::{Error, Result};

/// Default cap on `N^d` for exhaustive level enumeration.
pub const DEFAULT_POINT_BUDGET: u64 = 10_000_000;

/// A torsion point `(ζ_N^{a_1}, …, ζ_N^{a_d})`, stored at its canonical level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionVector {
    numerators: Vec<u64>,
    level: u64,
}

impl TorsionVector {
    pub fn new(numerators: &[i64], level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::Shape("torsion level must be positive".into()));
        }
        let n = level as i128;
        let res = numerators
            .iter()
            .map(|&a| (a as i128).rem_euclid(n) as u64)
            .collect();
        Ok(Self::from_residues(res, level))
    }

    /// Builds from residues already in `[0, level)`.
    pub fn from_residues(numerators: Vec<u64>, level: u64) -> Self {
        debug_assert!(level > 0 && numerators.iter().all(|&a| a < level));
        let g = numerators.iter().fold(level, |g, &a| g.gcd(&a));
        TorsionVector {
            numerators: numerators.into_iter().map(|a| a / g).collect(),
            level: level / g,
        }
    }

    pub fn zero(d: usize) -> Self {
        TorsionVector {
            numerators: vec![0; d],
            level: 1,
        }
    }

    pub fn from_rationals(coords: &[BigRational]) -> Result<Self> {
        let l = coords
            .iter()
            .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        let level = l.to_u64().ok_or(Error::LevelOverflow)?;
        let res = coords
            .iter()
            .map(|x| {
                let v = (x.numer() * (&l / x.denom())).mod_floor(&l);
                v.to_u64().expect("residue below level")
            })
            .collect();
        Ok(Self::from_residues(res, level))
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.numerators
            .iter()
            .map(|&a| BigRational::new(a.into(), self.level.into()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    /// Numerators rescaled to level `n`, if the point lives there.
    pub fn numerators_at(&self, n: u64) -> Option<Vec<u64>> {
        if n % self.level != 0 {
            return None;
        }
        let s = n / self.level;
        Some(self.numerators.iter().map(|a| a * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.level == 1
    }
}

impl fmt::Display for TorsionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, &a) in self.numerators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if a == 0 {
                write!(f, "0")?;
            } else {
                write!(f, "{}/{}", a, self.level)?;
            }
        }
        write!(f, ")")
    }
}

/// The affine map reduced to `(Z/N)^d`.
#[derive(Clone, Debug)]
pub(crate) struct LevelMap {
    pub d: usize,
    pub n: u64,
    m: Vec<u64>,
    t: Vec<u64>,
}

impl LevelMap {
    pub fn new(phi: &AffineTorusMap, n: u64) -> Result<Self> {
        let level = phi.translation_level()?;
        if n == 0 || n % level != 0 {
            return Err(Error::LevelMismatch {
                translation: level,
                level: n,
            });
        }
        let big_n = BigInt::from(n);
        let t = phi
            .torsion_translation()?
            .iter()
            .map(|x| {
                let v = (x.numer() * (&big_n / x.denom())).mod_floor(&big_n);
                v.to_u64().expect("residue below level")
            })
            .collect();
        Ok(LevelMap {
            d: phi.dim(),
            n,
            m: phi.matrix().residues(n),
            t,
        })
    }

    pub fn apply(&self, a: &[u64], out: &mut [u64]) {
        let n = self.n as u128;
        for i in 0..self.d {
            let row = &self.m[i * self.d..(i + 1) * self.d];
            let mut acc = self.t[i] as u128;
            for (mij, aj) in row.iter().zip(a) {
                acc = (acc + (*mij as u128) * (*aj as u128)) % n;
            }
            out[i] = acc as u64;
        }
    }

    pub fn encode(&self, a: &[u64]) -> usize {
        a.iter().fold(0usize, |acc, &x| acc * self.n as usize + x as usize)
    }

    pub fn decode(&self, mut idx: usize, out: &mut [u64]) {
        for i in (0..self.d).rev() {
            out[i] = (idx % self.n as usize) as u64;
            idx /= self.n as usize;
        }
    }
}

pub(crate) fn check_budget(d: usize, n: u64, budget: u64) -> Result<usize> {
    let points = (n as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if points > budget as u128 || points > u32::MAX as u128 {
        return Err(Error::BudgetExceeded { points, budget });
    }
    Ok(points as usize)
}

/// `Φ(x)` for a torsion point `x`.
pub fn apply_torsion(phi: &AffineTorusMap, x: &TorsionVector) -> Result<TorsionVector> {
    if x.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(phi.dim(), x.dim()));
    }
    let level = x.level().lcm(&phi.translation_level()?);
    let map = LevelMap::new(phi, level)?;
    let a = x.numerators_at(level).expect("level divides lcm");
    let mut out = vec![0; a.len()];
    map.apply(&a, &mut out);
    Ok(TorsionVector::from_residues(out, level))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Periodicity {
    Periodic(u64),
    Preperiodic { tail: u64, cycle: u64 },
}

impl Periodicity {
    pub fn is_periodic(&self) -> bool {
        matches!(self, Periodicity::Periodic(_))
    }
}

impl fmt::Display for Periodicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Periodicity::Periodic(n) => write!(f, "periodic({n})"),
            Periodicity::Preperiodic { tail, cycle } => {
                write!(f, "preperiodic(tail={tail}, cycle={cycle})")
            }
        }
    }
}

pub fn period(phi: &AffineTorusMap, x: &TorsionVector) -> Result<Periodicity> {
    if x.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(phi.dim(), x.dim()));
    }
    let level = x.level().lcm(&phi.translation_level()?);
    let map = LevelMap::new(phi, level)?;
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut cur = x.numerators_at(level).expect("level divides lcm");
    let mut next = vec![0; cur.len()];
    let mut step = 0u64;
    loop {
        if let Some(&first) = seen.get(&cur) {
            let cycle = step - first;
            return Ok(if first == 0 {
                Periodicity::Periodic(cycle)
            } else {
                Periodicity::Preperiodic { tail: first, cycle }
            });
        }
        seen.insert(cur.clone(), step);
        map.apply(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        step += 1;
    }
}

/// Orbit of a periodic point, starting at `x`.
pub fn periodic_orbit(phi: &AffineTorusMap, x: &TorsionVector) -> Result<Vec<TorsionVector>> {
    match period(phi, x)? {
        Periodicity::Periodic(n) => {
            let mut orbit = Vec::with_capacity(n as usize);
            let mut cur = x.clone();
            for _ in 0..n {
                let next = apply_torsion(phi, &cur)?;
                orbit.push(cur);
                cur = next;
            }
            Ok(orbit)
        }
        Periodicity::Preperiodic { .. } => Err(Error::Inconsistent(format!(
            "{x} is not periodic"
        ))),
    }
}

pub fn periodic_level(phi: &AffineTorusMap, n: u64) -> Result<Vec<(TorsionVector, u64)>> {
    periodic_level_with_budget(phi, n, DEFAULT_POINT_BUDGET)
}

/// All periodic points of `Φ` on `(Z/N)^d` with exact periods, in lexicographic order.
pub fn periodic_level_with_budget(
    phi: &AffineTorusMap,
    n: u64,
    budget: u64,
) -> Result<Vec<(TorsionVector, u64)>> {
    let map = LevelMap::new(phi, n)?;
    let count = check_budget(map.d, n, budget)?;

    let mut image = vec![0u32; count];
    let mut a = vec![0; map.d];
    let mut b = vec![0; map.d];
    for (idx, slot) in image.iter_mut().enumerate() {
        map.decode(idx, &mut a);
        map.apply(&a, &mut b);
        *slot = map.encode(&b) as u32;
    }

    // The eventual image of a self-map of a finite set is its set of periodic points.
    let mut alive = vec![true; count];
    let mut size = count;
    loop {
        let mut next = vec![false; count];
        for (idx, &on) in alive.iter().enumerate() {
            if on {
                next[image[idx] as usize] = true;
            }
        }
        let next_size = next.iter().filter(|&&x| x).count();
        alive = next;
        if next_size == size {
            break;
        }
        size = next_size;
    }

    let mut periods = vec![0u64; count];
    for start in 0..count {
        if !alive[start] || periods[start] != 0 {
            continue;
        }
        let mut len = 1u64;
        let mut cur = image[start] as usize;
        while cur != start {
            len += 1;
            cur = image[cur] as usize;
        }
        periods[start] = len;
        let mut cur = image[start] as usize;
        while cur != start {
            periods[cur] = len;
            cur = image[cur] as usize;
        }
    }

    let mut out = Vec::with_capacity(size);
    for idx in 0..count {
        if alive[idx] {
            map.decode(idx, &mut a);
            out.push((TorsionVector::from_residues(a.clone(), n), periods[idx]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntMatrix;
    use crate::torus::ScalarGroupElement;

    fn cat(y: i64, n: i64) -> AffineTorusMap {
        AffineTorusMap::new(
            IntMatrix::from_rows(&[[2, 1], [1, 1]]),
            vec![ScalarGroupElement::root_of_unity(y, n, 0); 2],
        )
        .unwrap()
    }

    fn doubling() -> AffineTorusMap {
        AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[2]])).unwrap()
    }

    #[test]
    fn canonical_level() {
        let x = TorsionVector::new(&[2, 4], 10).unwrap();
        assert_eq!(x.level(), 5);
        assert_eq!(x.numerators(), &[1, 2]);
        assert_eq!(TorsionVector::new(&[-1], 3).unwrap().numerators(), &[2]);
        assert_eq!(x.to_string(), "(1/5, 2/5)");
        let r = TorsionVector::from_rationals(&x.to_rationals()).unwrap();
        assert_eq!(r, x);
    }

    #[test]
    fn apply_torsion_examples() {
        let x = TorsionVector::new(&[1, 2], 5).unwrap();
        let y = apply_torsion(&cat(0, 1), &x).unwrap();
        assert_eq!(y, TorsionVector::new(&[4, 3], 5).unwrap());
        let id = AffineTorusMap::identity(2, 0).unwrap();
        assert_eq!(apply_torsion(&id, &x).unwrap(), x);
        let q = AffineTorusMap::translation_only(vec![ScalarGroupElement::generator(0, 1)]).unwrap();
        assert_eq!(
            apply_torsion(&q, &TorsionVector::new(&[1], 2).unwrap()),
            Err(Error::NonTorsionTranslation)
        );
    }

    #[test]
    fn period_examples() {
        let x = TorsionVector::new(&[1, 2], 5).unwrap();
        assert_eq!(period(&cat(0, 1), &x).unwrap(), Periodicity::Periodic(2));
        let jordan = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[0, 1], [-1, 1]])).unwrap();
        assert_eq!(period(&jordan, &TorsionVector::zero(2)).unwrap(), Periodicity::Periodic(1));
        let half = TorsionVector::new(&[1], 2).unwrap();
        assert_eq!(
            period(&doubling(), &half).unwrap(),
            Periodicity::Preperiodic { tail: 1, cycle: 1 }
        );
    }

    #[test]
    fn periodic_level_examples() {
        let pts = periodic_level(&cat(1, 3), 6).unwrap();
        assert_eq!(pts.len(), 36);
        assert_eq!(periodic_level(&doubling(), 5).unwrap().len(), 5);
        let four = periodic_level(&doubling(), 4).unwrap();
        assert_eq!(four, vec![(TorsionVector::zero(1), 1)]);
        assert_eq!(
            periodic_level(&cat(1, 3), 4),
            Err(Error::LevelMismatch {
                translation: 3,
                level: 4
            })
        );
        assert!(matches!(
            periodic_level_with_budget(&cat(0, 1), 100, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn periodic_level_is_lexicographic() {
        let pts = periodic_level(&doubling(), 6).unwrap();
        let at6: Vec<u64> = pts.iter().map(|(x, _)| x.numerators_at(6).unwrap()[0]).collect();
        assert_eq!(at6, vec![0, 2, 4]);
        assert_eq!(pts[1].1, 2);
    }
}
