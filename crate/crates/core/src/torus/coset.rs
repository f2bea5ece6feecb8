use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::map::AffineTorusMap;
use super::point::TorsionVector;
use super::scalar::frac;
use crate::error::{Error, Result};
use crate::lattice::{
    hnf, left_kernel, rank, right_kernel, snf, solve_in_rows, unimodular_inverse, IntMatrix,
    LatticeBasis,
};

/// `{x : x^{w_i} = e^{2πi t_i}}` for a saturated, independent set of characters `w_i`.
///
/// Stored canonically: characters in Hermite form, targets transformed along
/// and reduced into `[0, 1)`, so equal cosets compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionCoset {
    characters: IntMatrix,
    targets: Vec<BigRational>,
}

fn dot(w: &[BigInt], a: &[BigRational]) -> BigRational {
    w.iter()
        .zip(a)
        .map(|(wi, ai)| ai * BigRational::from_integer(wi.clone()))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

fn transform_targets(u: &IntMatrix, targets: &[BigRational]) -> Vec<BigRational> {
    (0..u.rows())
        .map(|i| frac(&dot(u.row(i), targets)))
        .collect()
}

impl TorsionCoset {
    pub fn new(characters: IntMatrix, targets: Vec<BigRational>) -> Result<Self> {
        if characters.rows() != targets.len() {
            return Err(Error::DimensionMismatch(characters.rows(), targets.len()));
        }
        if characters.cols() == 0 {
            return Err(Error::ZeroDimension);
        }
        if rank(&characters) != characters.rows() {
            return Err(Error::Shape("coset characters must be linearly independent".into()));
        }
        if !LatticeBasis::span(&characters).is_saturated() {
            return Err(Error::NotSaturated);
        }
        let (h, u) = hnf(&characters);
        let targets = transform_targets(&u, &targets);
        Ok(TorsionCoset {
            characters: h,
            targets,
        })
    }

    /// Convenience constructor from small integer rows and `(a, N)` targets.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], targets: &[(i64, i64)], d: usize) -> Result<Self> {
        let w = if rows.is_empty() {
            IntMatrix::zeros(0, d)
        } else {
            IntMatrix::from_rows(rows)
        };
        let t = targets
            .iter()
            .map(|&(a, n)| BigRational::new(a.into(), n.into()))
            .collect();
        Self::new(w, t)
    }

    /// The whole torus.
    pub fn full(d: usize) -> Self {
        TorsionCoset {
            characters: IntMatrix::zeros(0, d),
            targets: Vec::new(),
        }
    }

    /// The single point `x`.
    pub fn point(x: &TorsionVector) -> Self {
        TorsionCoset {
            characters: IntMatrix::identity(x.dim()),
            targets: x.to_rationals(),
        }
    }

    /// Solution set of arbitrary character equations, split into torsion cosets.
    pub fn from_equations(characters: &IntMatrix, targets: &[BigRational]) -> Result<Vec<Self>> {
        if characters.rows() != targets.len() {
            return Err(Error::DimensionMismatch(characters.rows(), targets.len()));
        }
        let d = characters.cols();
        let (h, u) = hnf(characters);
        let t = transform_targets(&u, targets);
        let mut live = Vec::new();
        for i in 0..h.rows() {
            if h.row(i).iter().all(Zero::is_zero) {
                if !t[i].is_zero() {
                    return Err(Error::InconsistentCoset);
                }
            } else {
                live.push(i);
            }
        }
        if live.is_empty() {
            return Ok(vec![Self::full(d)]);
        }
        let h = h.select_rows(live.iter().copied());
        let t: Vec<BigRational> = live.iter().map(|&i| t[i].clone()).collect();
        let r = h.rows();
        // P H Q = diag(s); with b = Q^{-1} a the system reads s_i b_i = (P t)_i.
        let smith = snf(&h);
        let qinv = unimodular_inverse(&smith.v).expect("SNF transform is unimodular");
        let chars = qinv.select_rows(0..r);
        let pt: Vec<BigRational> = (0..r).map(|i| dot(smith.u.row(i), &t)).collect();
        let s: Vec<u64> = (0..r)
            .map(|i| smith.s[(i, i)].to_u64().ok_or(Error::LevelOverflow))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        let mut k = vec![0u64; r];
        loop {
            let targets = (0..r)
                .map(|i| (&pt[i] + BigRational::from_integer(k[i].into())) / BigRational::from_integer(s[i].into()))
                .collect();
            out.push(Self::new(chars.clone(), targets)?);
            let mut i = 0;
            while i < r {
                k[i] += 1;
                if k[i] < s[i] {
                    break;
                }
                k[i] = 0;
                i += 1;
            }
            if i == r {
                break;
            }
        }
        out.sort_by(|a, b| a.targets.cmp(&b.targets));
        Ok(out)
    }

    pub fn ambient_dim(&self) -> usize {
        self.characters.cols()
    }

    pub fn codim(&self) -> usize {
        self.characters.rows()
    }

    pub fn dimension(&self) -> usize {
        self.ambient_dim() - self.codim()
    }

    pub fn characters(&self) -> &IntMatrix {
        &self.characters
    }

    pub fn targets(&self) -> &[BigRational] {
        &self.targets
    }

    pub fn is_proper(&self) -> bool {
        self.codim() > 0
    }

    pub fn is_point(&self) -> bool {
        self.dimension() == 0
    }

    pub fn contains_rationals(&self, a: &[BigRational]) -> bool {
        assert_eq!(a.len(), self.ambient_dim());
        (0..self.codim()).all(|i| frac(&dot(self.characters.row(i), a)) == self.targets[i])
    }

    pub fn contains(&self, x: &TorsionVector) -> bool {
        if x.dim() != self.ambient_dim() {
            return false;
        }
        let n = x.level();
        let a = x.numerators();
        (0..self.codim()).all(|i| {
            let row = self.characters.row(i);
            let s: BigInt = row.iter().zip(a).map(|(w, &ai)| w * BigInt::from(ai)).sum();
            frac(&BigRational::new(s, n.into())) == self.targets[i]
        })
    }

    /// The unique point of a zero-dimensional coset.
    pub fn as_point(&self) -> Option<TorsionVector> {
        if !self.is_point() {
            return None;
        }
        let inv = unimodular_inverse(&self.characters)?;
        let a: Vec<BigRational> = (0..inv.rows()).map(|i| dot(inv.row(i), &self.targets)).collect();
        TorsionVector::from_rationals(&a).ok()
    }
}

impl fmt::Display for TorsionCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.codim() == 0 {
            return write!(f, "G_m^{}", self.ambient_dim());
        }
        write!(f, "{{")?;
        for i in 0..self.codim() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.characters.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "x^({}) = ζ^({})", row.join(","), self.targets[i])?;
        }
        write!(f, "}}")
    }
}

/// `Φ(C)`, or `None` when the image is a translate by a non-torsion point.
pub fn image_coset(phi: &AffineTorusMap, c: &TorsionCoset) -> Result<Option<TorsionCoset>> {
    let d = phi.dim();
    if c.ambient_dim() != d {
        return Err(Error::DimensionMismatch(d, c.ambient_dim()));
    }
    let w = c.characters();
    // Characters of the image subgroup M(K), K = ker W: u with u^T M K = 0.
    let image_chars = if c.is_point() {
        IntMatrix::identity(d)
    } else {
        let k = right_kernel(w);
        left_kernel(&(phi.matrix() * &k.transpose()))
    };
    let r = image_chars.rows();
    if r == 0 {
        return Ok(Some(TorsionCoset::full(d)));
    }
    let mt = phi.matrix().transpose();
    let torsion: Vec<BigRational> = phi.translation().iter().map(|y| y.torsion().clone()).collect();
    let mut targets = Vec::with_capacity(r);
    for i in 0..r {
        let u = image_chars.row(i);
        let pairing = phi.translation_pairing(u);
        if !pairing.is_torsion() {
            return Ok(None);
        }
        let coeffs = solve_in_rows(w, &mt.mul_vec(u))
            .ok_or_else(|| Error::Inconsistent("image character does not pull back into the coset lattice".into()))?;
        let t = dot(&coeffs, c.targets()) + dot(u, &torsion);
        targets.push(frac(&t));
    }
    TorsionCoset::new(image_chars, targets).map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CosetPeriodicity {
    Periodic(u64),
    NotWithin(u64),
}

/// Smallest `n ≤ n_max` with `Φ^n(C) = C`.
pub fn is_periodic_coset(phi: &AffineTorusMap, c: &TorsionCoset, n_max: u64) -> Result<CosetPeriodicity> {
    let mut iter = phi.clone();
    for n in 1..=n_max {
        if image_coset(&iter, c)?.as_ref() == Some(c) {
            return Ok(CosetPeriodicity::Periodic(n));
        }
        iter = phi.compose(&iter)?;
    }
    Ok(CosetPeriodicity::NotWithin(n_max))
}

pub(crate) fn rational_dot(w: &[BigInt], a: &[BigRational]) -> BigRational {
    dot(w, a)
}

pub(crate) fn lcm_of_denominators(xs: &[BigRational]) -> BigInt {
    xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap() -> AffineTorusMap {
        AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap()
    }

    #[test]
    fn canonical_form() {
        let a = TorsionCoset::from_rows(&[[1, 1], [0, 1]], &[(1, 2), (1, 3)], 2).unwrap();
        let b = TorsionCoset::from_rows(&[[1, 0], [0, 1]], &[(1, 6), (1, 3)], 2).unwrap();
        assert_eq!(a, b);
        assert!(a.is_point());
        assert_eq!(a.as_point().unwrap(), TorsionVector::new(&[1, 2], 6).unwrap());
        assert_eq!(
            TorsionCoset::from_rows(&[[2, 0]], &[(0, 1)], 2),
            Err(Error::NotSaturated)
        );
    }

    #[test]
    fn membership() {
        let c = TorsionCoset::from_rows(&[[1, 0]], &[(0, 1)], 2).unwrap();
        assert!(c.contains(&TorsionVector::new(&[0, 3], 7).unwrap()));
        assert!(!c.contains(&TorsionVector::new(&[1, 2], 5).unwrap()));
        assert!(TorsionCoset::full(2).contains(&TorsionVector::new(&[1, 2], 5).unwrap()));
    }

    #[test]
    fn equations_split_into_cosets() {
        // x^2 = 1 is two cosets, x = ±1
        let w = IntMatrix::from_rows(&[[2, 0]]);
        let cs = TorsionCoset::from_equations(&w, &[BigRational::zero()]).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.codim() == 1));
        assert!(cs[1].contains(&TorsionVector::new(&[1, 0], 2).unwrap()));
        let w = IntMatrix::from_rows(&[[1, 0], [2, 0]]);
        let t = [BigRational::zero(), BigRational::new(1.into(), 2.into())];
        assert_eq!(TorsionCoset::from_equations(&w, &t), Err(Error::InconsistentCoset));
    }

    #[test]
    fn periodic_coset_examples() {
        let jordan = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[0, 1], [-1, 1]])).unwrap();
        assert_eq!(
            is_periodic_coset(&jordan, &TorsionCoset::full(2), 5).unwrap(),
            CosetPeriodicity::Periodic(1)
        );
        let diag = TorsionCoset::from_rows(&[[1, 1]], &[(0, 1)], 2).unwrap();
        assert_eq!(is_periodic_coset(&swap(), &diag, 5).unwrap(), CosetPeriodicity::Periodic(1));
        let axis = TorsionCoset::from_rows(&[[1, 0]], &[(0, 1)], 2).unwrap();
        assert_eq!(is_periodic_coset(&swap(), &axis, 5).unwrap(), CosetPeriodicity::Periodic(2));
        let image = image_coset(&swap(), &axis).unwrap().unwrap();
        assert_eq!(image, TorsionCoset::from_rows(&[[0, 1]], &[(0, 1)], 2).unwrap());
    }

    #[test]
    fn image_of_point_matches_apply() {
        let cat = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[2, 1], [1, 1]])).unwrap();
        let x = TorsionVector::new(&[1, 2], 5).unwrap();
        let img = image_coset(&cat, &TorsionCoset::point(&x)).unwrap().unwrap();
        assert_eq!(img.as_point().unwrap(), TorsionVector::new(&[4, 3], 5).unwrap());
    }

    #[test]
    fn free_translation_moves_off_torsion() {
        use crate::torus::ScalarGroupElement;
        let q = AffineTorusMap::translation_only(vec![ScalarGroupElement::generator(0, 1)]).unwrap();
        let c = TorsionCoset::from_rows(&[[1]], &[(0, 1)], 1).unwrap();
        assert_eq!(image_coset(&q, &c).unwrap(), None);
        assert_eq!(is_periodic_coset(&q, &c, 10).unwrap(), CosetPeriodicity::NotWithin(10));
    }
}
