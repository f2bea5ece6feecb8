use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Reduces a rational into `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// An element of `k*` in the finite model `ζ^a · g_1^{e_1} ⋯ g_r^{e_r}`.
///
/// `ζ^a` stands for `e^{2πi a}` with `a ∈ [0, 1)`, and the `g_i` are declared
/// multiplicatively independent modulo torsion. The group law is written
/// additively on exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarGroupElement {
    torsion: BigRational,
    free: Vec<BigRational>,
}

impl ScalarGroupElement {
    pub fn new(torsion: BigRational, free: Vec<BigRational>) -> Self {
        ScalarGroupElement {
            torsion: frac(&torsion),
            free,
        }
    }

    pub fn identity(generators: usize) -> Self {
        Self::new(BigRational::zero(), vec![BigRational::zero(); generators])
    }

    /// `e^{2πi a/n}`.
    pub fn root_of_unity(a: i64, n: i64, generators: usize) -> Self {
        Self::new(
            BigRational::new(a.into(), n.into()),
            vec![BigRational::zero(); generators],
        )
    }

    /// The `i`-th free generator out of `generators`.
    pub fn generator(i: usize, generators: usize) -> Self {
        let mut free = vec![BigRational::zero(); generators];
        free[i] = BigRational::one();
        Self::new(BigRational::zero(), free)
    }

    pub fn torsion(&self) -> &BigRational {
        &self.torsion
    }

    pub fn free(&self) -> &[BigRational] {
        &self.free
    }

    pub fn generator_count(&self) -> usize {
        self.free.len()
    }

    pub fn is_torsion(&self) -> bool {
        self.free.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.torsion.is_zero() && self.is_torsion()
    }

    /// Order of a torsion element; `None` when a free exponent is nonzero.
    pub fn order(&self) -> Option<BigInt> {
        self.is_torsion().then(|| self.torsion.denom().clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.free.len(), other.free.len(), "generator count mismatch");
        Self::new(
            &self.torsion + &other.torsion,
            self.free.iter().zip(&other.free).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn pow(&self, k: &BigInt) -> Self {
        let k = BigRational::from_integer(k.clone());
        Self::new(
            &self.torsion * &k,
            self.free.iter().map(|e| e * &k).collect(),
        )
    }

    pub fn inverse(&self) -> Self {
        self.pow(&BigInt::from(-1))
    }

    /// `∏ y_i^{w_i}`.
    pub fn monomial(ys: &[ScalarGroupElement], w: &[BigInt]) -> Self {
        assert_eq!(ys.len(), w.len());
        let generators = ys.first().map_or(0, |y| y.generator_count());
        ys.iter()
            .zip(w)
            .fold(Self::identity(generators), |acc, (y, e)| acc.mul(&y.pow(e)))
    }
}

impl fmt::Display for ScalarGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.torsion.is_zero() {
            parts.push(format!("ζ^({})", self.torsion));
        }
        for (i, e) in self.free.iter().enumerate() {
            if !e.is_zero() {
                if e.is_one() {
                    parts.push(format!("g{}", i + 1));
                } else {
                    parts.push(format!("g{}^({e})", i + 1));
                }
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torsion_reduced_mod_one() {
        let a = ScalarGroupElement::root_of_unity(7, 3, 0);
        assert_eq!(a, ScalarGroupElement::root_of_unity(1, 3, 0));
        let b = ScalarGroupElement::root_of_unity(-1, 3, 0);
        assert_eq!(b, ScalarGroupElement::root_of_unity(2, 3, 0));
        assert_eq!(a.mul(&b), ScalarGroupElement::identity(0));
        assert_eq!(a.order(), Some(BigInt::from(3)));
    }

    #[test]
    fn free_part_blocks_torsion() {
        let q = ScalarGroupElement::generator(0, 1);
        assert!(!q.is_torsion());
        assert_eq!(q.order(), None);
        assert!(q.pow(&BigInt::from(5)).mul(&q.pow(&BigInt::from(-5))).is_identity());
        assert_eq!(q.to_string(), "g1");
    }
}
