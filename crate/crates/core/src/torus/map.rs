use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::scalar::ScalarGroupElement;
use crate::error::{Error, Result};
use crate::lattice::IntMatrix;

/// `Φ = τ_y ∘ Φ0` on `G_m^d`: `Φ(x)_i = y_i ∏_j x_j^{M_ij}`.
///
/// On exponent vectors this is `a ↦ M a + y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineTorusMap {
    matrix: IntMatrix,
    translation: Vec<ScalarGroupElement>,
    generators: usize,
}

impl AffineTorusMap {
    pub fn new(matrix: IntMatrix, translation: Vec<ScalarGroupElement>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "exponent matrix is {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let d = matrix.rows();
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if translation.len() != d {
            return Err(Error::DimensionMismatch(d, translation.len()));
        }
        let generators = translation[0].generator_count();
        if translation.iter().any(|y| y.generator_count() != generators) {
            return Err(Error::Shape("translation scalars use different generator counts".into()));
        }
        if matrix.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(AffineTorusMap {
            matrix,
            translation,
            generators,
        })
    }

    /// Pure group endomorphism `x ↦ x^M`.
    pub fn endomorphism(matrix: IntMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, vec![ScalarGroupElement::identity(0); d])
    }

    /// Translation `x ↦ y·x`.
    pub fn translation_only(translation: Vec<ScalarGroupElement>) -> Result<Self> {
        Self::new(IntMatrix::identity(translation.len()), translation)
    }

    pub fn identity(d: usize, generators: usize) -> Result<Self> {
        Self::new(
            IntMatrix::identity(d),
            vec![ScalarGroupElement::identity(generators); d],
        )
    }

    /// Unvalidated constructor used for restrictions, which may be zero-dimensional.
    pub(crate) fn from_parts(
        matrix: IntMatrix,
        translation: Vec<ScalarGroupElement>,
        generators: usize,
    ) -> Self {
        debug_assert!(matrix.is_square() && matrix.rows() == translation.len());
        AffineTorusMap {
            matrix,
            translation,
            generators,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn translation(&self) -> &[ScalarGroupElement] {
        &self.translation
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn det(&self) -> BigInt {
        self.matrix.det()
    }

    pub fn is_automorphism(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn has_zero_translation(&self) -> bool {
        self.translation.iter().all(ScalarGroupElement::is_identity)
    }

    pub fn is_torsion_translation(&self) -> bool {
        self.translation.iter().all(ScalarGroupElement::is_torsion)
    }

    /// The same map without its translation.
    pub fn linear_part(&self) -> AffineTorusMap {
        AffineTorusMap::from_parts(
            self.matrix.clone(),
            vec![ScalarGroupElement::identity(self.generators); self.dim()],
            self.generators,
        )
    }

    /// Torsion exponents of the translation, or an error if any free part is nonzero.
    pub fn torsion_translation(&self) -> Result<Vec<BigRational>> {
        if !self.is_torsion_translation() {
            return Err(Error::NonTorsionTranslation);
        }
        Ok(self.translation.iter().map(|y| y.torsion().clone()).collect())
    }

    /// Least common denominator of the torsion translation.
    pub fn translation_level(&self) -> Result<u64> {
        let t = self.torsion_translation()?;
        let l = t.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        l.to_u64().ok_or(Error::LevelOverflow)
    }

    /// `d × r` matrix of free exponents (row `i` belongs to `y_i`).
    pub fn free_exponents(&self) -> Vec<Vec<BigRational>> {
        self.translation.iter().map(|y| y.free().to_vec()).collect()
    }

    /// `y^w = ∏ y_i^{w_i}`: the scalar by which the monomial `x^w` is twisted
    /// when pulled back, `x^w ∘ Φ = y^w · x^{Mᵀ w}`.
    pub fn translation_pairing(&self, w: &[BigInt]) -> ScalarGroupElement {
        ScalarGroupElement::monomial(&self.translation, w)
    }

    /// `M` applied to a vector of scalars: `(M y)_i = ∏_j y_j^{M_ij}`.
    fn act_on_scalars(&self, ys: &[ScalarGroupElement]) -> Vec<ScalarGroupElement> {
        (0..self.dim())
            .map(|i| ScalarGroupElement::monomial(ys, self.matrix.row(i)))
            .collect()
    }

    /// `self ∘ other`: matrix `M1 M2`, translation `y1 · M1(y2)`.
    pub fn compose(&self, other: &AffineTorusMap) -> Result<AffineTorusMap> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if self.generators != other.generators {
            return Err(Error::Shape(format!(
                "generator models differ ({} vs {})",
                self.generators, other.generators
            )));
        }
        let moved = self.act_on_scalars(&other.translation);
        let translation = self
            .translation
            .iter()
            .zip(&moved)
            .map(|(a, b)| a.mul(b))
            .collect();
        Ok(AffineTorusMap::from_parts(
            &self.matrix * &other.matrix,
            translation,
            self.generators,
        ))
    }

    /// `Φ^n`, with translation exponent `Σ_{i<n} M^i y`.
    pub fn iterate(&self, n: u64) -> AffineTorusMap {
        let mut result = AffineTorusMap::from_parts(
            IntMatrix::identity(self.dim()),
            vec![ScalarGroupElement::identity(self.generators); self.dim()],
            self.generators,
        );
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.compose(&base).expect("same model");
            }
            n >>= 1;
            if n > 0 {
                base = base.compose(&base).expect("same model");
            }
        }
        result
    }

    /// Image of an arbitrary point given by scalar coordinates.
    pub fn apply_scalars(&self, x: &[ScalarGroupElement]) -> Vec<ScalarGroupElement> {
        assert_eq!(x.len(), self.dim());
        self.act_on_scalars(x)
            .iter()
            .zip(&self.translation)
            .map(|(a, y)| a.mul(y))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_map() -> AffineTorusMap {
        AffineTorusMap::translation_only(vec![ScalarGroupElement::generator(0, 1)]).unwrap()
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert_eq!(
            AffineTorusMap::endomorphism(IntMatrix::zeros(0, 0)),
            Err(Error::ZeroDimension)
        );
        assert_eq!(
            AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[1, 2], [2, 4]])),
            Err(Error::Singular)
        );
        assert!(AffineTorusMap::new(
            IntMatrix::identity(2),
            vec![ScalarGroupElement::identity(0)]
        )
        .is_err());
    }

    #[test]
    fn compose_examples() {
        let phi = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[0, -1], [1, 1]])).unwrap();
        let id = AffineTorusMap::identity(2, 0).unwrap();
        assert_eq!(phi.compose(&id).unwrap(), phi);
        let sq = phi.compose(&phi).unwrap();
        assert_eq!(sq.matrix(), &IntMatrix::from_rows(&[[-1, -1], [1, 0]]));

        let q = q_map();
        let q2 = q.compose(&q).unwrap();
        assert_eq!(q2.matrix(), &IntMatrix::identity(1));
        assert_eq!(q2.translation()[0], ScalarGroupElement::generator(0, 1).pow(&2.into()));
        assert!(phi.compose(&q).is_err());
    }

    #[test]
    fn iterate_examples() {
        let q = q_map();
        assert_eq!(q.iterate(0), AffineTorusMap::identity(1, 1).unwrap());
        assert_eq!(q.iterate(1), q);
        assert_eq!(
            q.iterate(5).translation()[0],
            ScalarGroupElement::generator(0, 1).pow(&5.into())
        );
    }

    #[test]
    fn pairing_pulls_back_monomials() {
        // Φ(x) = (ζ3 x1 x2, q x2); x^w ∘ Φ = y^w x^{Mᵀ w}
        let y = vec![
            ScalarGroupElement::root_of_unity(1, 3, 1),
            ScalarGroupElement::generator(0, 1),
        ];
        let phi = AffineTorusMap::new(IntMatrix::from_rows(&[[1, 1], [0, 1]]), y).unwrap();
        let w = vec![BigInt::from(3), BigInt::from(0)];
        let pair = phi.translation_pairing(&w);
        assert!(pair.is_identity());
        let w = vec![BigInt::from(0), BigInt::from(1)];
        assert!(!phi.translation_pairing(&w).is_torsion());
        assert_eq!(phi.translation_level(), Err(Error::NonTorsionTranslation));
    }
}
