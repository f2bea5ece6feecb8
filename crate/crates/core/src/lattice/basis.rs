use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use super::normal_form::{right_kernel, row_lattice_basis, snf};
use super::poly::{cyclotomic_orders, min_poly};
use crate::error::{Error, Result};

/// Sublattice of `Z^d` stored by its canonical Hermite basis.
///
/// Two lattices are equal iff their stored bases are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBasis {
    basis: IntMatrix,
    saturated: bool,
}

impl LatticeBasis {
    /// Lattice spanned by the rows of `generators` (dependent rows allowed).
    pub fn span(generators: &IntMatrix) -> Self {
        let basis = row_lattice_basis(generators);
        let saturated = snf(&basis).invariant_factors().iter().all(One::is_one);
        LatticeBasis { basis, saturated }
    }

    pub fn zero(dim: usize) -> Self {
        LatticeBasis {
            basis: IntMatrix::zeros(0, dim),
            saturated: true,
        }
    }

    pub fn full(dim: usize) -> Self {
        LatticeBasis {
            basis: IntMatrix::identity(dim),
            saturated: true,
        }
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// `(Q-span) ∩ Z^d`, computed as the double orthogonal complement.
    pub fn saturate(&self) -> Self {
        if self.saturated {
            return self.clone();
        }
        let complement = right_kernel(&self.basis);
        let basis = right_kernel(&complement);
        LatticeBasis {
            basis,
            saturated: true,
        }
    }

    /// Membership in the Z-span, by reduction against the echelon basis.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ambient_dim());
        let mut v = v.to_vec();
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let c = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            if v[..c].iter().any(|x| !x.is_zero()) {
                return false;
            }
            let (q, r) = v[c].div_rem(&row[c]);
            if !r.is_zero() {
                return false;
            }
            for (x, b) in v.iter_mut().zip(row) {
                *x -= &q * b;
            }
        }
        v.iter().all(Zero::is_zero)
    }

    /// Membership in the rational span.
    pub fn contains_rationally(&self, v: &[BigInt]) -> bool {
        self.saturate().contains(v)
    }
}

/// Saturated basis of `ker(M^k - I) ∩ Z^d`.
pub fn fixed_lattice(m: &IntMatrix, k: u64) -> LatticeBasis {
    assert!(m.is_square() && k >= 1);
    let kernel = right_kernel(&m.pow(k).minus_identity());
    LatticeBasis {
        basis: kernel,
        saturated: true,
    }
}

/// Multiplicative order of an integer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn is_finite(self) -> bool {
        matches!(self, Order::Finite(_))
    }
}

/// Order of `M` in `GL_d(Z)`.
///
/// A finite order forces a squarefree minimal polynomial that is a product of
/// cyclotomic factors; the candidate is the lcm of their orders, confirmed by
/// a direct power.
pub fn matrix_order(m: &IntMatrix) -> Result<Order> {
    if !m.is_square() {
        return Err(Error::Shape("order of a non-square matrix".into()));
    }
    let det = m.det();
    if !det.abs().is_one() {
        return Err(Error::NotAutomorphism(det.to_string()));
    }
    let f = min_poly(m);
    let orders = cyclotomic_orders(&f);
    if orders.iter().any(|&(_, mult)| mult > 1) {
        return Ok(Order::Infinite);
    }
    let covered: usize = orders
        .iter()
        .map(|&(n, _)| super::poly::totient(n) as usize)
        .sum();
    if covered != f.deg() {
        return Ok(Order::Infinite);
    }
    let n = orders.iter().fold(1u64, |acc, &(k, _)| acc.lcm(&k));
    if m.pow(n).is_identity() {
        Ok(Order::Finite(n))
    } else {
        Err(Error::Inconsistent(format!(
            "cyclotomic minimal polynomial but M^{n} != I"
        )))
    }
}

/// Integer vector with gcd 1 and first nonzero entry positive.
pub fn primitive_part(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let mut out: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in out.iter_mut() {
            *x = -std::mem::take(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn saturate_examples() {
        let l = LatticeBasis::span(&IntMatrix::from_rows(&[[2, 0]]));
        assert!(!l.is_saturated());
        assert_eq!(l.saturate().basis(), &IntMatrix::from_rows(&[[1, 0]]));

        let l = LatticeBasis::span(&IntMatrix::from_rows(&[[2, 4]]));
        assert_eq!(l.saturate().basis(), &IntMatrix::from_rows(&[[1, 2]]));

        let l = LatticeBasis::span(&IntMatrix::from_rows(&[[1, 1], [1, -1]]));
        assert!(!l.is_saturated());
        assert_eq!(l.saturate(), LatticeBasis::full(2));
        assert_eq!(l.saturate().saturate(), l.saturate());
    }

    #[test]
    fn membership() {
        let l = LatticeBasis::span(&IntMatrix::from_rows(&[[1, 1], [1, -1]]));
        assert!(l.contains(&big(&[2, 0])));
        assert!(!l.contains(&big(&[1, 0])));
        assert!(l.contains_rationally(&big(&[1, 0])));
        assert!(LatticeBasis::zero(3).contains(&big(&[0, 0, 0])));
    }

    #[test]
    fn order_examples() {
        let rot = IntMatrix::from_rows(&[[0, -1], [1, 0]]);
        assert_eq!(matrix_order(&rot), Ok(Order::Finite(4)));
        let six = IntMatrix::from_rows(&[[0, -1], [1, 1]]);
        assert_eq!(matrix_order(&six), Ok(Order::Finite(6)));
        let cat = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        assert_eq!(matrix_order(&cat), Ok(Order::Infinite));
        let shear = IntMatrix::from_rows(&[[1, 1], [0, 1]]);
        assert_eq!(matrix_order(&shear), Ok(Order::Infinite));
        assert_eq!(matrix_order(&IntMatrix::identity(3)), Ok(Order::Finite(1)));
        assert!(matrix_order(&IntMatrix::from_rows(&[[2]])).is_err());
    }

    #[test]
    fn fixed_lattice_examples() {
        assert_eq!(fixed_lattice(&IntMatrix::identity(3), 1), LatticeBasis::full(3));
        let cat = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        for k in 1..=12 {
            assert_eq!(fixed_lattice(&cat, k).rank(), 0);
        }
        let six = IntMatrix::from_rows(&[[0, -1], [1, 1]]);
        assert_eq!(fixed_lattice(&six, 6), LatticeBasis::full(2));
        assert_eq!(fixed_lattice(&six, 3).rank(), 0);
    }

    #[test]
    fn primitive_part_normalizes() {
        assert_eq!(primitive_part(&big(&[0, -4, 6])), big(&[0, 2, -3]));
        assert_eq!(primitive_part(&big(&[0, 0])), big(&[0, 0]));
    }
}
