use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::coset::{image_coset, lcm_of_denominators, rational_dot, TorsionCoset};
use super::map::AffineTorusMap;
use super::point::TorsionVector;
use super::scalar::{frac, ScalarGroupElement};
use crate::error::{Error, Result};
use crate::lattice::{
    cyclotomic_orders, left_kernel, min_poly, orders_with_totient_at_most, right_kernel,
    row_lattice_basis, snf, unimodular_inverse, IntMatrix,
};

/// `lcm{n : φ(n) ≤ d}`: every root-of-unity eigenvalue of a `d × d` integer
/// matrix has an order dividing this.
pub fn default_k_max(d: usize) -> u64 {
    orders_with_totient_at_most(d)
        .into_iter()
        .fold(1u64, |acc, n| acc.lcm(&n))
}

/// A character `x^w` with `x^w ∘ σ^k = x^w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedCharacter {
    pub k: u64,
    pub w: Vec<BigInt>,
}

impl FixedCharacter {
    pub fn verify(&self, sigma: &AffineTorusMap) -> std::result::Result<(), String> {
        if self.w.iter().all(Zero::is_zero) {
            return Err("character is trivial".into());
        }
        if self.w.len() != sigma.dim() {
            return Err("character has the wrong length".into());
        }
        let it = sigma.iterate(self.k);
        if it.matrix().transpose().mul_vec(&self.w) != self.w {
            return Err(format!("(M^T)^{} w ≠ w", self.k));
        }
        let pairing = it.translation_pairing(&self.w);
        if !pairing.is_identity() {
            return Err(format!("y_{}^w = {pairing} ≠ 1", self.k));
        }
        Ok(())
    }
}

impl fmt::Display for FixedCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.w.iter().map(|x| x.to_string()).collect();
        write!(f, "k={} w=({})", self.k, w.join(","))
    }
}

/// Characters `w` with `M^T w = w` and no free part in `y^w`, as Hermite rows.
pub(crate) fn invariant_characters(phi: &AffineTorusMap) -> IntMatrix {
    let d = phi.dim();
    let mut a = phi.matrix().transpose().minus_identity();
    let free = phi.free_exponents();
    for j in 0..phi.generator_count() {
        let col: Vec<BigRational> = free.iter().map(|row| row[j].clone()).collect();
        let l = lcm_of_denominators(&col);
        let row: Vec<BigInt> = col
            .iter()
            .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
            .collect();
        a = a.vstack(&IntMatrix::from_big_rows(vec![row], d).expect("row length d"));
    }
    right_kernel(&a)
}

/// Sublattice of the row lattice of `basis` on which `w · t ≡ 0 (mod 1)`.
pub(crate) fn torsion_trivial_sublattice(basis: &IntMatrix, t: &[BigRational]) -> IntMatrix {
    let s = basis.rows();
    if s == 0 {
        return basis.clone();
    }
    let pairings: Vec<BigRational> = (0..s).map(|i| rational_dot(basis.row(i), t)).collect();
    let den = lcm_of_denominators(&pairings);
    let mut col: Vec<Vec<BigInt>> = pairings
        .iter()
        .map(|x| vec![(x * BigRational::from_integer(den.clone())).to_integer()])
        .collect();
    col.push(vec![den]);
    let ker = left_kernel(&IntMatrix::from_big_rows(col, 1).expect("column"));
    let c = ker.submatrix(0..ker.rows(), 0..s);
    row_lattice_basis(&(&c * basis))
}

/// Smallest `k ≤ k_max` (default [`default_k_max`]) with a nonzero character
/// fixed by `σ^k`, scalars included.
pub fn fixed_monomial_character(sigma: &AffineTorusMap, k_max: Option<u64>) -> Result<Option<FixedCharacter>> {
    if !sigma.is_automorphism() {
        return Err(Error::NotAutomorphism(sigma.det().to_string()));
    }
    let k_max = k_max.unwrap_or_else(|| default_k_max(sigma.dim()));
    let orders: Vec<u64> = cyclotomic_orders(&min_poly(sigma.matrix()))
        .into_iter()
        .map(|(n, _)| n)
        .collect();
    let mut candidates = Vec::new();
    for mask in 1u32..(1 << orders.len()) {
        let l = (0..orders.len())
            .filter(|i| mask & (1 << i) != 0)
            .fold(1u64, |acc, i| acc.lcm(&orders[i]));
        if l <= k_max {
            candidates.push(l);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    for k in candidates {
        let it = sigma.iterate(k);
        let lattice = invariant_characters(&it);
        if lattice.rows() == 0 {
            continue;
        }
        let torsion: Vec<BigRational> = it.translation().iter().map(|y| y.torsion().clone()).collect();
        let good = torsion_trivial_sublattice(&lattice, &torsion);
        if good.rows() > 0 {
            return Ok(Some(FixedCharacter {
                k,
                w: good.row(0).to_vec(),
            }));
        }
    }
    Ok(None)
}

/// `σ|_C` in coordinates `U = [W; V]`, where `W` are the characters of `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetRestriction {
    pub map: AffineTorusMap,
    pub coordinates: IntMatrix,
    pub inverse: IntMatrix,
    pub coset: TorsionCoset,
}

impl CosetRestriction {
    pub fn codim(&self) -> usize {
        self.coset.codim()
    }

    /// Coordinates `V a` of a point of `C`.
    pub fn project(&self, x: &TorsionVector) -> Result<TorsionVector> {
        if !self.coset.contains(x) {
            return Err(Error::Shape(format!("{x} is not on {}", self.coset)));
        }
        let a = x.to_rationals();
        let r = self.codim();
        let coords: Vec<BigRational> = (r..self.coordinates.rows())
            .map(|i| frac(&rational_dot(self.coordinates.row(i), &a)))
            .collect();
        TorsionVector::from_rationals(&coords)
    }

    /// The point of `C` with coordinates `c`.
    pub fn lift(&self, c: &TorsionVector) -> Result<TorsionVector> {
        if c.dim() != self.map.dim() {
            return Err(Error::DimensionMismatch(self.map.dim(), c.dim()));
        }
        let mut b = self.coset.targets().to_vec();
        b.extend(c.to_rationals());
        let a: Vec<BigRational> = (0..self.inverse.rows())
            .map(|i| frac(&rational_dot(self.inverse.row(i), &b)))
            .collect();
        TorsionVector::from_rationals(&a)
    }
}

pub fn restrict_to_coset(sigma: &AffineTorusMap, c: &TorsionCoset) -> Result<CosetRestriction> {
    let d = sigma.dim();
    if image_coset(sigma, c)?.as_ref() != Some(c) {
        return Err(Error::NotInvariant);
    }
    let r = c.codim();
    if r == 0 {
        return Ok(CosetRestriction {
            map: sigma.clone(),
            coordinates: IntMatrix::identity(d),
            inverse: IntMatrix::identity(d),
            coset: c.clone(),
        });
    }
    let w = c.characters();
    let smith = snf(w);
    let qinv = unimodular_inverse(&smith.v).expect("SNF transform is unimodular");
    let v = qinv.select_rows(r..d);
    let u = w.vstack(&v);
    let uinv = unimodular_inverse(&u).ok_or_else(|| Error::Inconsistent("coset coordinates are not unimodular".into()))?;
    let conj = &(&u * sigma.matrix()) * &uinv;
    if (0..r).any(|i| (r..d).any(|j| !conj[(i, j)].is_zero())) {
        return Err(Error::Inconsistent("conjugated matrix is not block triangular".into()));
    }
    let block = conj.submatrix(r..d, r..d);
    let torsion: Vec<BigRational> = sigma.translation().iter().map(|y| y.torsion().clone()).collect();
    let free = sigma.free_exponents();
    let g = sigma.generator_count();
    let translation = (r..d)
        .map(|i| {
            let row = u.row(i);
            let coupling: Vec<BigInt> = (0..r).map(|j| conj[(i, j)].clone()).collect();
            let t = rational_dot(row, &torsion) + rational_dot(&coupling, c.targets());
            let f = (0..g)
                .map(|j| {
                    let col: Vec<BigRational> = free.iter().map(|x| x[j].clone()).collect();
                    rational_dot(row, &col)
                })
                .collect();
            ScalarGroupElement::new(t, f)
        })
        .collect();
    Ok(CosetRestriction {
        map: AffineTorusMap::from_parts(block, translation, g),
        coordinates: u,
        inverse: uinv,
        coset: c.clone(),
    })
}
