use std::fmt;

use num_bigint::BigInt;

use super::coset::TorsionCoset;
use super::map::AffineTorusMap;
use super::point::{LevelMap, TorsionVector};
use crate::error::{Error, Result};
use crate::lattice::{char_poly, IntMatrix};

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Basis of the nullspace of a `d × d` residue matrix over `F_p`, each vector
/// scaled so its first nonzero entry is 1.
fn nullspace_mod(a: &[u64], d: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = a.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..d {
        let Some(r) = (row..d).find(|&r| m[r * d + col] != 0) else {
            continue;
        };
        for j in 0..d {
            m.swap(row * d + j, r * d + j);
        }
        let inv = inv_mod(m[row * d + col], p);
        for j in 0..d {
            m[row * d + j] = mul_mod(m[row * d + j], inv, p);
        }
        for r in 0..d {
            if r != row && m[r * d + col] != 0 {
                let f = m[r * d + col];
                for j in 0..d {
                    let s = mul_mod(f, m[row * d + j], p);
                    m[r * d + j] = (m[r * d + j] + p - s) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    for free in (0..d).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; d];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - m[r * d + free]) % p;
        }
        let lead = *v.iter().find(|&&x| x != 0).expect("basis vector is nonzero");
        let inv = inv_mod(lead, p);
        v.iter_mut().for_each(|x| *x = mul_mod(*x, inv, p));
        basis.push(v);
    }
    basis
}

/// Witness that `x_p = v/p` is periodic: `M v ≡ b v (mod p)` so `Φ0(x_p) = x_p^b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicFamilyCertificate {
    pub prime: u64,
    pub eigenvector: Vec<u64>,
    pub eigenvalue: u64,
    pub point: TorsionVector,
    pub period: u64,
}

impl PeriodicFamilyCertificate {
    /// Re-checks the congruence and the period from scratch.
    pub fn verify(&self, matrix: &IntMatrix) -> std::result::Result<(), String> {
        let p = self.prime;
        let d = matrix.rows();
        if !is_prime(p) {
            return Err(format!("{p} is not prime"));
        }
        if self.eigenvector.len() != d || self.eigenvector.iter().all(|&x| x % p == 0) {
            return Err("eigenvector is zero mod p".into());
        }
        if self.eigenvalue % p == 0 {
            return Err("eigenvalue is divisible by p".into());
        }
        let res = matrix.residues(p);
        for i in 0..d {
            let lhs = (0..d).fold(0u64, |acc, j| (acc + mul_mod(res[i * d + j], self.eigenvector[j], p)) % p);
            let rhs = mul_mod(self.eigenvalue, self.eigenvector[i], p);
            if lhs != rhs {
                return Err(format!("M·v ≢ b·v (mod {p}) in row {i}"));
            }
        }
        let expect = TorsionVector::from_residues(self.eigenvector.iter().map(|x| x % p).collect(), p);
        if expect != self.point {
            return Err(format!("point {} is not v/p", self.point));
        }
        let phi = AffineTorusMap::endomorphism(matrix.clone()).map_err(|e| e.to_string())?;
        let map = LevelMap::new(&phi, p).map_err(|e| e.to_string())?;
        let start = self.point.numerators_at(p).expect("level p");
        let mut cur = start.clone();
        let mut next = vec![0; d];
        for step in 1..=self.period {
            map.apply(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            if cur == start && step < self.period {
                return Err(format!("orbit closes after {step} steps, not {}", self.period));
            }
        }
        if cur != start {
            return Err(format!("orbit does not close after {} steps", self.period));
        }
        if self.period != multiplicative_order(self.eigenvalue, p) {
            return Err(format!("period {} differs from the order of b mod {p}", self.period));
        }
        Ok(())
    }
}

impl fmt::Display for PeriodicFamilyCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} v={:?} b={} point={} period={}",
            self.prime, self.eigenvector, self.eigenvalue, self.point, self.period
        )
    }
}

fn orbit_length(map: &LevelMap, start: &[u64]) -> u64 {
    let mut cur = start.to_vec();
    let mut next = vec![0; start.len()];
    let mut n = 0;
    loop {
        map.apply(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        n += 1;
        if cur == start {
            return n;
        }
    }
}

/// Primes `p ≤ budget` not dividing `det M`, with the roots of the characteristic
/// polynomial mod `p` and their eigenspaces.
fn eigen_data(matrix: &IntMatrix, budget: u64) -> impl Iterator<Item = (u64, u64, Vec<Vec<u64>>)> + '_ {
    let det = matrix.det();
    let chi = char_poly(matrix);
    let d = matrix.rows();
    primes_up_to(budget).into_iter().flat_map(move |p| {
        let skip = (&det % BigInt::from(p)) == BigInt::from(0);
        let roots: Vec<u64> = if skip {
            Vec::new()
        } else {
            (1..p).filter(|&b| chi.eval_mod(b, p) == 0).collect()
        };
        let res = matrix.residues(p);
        roots.into_iter().map(move |b| {
            let mut a = res.clone();
            for i in 0..d {
                a[i * d + i] = (a[i * d + i] + p - b % p) % p;
            }
            (p, b, nullspace_mod(&a, d, p))
        })
    })
}

fn require_endomorphism(phi: &AffineTorusMap) -> Result<()> {
    if phi.has_zero_translation() {
        Ok(())
    } else {
        Err(Error::NonzeroTranslation)
    }
}

/// One certificate per prime `p ≤ budget` (with `p ∤ det M`) and root `b` of the
/// characteristic polynomial mod `p`, in ascending order.
pub fn dense_periodic_family(phi: &AffineTorusMap, prime_budget: u64) -> Result<Vec<PeriodicFamilyCertificate>> {
    require_endomorphism(phi)?;
    let mut out = Vec::new();
    for (p, b, space) in eigen_data(phi.matrix(), prime_budget) {
        let Some(v) = space.into_iter().next() else {
            continue;
        };
        let map = LevelMap::new(phi, p)?;
        let period = orbit_length(&map, &v);
        out.push(PeriodicFamilyCertificate {
            prime: p,
            point: TorsionVector::from_residues(v.clone(), p),
            eigenvector: v,
            eigenvalue: b,
            period,
        });
    }
    if out.is_empty() {
        return Err(Error::BudgetExhausted {
            budget: prime_budget,
            detail: "no prime with a nonzero eigenvalue mod p".into(),
        });
    }
    Ok(out)
}

/// A periodic torsion point together with its full orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvoidingPoint {
    pub point: TorsionVector,
    pub orbit: Vec<TorsionVector>,
    pub certificate: Option<PeriodicFamilyCertificate>,
}

impl AvoidingPoint {
    pub fn period(&self) -> u64 {
        self.orbit.len() as u64
    }

    /// Recomputes the orbit and checks that it misses every coset.
    pub fn verify(&self, phi: &AffineTorusMap, avoid: &[TorsionCoset]) -> std::result::Result<(), String> {
        if self.orbit.first() != Some(&self.point) {
            return Err("orbit does not start at the point".into());
        }
        for (i, x) in self.orbit.iter().enumerate() {
            let next = super::point::apply_torsion(phi, x).map_err(|e| e.to_string())?;
            let expect = &self.orbit[(i + 1) % self.orbit.len()];
            if &next != expect {
                return Err(format!("Φ({x}) = {next}, expected {expect}"));
            }
            if let Some(c) = avoid.iter().find(|c| c.contains(x)) {
                return Err(format!("orbit point {x} lies in {c}"));
            }
        }
        if let Some(cert) = &self.certificate {
            cert.verify(phi.matrix())?;
        }
        Ok(())
    }
}

fn orbit_avoids(map: &LevelMap, start: &[u64], avoid: &[TorsionCoset]) -> Option<Vec<TorsionVector>> {
    let mut orbit = Vec::new();
    let mut cur = start.to_vec();
    let mut next = vec![0; start.len()];
    loop {
        let x = TorsionVector::from_residues(cur.clone(), map.n);
        if avoid.iter().any(|c| c.contains(&x)) {
            return None;
        }
        orbit.push(x);
        map.apply(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        if cur == start {
            return Some(orbit);
        }
    }
}

/// A periodic torsion point whose whole orbit misses every coset in `avoid`.
pub fn find_avoiding_periodic_point(
    phi: &AffineTorusMap,
    avoid: &[TorsionCoset],
    prime_budget: u64,
) -> Result<AvoidingPoint> {
    require_endomorphism(phi)?;
    let d = phi.dim();
    if let Some(c) = avoid.iter().find(|c| c.ambient_dim() != d) {
        return Err(Error::DimensionMismatch(d, c.ambient_dim()));
    }
    let origin = TorsionVector::zero(d);
    if !avoid.iter().any(|c| c.contains(&origin)) {
        return Ok(AvoidingPoint {
            point: origin.clone(),
            orbit: vec![origin],
            certificate: None,
        });
    }
    let mut tried = 0usize;
    for (p, b, space) in eigen_data(phi.matrix(), prime_budget) {
        let map = LevelMap::new(phi, p)?;
        let k = space.len().min(16);
        for mask in 1u32..(1 << k) {
            let mut v = vec![0u64; d];
            for (i, basis) in space.iter().enumerate().take(k) {
                if mask & (1 << i) != 0 {
                    for (x, y) in v.iter_mut().zip(basis) {
                        *x = (*x + y) % p;
                    }
                }
            }
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            tried += 1;
            if let Some(orbit) = orbit_avoids(&map, &v, avoid) {
                let point = orbit[0].clone();
                return Ok(AvoidingPoint {
                    certificate: Some(PeriodicFamilyCertificate {
                        prime: p,
                        eigenvector: v,
                        eigenvalue: b,
                        point: point.clone(),
                        period: orbit.len() as u64,
                    }),
                    point,
                    orbit,
                });
            }
        }
    }
    Err(Error::BudgetExhausted {
        budget: prime_budget,
        detail: format!("{tried} eigenvector points tried, each orbit met a coset"),
    })
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn multiplicative_order(b: u64, p: u64) -> u64 {
    let mut x = b % p;
    let mut n = 1;
    while x != 1 {
        x = mul_mod(x, b, p);
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> AffineTorusMap {
        AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[2, 1], [1, 1]])).unwrap()
    }

    #[test]
    fn sieve() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn cat_map_family() {
        let fam = dense_periodic_family(&cat(), 11).unwrap();
        let c = fam.iter().find(|c| c.prime == 5).unwrap();
        assert_eq!(c.eigenvector, vec![1, 2]);
        assert_eq!(c.eigenvalue, 4);
        assert_eq!(c.period, 2);
        assert_eq!(c.point, TorsionVector::new(&[1, 2], 5).unwrap());
        for c in &fam {
            c.verify(cat().matrix()).unwrap();
            assert_eq!(c.period, multiplicative_order(c.eigenvalue, c.prime));
        }
    }

    #[test]
    fn doubling_family() {
        let phi = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[2]])).unwrap();
        let fam = dense_periodic_family(&phi, 3).unwrap();
        assert_eq!(fam.len(), 1);
        let c = &fam[0];
        assert_eq!((c.prime, c.eigenvalue, c.period), (3, 2, 2));
        assert_eq!(c.point, TorsionVector::new(&[1], 3).unwrap());
    }

    #[test]
    fn identity_family() {
        let phi = AffineTorusMap::identity(2, 0).unwrap();
        let fam = dense_periodic_family(&phi, 7).unwrap();
        assert_eq!(fam.iter().map(|c| c.prime).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert!(fam.iter().all(|c| c.eigenvalue == 1 && c.period == 1));
    }

    #[test]
    fn family_errors() {
        let phi = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[6]])).unwrap();
        assert!(matches!(dense_periodic_family(&phi, 3), Err(Error::BudgetExhausted { .. })));
        let shifted = AffineTorusMap::translation_only(vec![crate::torus::ScalarGroupElement::root_of_unity(1, 2, 0)]).unwrap();
        assert_eq!(dense_periodic_family(&shifted, 10), Err(Error::NonzeroTranslation));
    }

    #[test]
    fn avoiding_examples() {
        let y = vec![TorsionCoset::from_rows(&[[1, 0]], &[(0, 1)], 2).unwrap()];
        let found = find_avoiding_periodic_point(&cat(), &y, 50).unwrap();
        assert_eq!(found.point, TorsionVector::new(&[1, 2], 5).unwrap());
        assert_eq!(found.orbit[1], TorsionVector::new(&[4, 3], 5).unwrap());
        found.verify(&cat(), &y).unwrap();

        let dbl = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[2]])).unwrap();
        let y = vec![TorsionCoset::from_rows(&[[1]], &[(0, 1)], 1).unwrap()];
        let found = find_avoiding_periodic_point(&dbl, &y, 50).unwrap();
        assert_eq!(found.point, TorsionVector::new(&[1], 3).unwrap());

        let found = find_avoiding_periodic_point(&cat(), &[], 50).unwrap();
        assert_eq!(found.point, TorsionVector::zero(2));
        assert_eq!(found.period(), 1);
    }
}
