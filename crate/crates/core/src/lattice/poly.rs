use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Integer polynomial in `t`, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `t - c`
    pub fn linear(c: BigInt) -> Self {
        Self::new(vec![-c, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Value at `x` modulo `p`, in `[0, p)`.
    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        let m = BigInt::from(p);
        let xb = BigInt::from(x);
        let v = self
            .coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| (acc * &xb + c).mod_floor(&m));
        u64::try_from(v).expect("residue")
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &IntMatrix) -> IntMatrix {
        let n = m.rows();
        let mut acc = IntMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &acc * m;
            for i in 0..n {
                acc[(i, i)] += c;
            }
        }
        acc
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.deg();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (IntPoly::zero(), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    /// Exact division in `Z[t]`; returns `None` when the division is not exact.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let lead = divisor.leading()?;
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let dd = divisor.deg();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return None;
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd];
            if c.is_zero() {
                continue;
            }
            let (q, r) = c.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * dc;
            }
            quot[k] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(IntPoly::new(quot))
        } else {
            None
        }
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(t I - M)` by Bareiss elimination over `Z[t]`.
pub fn char_poly(m: &IntMatrix) -> IntPoly {
    assert!(m.is_square(), "characteristic polynomial of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return IntPoly::one();
    }
    let mut a: Vec<Vec<IntPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = -m[(i, j)].clone();
                    if i == j {
                        IntPoly::new(vec![c, BigInt::one()])
                    } else {
                        IntPoly::constant(c)
                    }
                })
                .collect()
        })
        .collect();
    let mut negate = false;
    let mut prev = IntPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return IntPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

/// Monic minimal polynomial of a square integer matrix.
///
/// Finds the first linear dependency among `I, M, M^2, ...` with exact rational
/// elimination. The result has integer coefficients because it divides the
/// (monic, integral) characteristic polynomial.
pub fn min_poly(m: &IntMatrix) -> IntPoly {
    assert!(m.is_square(), "minimal polynomial of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return IntPoly::one();
    }
    let to_q = |x: &BigInt| BigRational::from_integer(x.clone());

    // Echelon basis of the span of previous powers. Each stored vector carries
    // its expression as a combination of the powers (for back-substitution).
    let mut basis: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new();
    let mut power = IntMatrix::identity(n);
    for k in 0..=n {
        let mut v: Vec<BigRational> = power.entries().iter().map(to_q).collect();
        let mut combo = vec![BigRational::zero(); k + 1];
        combo[k] = BigRational::one();
        for (pivot, bv, bc) in &basis {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (x, y) in v.iter_mut().zip(bv) {
                *x -= &f * y;
            }
            for (x, y) in combo.iter_mut().zip(bc) {
                *x -= &f * y;
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => {
                let coeffs = combo
                    .into_iter()
                    .map(|c| {
                        assert!(c.is_integer(), "minimal polynomial must be integral");
                        c.to_integer()
                    })
                    .collect();
                return IntPoly::new(coeffs);
            }
            Some(p) => {
                let inv = v[p].recip();
                for x in v.iter_mut() {
                    *x *= &inv;
                }
                for x in combo.iter_mut() {
                    *x *= &inv;
                }
                basis.push((p, v, combo));
            }
        }
        power = &power * m;
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}

/// Euler's totient.
pub fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Every `n >= 1` with `phi(n) <= bound`, ascending.
pub fn orders_with_totient_at_most(bound: usize) -> Vec<u64> {
    // phi(n) >= sqrt(n / 2), so n <= 2 * bound^2 covers everything
    let limit = (2 * bound * bound).max(2) as u64;
    (1..=limit).filter(|&n| totient(n) as usize <= bound).collect()
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1);
    let mut coeffs = vec![BigInt::zero(); n as usize + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[n as usize] = BigInt::one();
    let mut p = IntPoly::new(coeffs);
    for d in 1..n {
        if n % d == 0 {
            let (q, r) = p.div_rem_monic(&cyclotomic(d));
            debug_assert!(r.is_zero());
            p = q;
        }
    }
    p
}

/// All `(n, multiplicity)` with the `n`-th cyclotomic polynomial dividing `f`.
pub fn cyclotomic_orders(f: &IntPoly) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    let Some(deg) = f.degree() else {
        return out;
    };
    for n in orders_with_totient_at_most(deg) {
        let phi_n = cyclotomic(n);
        let mut g = f.clone();
        let mut mult = 0;
        loop {
            let (q, r) = g.div_rem_monic(&phi_n);
            if !r.is_zero() || q.is_zero() {
                break;
            }
            mult += 1;
            g = q;
        }
        if mult > 0 {
            out.push((n, mult));
        }
    }
    out
}

/// Splits `f = (t - 1)^r * g` with `g(1) != 0`.
pub fn unipotent_split(f: &IntPoly) -> (usize, IntPoly) {
    let lin = IntPoly::linear(BigInt::one());
    let mut g = f.clone();
    let mut r = 0;
    while !g.is_zero() && g.eval(&BigInt::one()).is_zero() {
        let (q, rem) = g.div_rem_monic(&lin);
        debug_assert!(rem.is_zero());
        g = q;
        r += 1;
    }
    (r, g)
}
