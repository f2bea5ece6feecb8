//! Hermite and Smith normal forms over the integers, with unimodular transforms.
//!
//! HNF convention: row-style upper echelon form. Pivots are positive and every
//! entry above a pivot lies in `[0, pivot)`. Zero rows sit at the bottom.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Returns `(H, U)` with `U` unimodular and `H = U * A` in Hermite normal form.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut pr = 0;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        for i in pr + 1..rows {
            if h[(i, col)].is_zero() {
                continue;
            }
            if h[(pr, col)].is_zero() {
                h.swap_rows(pr, i);
                u.swap_rows(pr, i);
                continue;
            }
            let a = h[(pr, col)].clone();
            let b = h[(i, col)].clone();
            let eg = a.extended_gcd(&b);
            let (mut g, mut x, mut y) = (eg.gcd, eg.x, eg.y);
            if g.is_negative() {
                g = -g;
                x = -x;
                y = -y;
            }
            let r = -(&b / &g);
            let s = &a / &g;
            h.combine_rows(pr, i, &x, &y, &r, &s);
            u.combine_rows(pr, i, &x, &y, &r, &s);
        }
        if h[(pr, col)].is_zero() {
            continue;
        }
        if h[(pr, col)].is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        let p = h[(pr, col)].clone();
        for i in 0..pr {
            let q = h[(i, col)].div_floor(&p);
            if !q.is_zero() {
                let nq = -q;
                h.add_row_multiple(i, pr, &nq);
                u.add_row_multiple(i, pr, &nq);
            }
        }
        pr += 1;
    }
    (h, u)
}

/// Number of nonzero rows of the Hermite form, i.e. the rank over the rationals.
pub fn rank(a: &IntMatrix) -> usize {
    let (h, _) = hnf(a);
    (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
}

/// Nonzero rows of the Hermite form: the canonical basis of the row lattice.
pub fn row_lattice_basis(a: &IntMatrix) -> IntMatrix {
    let (h, _) = hnf(a);
    let nz: Vec<usize> = (0..h.rows())
        .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
        .collect();
    h.select_rows(nz)
}

/// Z-basis (as rows, in Hermite form) of `{u : u * A = 0}`.
pub fn left_kernel(a: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf(a);
    let zero_rows: Vec<usize> = (0..h.rows())
        .filter(|&i| h.row(i).iter().all(Zero::is_zero))
        .collect();
    let k = u.select_rows(zero_rows);
    if k.rows() == 0 {
        return k;
    }
    row_lattice_basis(&k)
}

/// Z-basis (as rows, in Hermite form) of `{v : A * v = 0}`.
pub fn right_kernel(a: &IntMatrix) -> IntMatrix {
    left_kernel(&a.transpose())
}

/// Inverse of a unimodular matrix, read off its Hermite transform.
pub fn unimodular_inverse(a: &IntMatrix) -> Option<IntMatrix> {
    if !a.is_square() || !a.is_unimodular() {
        return None;
    }
    let (h, u) = hnf(a);
    debug_assert!(h.is_identity());
    Some(u)
}

/// Integer coefficients `c` with `c * B = v` for a basis `B` in Hermite form.
pub fn solve_in_rows(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(basis.cols(), v.len());
    let mut v = v.to_vec();
    let mut c = Vec::with_capacity(basis.rows());
    for i in 0..basis.rows() {
        let row = basis.row(i);
        let p = row.iter().position(|x| !x.is_zero())?;
        if v[..p].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let (q, r) = v[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for (x, b) in v.iter_mut().zip(row) {
            *x -= &q * b;
        }
        c.push(q);
    }
    v.iter().all(Zero::is_zero).then_some(c)
}

/// Result of a Smith normal form computation: `S = U * A * V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Nonzero diagonal entries `d1 | d2 | ...`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }
}

/// Smith normal form with unimodular transforms on both sides.
pub fn snf(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let e = &s[(i, j)];
                    if e.is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if s[(bi, bj)].abs() <= e.abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return Smith { s, u, v };
            };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);

            let p = s[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = s[(i, t)].div_floor(&p);
                if !q.is_zero() {
                    let nq = -q;
                    s.add_row_multiple(i, t, &nq);
                    u.add_row_multiple(i, t, &nq);
                }
                if !s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = s[(t, j)].div_floor(&p);
                if !q.is_zero() {
                    let nq = -q;
                    s.add_col_multiple(j, t, &nq);
                    v.add_col_multiple(j, t, &nq);
                }
                if !s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s[(i, j)].is_multiple_of(&p)));
            if let Some(i) = bad {
                s.add_row_multiple(t, i, &BigInt::one());
                u.add_row_multiple(t, i, &BigInt::one());
                continue;
            }
            break;
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { s, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_hnf_shape(h: &IntMatrix) {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero = false;
        for i in 0..h.rows() {
            let pivot = h.row(i).iter().position(|x| !x.is_zero());
            match pivot {
                None => seen_zero = true,
                Some(c) => {
                    assert!(!seen_zero, "nonzero row below a zero row");
                    if let Some(lp) = last_pivot {
                        assert!(c > lp, "pivots not strictly increasing");
                    }
                    let p = &h[(i, c)];
                    assert!(p.is_positive());
                    for k in 0..i {
                        assert!(!h[(k, c)].is_negative() && &h[(k, c)] < p);
                    }
                    last_pivot = Some(c);
                }
            }
        }
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hnf(&IntMatrix::identity(2));
        assert!(h.is_identity() && u.is_identity());

        let a = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        let (h, u) = hnf(&a);
        assert!(h.is_identity());
        assert_eq!(u, a);

        let a = IntMatrix::from_rows(&[[4, 2], [2, 4]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, IntMatrix::from_rows(&[[2, 4], [0, 6]]));
        assert_eq!(&u * &a, h);
        assert!(u.det().abs().is_one());
        check_hnf_shape(&h);
    }

    #[test]
    fn hnf_rectangular_and_degenerate() {
        let a = IntMatrix::from_rows(&[[2, 4, 6], [1, 2, 3], [0, 0, 5]]);
        let (h, u) = hnf(&a);
        assert_eq!(&u * &a, h);
        check_hnf_shape(&h);
        assert_eq!(rank(&a), 2);
        assert_eq!(hnf(&IntMatrix::zeros(0, 3)).0.rows(), 0);
        let (h, _) = hnf(&IntMatrix::zeros(2, 0));
        assert_eq!((h.rows(), h.cols()), (2, 0));
    }

    #[test]
    fn snf_examples() {
        let sm = snf(&IntMatrix::identity(3));
        assert!(sm.s.is_identity());

        let a = IntMatrix::from_rows(&[[4, 2], [2, 4]]);
        let sm = snf(&a);
        assert_eq!(sm.s, IntMatrix::from_rows(&[[2, 0], [0, 6]]));
        assert_eq!(&(&sm.u * &a) * &sm.v, sm.s);

        let a = IntMatrix::from_rows(&[[2, 0], [0, 3]]);
        let sm = snf(&a);
        assert_eq!(sm.s, IntMatrix::from_rows(&[[1, 0], [0, 6]]));
        assert_eq!(&(&sm.u * &a) * &sm.v, sm.s);
        assert!(sm.u.is_unimodular() && sm.v.is_unimodular());
    }

    #[test]
    fn kernels() {
        let a = IntMatrix::from_rows(&[[1, 1], [2, 2]]);
        // {v : A v = 0} is spanned by (1, -1); HNF makes the pivot positive
        assert_eq!(right_kernel(&a), IntMatrix::from_rows(&[[1, -1]]));
        // {u : u A = 0} is spanned by (2, -1)
        assert_eq!(left_kernel(&a), IntMatrix::from_rows(&[[2, -1]]));
        assert_eq!(right_kernel(&IntMatrix::zeros(0, 2)), IntMatrix::identity(2));
        assert_eq!(right_kernel(&IntMatrix::identity(3)).rows(), 0);
    }
}
