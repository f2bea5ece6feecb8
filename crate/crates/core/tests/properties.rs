use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use skewtorus::lattice::{char_poly, hnf, left_kernel, min_poly, right_kernel, snf, IntMatrix, LatticeBasis};
use skewtorus::oracle::oracle_enumerate;
use skewtorus::torus::{
    apply_torsion, dense_periodic_family, fixed_monomial_character, periodic_level, restrict_to_coset,
    AffineTorusMap, ScalarGroupElement, TorsionCoset, TorsionVector,
};

fn matrix(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(lo..=hi, cols), rows).prop_map(|r| IntMatrix::from_rows(&r))
}

fn square(max_d: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_d).prop_flat_map(|d| matrix(d, d, -3, 3))
}

fn torsion_map(max_d: usize, max_level: u64) -> impl Strategy<Value = AffineTorusMap> {
    (1..=max_d, 1..=max_level)
        .prop_flat_map(move |(d, l)| {
            (
                matrix(d, d, -3, 3).prop_filter("nonsingular", |m| !m.det().is_zero()),
                prop::collection::vec(0..l, d),
                Just(l),
            )
        })
        .prop_map(|(m, t, l)| {
            let y = t
                .into_iter()
                .map(|a| ScalarGroupElement::root_of_unity(a as i64, l as i64, 0))
                .collect();
            AffineTorusMap::new(m, y).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn iterates_compose(phi in torsion_map(3, 6), a in 0u64..6, b in 0u64..6) {
        let lhs = phi.iterate(a + b);
        let rhs = phi.iterate(a).compose(&phi.iterate(b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn iterate_matches_repeated_application(phi in torsion_map(3, 6), n in 0u64..8, seed in prop::collection::vec(0u64..12, 3)) {
        let level = 12;
        let x = TorsionVector::from_residues(seed[..phi.dim()].to_vec(), level);
        let mut y = x.clone();
        for _ in 0..n {
            y = apply_torsion(&phi, &y).unwrap();
        }
        prop_assert_eq!(apply_torsion(&phi.iterate(n), &x).unwrap(), y);
    }

    #[test]
    fn hnf_postconditions(a in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c, -20, 20))) {
        let (h, u) = hnf(&a);
        prop_assert!(u.is_unimodular());
        prop_assert_eq!(&u * &a, h.clone());
        prop_assert_eq!(hnf(&h).0, h);
    }

    #[test]
    fn snf_postconditions(a in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c, -20, 20))) {
        let s = snf(&a);
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.s.clone());
        let f = s.invariant_factors();
        prop_assert!(f.iter().all(|x| x.is_positive()));
        prop_assert!(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
    }

    #[test]
    fn kernels_annihilate(a in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c, -5, 5))) {
        let l = left_kernel(&a);
        if l.rows() > 0 {
            prop_assert!((&l * &a).is_zero());
        }
        let r = right_kernel(&a);
        if r.rows() > 0 {
            prop_assert!((&a * &r.transpose()).is_zero());
        }
    }

    #[test]
    fn saturation(a in (1usize..4, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c, -6, 6))) {
        let sat = LatticeBasis::span(&a).saturate();
        prop_assert!(sat.is_saturated());
        prop_assert_eq!(sat.saturate(), sat.clone());
        for i in 0..a.rows() {
            prop_assert!(sat.contains(a.row(i)));
        }
    }

    #[test]
    fn min_poly_divides_char_poly(m in square(4)) {
        let f = min_poly(&m);
        prop_assert!(f.is_monic());
        prop_assert!(f.eval_matrix(&m).is_zero());
        prop_assert!(char_poly(&m).div_exact(&f).is_some());
    }

    #[test]
    fn periodic_level_matches_oracle(phi in torsion_map(3, 4), n in 1u64..9) {
        let n = if phi.dim() == 3 { n.min(6) } else { n };
        let fast = periodic_level(&phi, n);
        let slow = oracle_enumerate(&phi, n).map(|s| s.periodic_points);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn fixed_character_is_fixed(phi in torsion_map(3, 6)) {
        prop_assume!(phi.det().abs().is_one());
        if let Some(fc) = fixed_monomial_character(&phi, Some(12)).unwrap() {
            prop_assert!(fc.verify(&phi).is_ok());
            let it = phi.iterate(fc.k);
            prop_assert_eq!(it.matrix().transpose().mul_vec(&fc.w), fc.w.clone());
            prop_assert!(it.translation_pairing(&fc.w).is_identity());
        }
    }

    #[test]
    fn certificates_are_sound(a in -3i64..=3, b in -3i64..=3, c in -3i64..=3) {
        // products of shears lie in SL2(Z)
        let m = &(&IntMatrix::from_rows(&[[1, a], [0, 1]]) * &IntMatrix::from_rows(&[[1, 0], [b, 1]]))
            * &IntMatrix::from_rows(&[[1, c], [0, 1]]);
        let tr = &m[(0, 0)] + &m[(1, 1)];
        prop_assume!(tr.abs() > BigInt::from(2));
        let phi = AffineTorusMap::endomorphism(m.clone()).unwrap();
        for cert in dense_periodic_family(&phi, 60).unwrap() {
            prop_assert!(cert.verify(&m).is_ok());
            let s = oracle_enumerate(&phi, cert.prime).unwrap();
            prop_assert!(s.periodic_points.contains(&(cert.point.clone(), cert.period)));
        }
    }

    #[test]
    fn restriction_conjugates(
        lower in prop::collection::vec(-3i64..=3, 4),
        trans in prop::collection::vec(0u64..6, 2),
        target in 0i64..6,
        pt in prop::collection::vec(0u64..6, 2),
    ) {
        // first row e1 and trivial y1 make {x1 = target} invariant
        let m = IntMatrix::from_rows(&[
            vec![1, 0, 0],
            vec![lower[0], lower[1], lower[2]],
            vec![lower[3], 1, 1],
        ]);
        prop_assume!(!m.det().is_zero());
        let mut y = vec![ScalarGroupElement::identity(0)];
        y.extend(trans.iter().map(|&a| ScalarGroupElement::root_of_unity(a as i64, 6, 0)));
        let phi = AffineTorusMap::new(m, y).unwrap();
        let coset = TorsionCoset::from_rows(&[[1, 0, 0]], &[(target, 6)], 3).unwrap();
        let res = restrict_to_coset(&phi, &coset).unwrap();
        let x = TorsionVector::new(&[target, pt[0] as i64, pt[1] as i64], 6).unwrap();
        prop_assert!(coset.contains(&x));
        let image = apply_torsion(&phi, &x).unwrap();
        prop_assert!(coset.contains(&image));
        let lhs = res.project(&image).unwrap();
        let rhs = apply_torsion(&res.map, &res.project(&x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(res.lift(&res.project(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn coset_membership_matches_equations(
        w in prop::collection::vec(-4i64..=4, 2),
        target in 0i64..10,
        pt in prop::collection::vec(0i64..10, 2),
    ) {
        let g = num_integer::gcd(w[0], w[1]);
        prop_assume!(g == 1);
        let c = TorsionCoset::from_rows(&[w.clone()], &[(target, 10)], 2).unwrap();
        let x = TorsionVector::new(&pt, 10).unwrap();
        let pairing = BigRational::new(BigInt::from(w[0] * pt[0] + w[1] * pt[1] - target), BigInt::from(10));
        prop_assert_eq!(c.contains(&x), pairing.is_integer());
    }
}
