use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::character::{invariant_characters, FixedCharacter};
use super::coset::{rational_dot, TorsionCoset};
use super::family::{dense_periodic_family, PeriodicFamilyCertificate};
use super::map::AffineTorusMap;
use super::point::TorsionVector;
use super::scalar::frac;
use crate::error::{Error, Result};
use crate::lattice::{min_poly, rank, solve_in_rows, unipotent_split, IntMatrix, IntPoly, LatticeBasis};

const FIRST_PRIME_BUDGET: u64 = 64;
const MAX_PRIME_BUDGET: u64 = 1 << 16;
const WANTED_PRIMES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityCertificate {
    /// Periodic points `v/p` of the linear part, one family per prime, all on the
    /// subtorus spanned by `subtorus` (rows, in exponent coordinates).
    EigenvectorFamily {
        subtorus: IntMatrix,
        certificates: Vec<PeriodicFamilyCertificate>,
    },
    /// Every fiber `x^w = c` is fixed by `Φ^iterate`.
    FixedCosetFamily {
        character: Vec<BigInt>,
        iterate: u64,
        kernel_power: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    A { trapping: Vec<TorsionCoset> },
    B { density: Vec<DensityCertificate> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionStep {
    MinimalPolynomial(IntPoly),
    UnipotentSplit { r: usize, g: IntPoly },
    NonUnipotentFactor { rank: usize, restricted: IntMatrix },
    PrimeSearch { budget: u64, primes: Vec<u64> },
    InvariantCharacters { rank: usize },
    NoPeriodicSubvariety,
    FixedHypersurface { character: Vec<BigInt>, iterate: u64 },
    KernelFiltration { power: usize, kernel_dim: usize, fills: bool },
}

fn fmt_vec(v: &[BigInt]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(","))
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionStep::MinimalPolynomial(p) => write!(f, "minimal polynomial {p}"),
            ReductionStep::UnipotentSplit { r, g } => {
                write!(f, "f = (t - 1)^{r} * ({g})")
            }
            ReductionStep::NonUnipotentFactor { rank, restricted } => write!(
                f,
                "non-unipotent factor: subtorus of dimension {rank}, restricted matrix {restricted}"
            ),
            ReductionStep::PrimeSearch { budget, primes } => {
                write!(f, "eigenvector search up to {budget}: primes {primes:?}")
            }
            ReductionStep::InvariantCharacters { rank } => {
                write!(f, "invariant characters with trivial free pairing: rank {rank}")
            }
            ReductionStep::NoPeriodicSubvariety => write!(f, "no proper periodic subvariety"),
            ReductionStep::FixedHypersurface { character, iterate } => write!(
                f,
                "fibers of x^{} are fixed by Φ^{iterate}",
                fmt_vec(character)
            ),
            ReductionStep::KernelFiltration {
                power,
                kernel_dim,
                fills,
            } => write!(
                f,
                "dim ker Ψ^{power} = {kernel_dim}{}",
                if *fills { ", ker + W fills G" } else { "" }
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyResult {
    pub verdict: Verdict,
    pub transcript: Vec<ReductionStep>,
}

impl DichotomyResult {
    pub fn is_a(&self) -> bool {
        matches!(self.verdict, Verdict::A { .. })
    }

    pub fn trapping(&self) -> Option<&[TorsionCoset]> {
        match &self.verdict {
            Verdict::A { trapping } => Some(trapping),
            Verdict::B { .. } => None,
        }
    }

    pub fn density(&self) -> Option<&[DensityCertificate]> {
        match &self.verdict {
            Verdict::A { .. } => None,
            Verdict::B { density } => Some(density),
        }
    }

    /// Periodic points carried by eigenvector certificates.
    pub fn certificate_points(&self) -> Vec<TorsionVector> {
        let mut out = Vec::new();
        for c in self.density().unwrap_or_default() {
            if let DensityCertificate::EigenvectorFamily { certificates, .. } = c {
                out.extend(certificates.iter().map(|c| c.point.clone()));
            }
        }
        out
    }

    pub fn verify(&self, phi: &AffineTorusMap) -> std::result::Result<(), String> {
        match &self.verdict {
            Verdict::A { trapping } => {
                if !trapping.is_empty() {
                    return Err("verdict A carries trapping cosets".into());
                }
                let (_, g) = unipotent_split(&min_poly(phi.matrix()));
                if g.deg() > 0 {
                    return Err("matrix has a non-unipotent factor".into());
                }
                if invariant_characters(phi).rows() > 0 {
                    return Err("an invariant character with trivial free pairing exists".into());
                }
                Ok(())
            }
            Verdict::B { density } => {
                if density.is_empty() {
                    return Err("verdict B without certificates".into());
                }
                for c in density {
                    match c {
                        DensityCertificate::EigenvectorFamily {
                            subtorus,
                            certificates,
                        } => {
                            let primes: BTreeSet<u64> = certificates.iter().map(|c| c.prime).collect();
                            if primes.len() != certificates.len() || primes.is_empty() {
                                return Err("certificates must use distinct primes".into());
                            }
                            let lattice = LatticeBasis::span(subtorus);
                            for cert in certificates {
                                cert.verify(phi.matrix())?;
                                let v: Vec<BigInt> = cert.eigenvector.iter().map(|&x| x.into()).collect();
                                // v must be congruent mod p to a vector of the subtorus lattice
                                if !in_lattice_mod_p(&lattice, &v, cert.prime) {
                                    return Err(format!("p={} eigenvector leaves the subtorus", cert.prime));
                                }
                            }
                        }
                        DensityCertificate::FixedCosetFamily {
                            character, iterate, ..
                        } => FixedCharacter {
                            k: *iterate,
                            w: character.clone(),
                        }
                        .verify(phi)?,
                    }
                }
                Ok(())
            }
        }
    }
}

fn in_lattice_mod_p(lattice: &LatticeBasis, v: &[BigInt], p: u64) -> bool {
    let d = v.len();
    let gens = lattice.basis().vstack(&IntMatrix::identity(d).scale(&BigInt::from(p)));
    LatticeBasis::span(&gens).contains(v)
}

/// The verdict of the torus dichotomy for `Φ`, with the reductions that led to it.
pub fn dichotomy(phi: &AffineTorusMap) -> Result<DichotomyResult> {
    let d = phi.dim();
    let m = phi.matrix();
    let f = min_poly(m);
    let (r, g) = unipotent_split(&f);
    let mut transcript = vec![
        ReductionStep::MinimalPolynomial(f),
        ReductionStep::UnipotentSplit { r, g: g.clone() },
    ];

    if g.deg() > 0 {
        let image = m.minus_identity().pow(r as u64);
        let sub = LatticeBasis::span(&image.transpose()).saturate();
        let b1 = sub.basis().clone();
        let s = b1.rows();
        let mut m1 = IntMatrix::zeros(s, s);
        for j in 0..s {
            let c = solve_in_rows(&b1, &m.mul_vec(b1.row(j)))
                .ok_or_else(|| Error::Inconsistent("image subtorus is not invariant".into()))?;
            for (i, ci) in c.into_iter().enumerate() {
                m1[(i, j)] = ci;
            }
        }
        transcript.push(ReductionStep::NonUnipotentFactor {
            rank: s,
            restricted: m1.clone(),
        });
        let restricted = AffineTorusMap::endomorphism(m1)?;
        let mut budget = FIRST_PRIME_BUDGET;
        let chosen = loop {
            let found = match dense_periodic_family(&restricted, budget) {
                Ok(c) => c,
                Err(Error::BudgetExhausted { .. }) => Vec::new(),
                Err(e) => return Err(e),
            };
            let mut seen = BTreeSet::new();
            let chosen: Vec<_> = found
                .into_iter()
                .filter(|c| seen.insert(c.prime))
                .take(WANTED_PRIMES)
                .collect();
            if chosen.len() >= WANTED_PRIMES || budget >= MAX_PRIME_BUDGET {
                break chosen;
            }
            budget *= 2;
        };
        transcript.push(ReductionStep::PrimeSearch {
            budget,
            primes: chosen.iter().map(|c| c.prime).collect(),
        });
        if chosen.is_empty() {
            return Err(Error::BudgetExhausted {
                budget,
                detail: "no eigenvector certificate on the non-unipotent factor".into(),
            });
        }
        let certificates = chosen
            .into_iter()
            .map(|c| {
                let p = c.prime;
                let lifted: Vec<u64> = (0..d)
                    .map(|k| {
                        let x: BigInt = (0..s).map(|j| &b1[(j, k)] * BigInt::from(c.eigenvector[j])).sum();
                        let pm = BigInt::from(p);
                        u64::try_from(((x % &pm) + &pm) % &pm).expect("residue below p")
                    })
                    .collect();
                PeriodicFamilyCertificate {
                    prime: p,
                    point: TorsionVector::from_residues(lifted.clone(), p),
                    eigenvector: lifted,
                    eigenvalue: c.eigenvalue,
                    period: c.period,
                }
            })
            .collect();
        return Ok(DichotomyResult {
            verdict: Verdict::B {
                density: vec![DensityCertificate::EigenvectorFamily {
                    subtorus: b1,
                    certificates,
                }],
            },
            transcript,
        });
    }

    let chars = invariant_characters(phi);
    transcript.push(ReductionStep::InvariantCharacters { rank: chars.rows() });
    if chars.rows() == 0 {
        transcript.push(ReductionStep::NoPeriodicSubvariety);
        return Ok(DichotomyResult {
            verdict: Verdict::A { trapping: Vec::new() },
            transcript,
        });
    }
    let w = chars.row(0).to_vec();
    let torsion: Vec<BigRational> = phi.translation().iter().map(|y| y.torsion().clone()).collect();
    let pairing = frac(&rational_dot(&w, &torsion));
    let iterate = u64::try_from(pairing.denom().clone()).map_err(|_| Error::LevelOverflow)?;
    transcript.push(ReductionStep::FixedHypersurface {
        character: w.clone(),
        iterate,
    });

    let psi = m.minus_identity();
    let wrow = IntMatrix::from_big_rows(vec![w.clone()], d)?;
    let mut power = psi.clone();
    let mut j = 1;
    loop {
        let rk = rank(&power);
        let fills = rank(&power.vstack(&wrow)) > rk;
        transcript.push(ReductionStep::KernelFiltration {
            power: j,
            kernel_dim: d - rk,
            fills,
        });
        if fills {
            break;
        }
        if j > d {
            return Err(Error::Inconsistent("Ψ is not nilpotent".into()));
        }
        power = &power * &psi;
        j += 1;
    }
    Ok(DichotomyResult {
        verdict: Verdict::B {
            density: vec![DensityCertificate::FixedCosetFamily {
                character: w,
                iterate,
                kernel_power: j,
            }],
        },
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::ScalarGroupElement;

    #[test]
    fn free_translation_is_a() {
        let q = AffineTorusMap::translation_only(vec![ScalarGroupElement::generator(0, 1)]).unwrap();
        let res = dichotomy(&q).unwrap();
        assert_eq!(res.trapping(), Some(&[][..]));
        assert!(res.transcript.contains(&ReductionStep::NoPeriodicSubvariety));
        res.verify(&q).unwrap();
    }

    #[test]
    fn root_of_unity_translation_is_b() {
        let z3 = AffineTorusMap::translation_only(vec![ScalarGroupElement::root_of_unity(1, 3, 0)]).unwrap();
        let res = dichotomy(&z3).unwrap();
        match res.density().unwrap() {
            [DensityCertificate::FixedCosetFamily { character, iterate, kernel_power }] => {
                assert_eq!(character, &vec![BigInt::from(1)]);
                assert_eq!(*iterate, 3);
                assert_eq!(*kernel_power, 1);
            }
            other => panic!("unexpected density {other:?}"),
        }
        res.verify(&z3).unwrap();
    }

    #[test]
    fn hyperbolic_is_b_with_eigenvectors() {
        let cat = AffineTorusMap::new(
            IntMatrix::from_rows(&[[2, 1], [1, 1]]),
            vec![ScalarGroupElement::root_of_unity(1, 2, 0), ScalarGroupElement::identity(0)],
        )
        .unwrap();
        let res = dichotomy(&cat).unwrap();
        assert!(!res.is_a());
        assert_eq!(res.certificate_points().len(), 3);
        res.verify(&cat).unwrap();
    }

    #[test]
    fn jordan_is_b() {
        let jordan = AffineTorusMap::endomorphism(IntMatrix::from_rows(&[[0, 1], [-1, 1]])).unwrap();
        let res = dichotomy(&jordan).unwrap();
        assert!(!res.is_a());
        res.verify(&jordan).unwrap();
    }

    #[test]
    fn mixed_factor_lifts_certificates() {
        // block diag(cat, 1): the non-unipotent part is the first two coordinates
        let m = IntMatrix::from_rows(&[[2, 1, 0], [1, 1, 0], [0, 0, 1]]);
        let phi = AffineTorusMap::new(
            m,
            vec![ScalarGroupElement::generator(0, 1); 3],
        )
        .unwrap();
        let res = dichotomy(&phi).unwrap();
        res.verify(&phi).unwrap();
        for x in res.certificate_points() {
            assert_eq!(x.numerators()[2], 0);
        }
    }

    #[test]
    fn unipotent_with_free_shear() {
        // σ(x, y) = (x y, q y): the character y is invariant but pairs to q
        let phi = AffineTorusMap::new(
            IntMatrix::from_rows(&[[1, 1], [0, 1]]),
            vec![ScalarGroupElement::identity(1), ScalarGroupElement::generator(0, 1)],
        )
        .unwrap();
        let res = dichotomy(&phi).unwrap();
        assert!(res.is_a());

        // σ(x, y) = (q x y, y): y is invariant with trivial pairing
        let phi = AffineTorusMap::new(
            IntMatrix::from_rows(&[[1, 1], [0, 1]]),
            vec![ScalarGroupElement::generator(0, 1), ScalarGroupElement::identity(1)],
        )
        .unwrap();
        let res = dichotomy(&phi).unwrap();
        match res.density().unwrap() {
            [DensityCertificate::FixedCosetFamily { character, kernel_power, .. }] => {
                assert_eq!(character, &vec![BigInt::from(0), BigInt::from(1)]);
                assert_eq!(*kernel_power, 2);
            }
            other => panic!("unexpected density {other:?}"),
        }
        res.verify(&phi).unwrap();
    }
}
