//! Affine monomial maps `Φ = τ_y ∘ Φ0` of `G_m^d` and their dynamics.

mod character;
mod coset;
mod dichotomy;
mod family;
mod map;
mod point;
mod scalar;

pub use character::{
    default_k_max, fixed_monomial_character, restrict_to_coset, CosetRestriction, FixedCharacter,
};
pub use coset::{image_coset, is_periodic_coset, CosetPeriodicity, TorsionCoset};
pub use dichotomy::{dichotomy, DensityCertificate, DichotomyResult, ReductionStep, Verdict};
pub use family::{
    dense_periodic_family, find_avoiding_periodic_point, primes_up_to, AvoidingPoint,
    PeriodicFamilyCertificate,
};
pub use map::AffineTorusMap;
pub use point::{
    apply_torsion, period, periodic_level, periodic_level_with_budget, periodic_orbit,
    Periodicity, TorsionVector, DEFAULT_POINT_BUDGET,
};
pub use scalar::{frac, ScalarGroupElement};
