//! Exact dynamics of affine monomial self-maps of the algebraic torus `G_m^d`,
//! and decision procedures for primitivity, local closedness and rationality
//! of prime ideals in the skew rings `R[t; σ]` and `R[t^{±1}; σ]` over the
//! Laurent ring `R = k[x_1^{±1}, …, x_d^{±1}]`.
//!
//! Points of the torus are handled additively through their exponent vectors:
//! a torsion point `(e^{2πi a_1}, …, e^{2πi a_d})` is the vector `a ∈ (Q/Z)^d`,
//! and a map `Φ(x)_i = y_i ∏_j x_j^{M_ij}` acts as `a ↦ M a + y`. The same
//! matrix describes the ring automorphism `σ(x_i) = y_i x^{M_i}`, under which
//! the monomial `x^w` pulls back to `y^w x^{Mᵀ w}`.

pub mod error;
pub mod lattice;
pub mod oracle;
pub mod primitivity;
pub mod torus;

pub use error::{Error, Result};
