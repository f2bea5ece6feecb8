//! Exact integer linear algebra on the character lattice `Z^d`.

mod basis;
mod matrix;
mod normal_form;
mod poly;

pub use basis::{fixed_lattice, matrix_order, primitive_part, LatticeBasis, Order};
pub use matrix::IntMatrix;
pub use normal_form::{
    hnf, left_kernel, rank, right_kernel, row_lattice_basis, snf, solve_in_rows,
    unimodular_inverse, Smith,
};
pub use poly::{
    char_poly, cyclotomic, cyclotomic_orders, min_poly, orders_with_totient_at_most, totient,
    unipotent_split, IntPoly,
};
