//! Exact integer and rational linear algebra: matrices, Hermite and Smith
//! normal forms, kernels and Diophantine solving. No floating point.

mod matrix;
mod normal_form;
mod solve;

pub use matrix::*;
pub use normal_form::{hnf, snf, Hnf, Snf};
pub use solve::{
    determinant, determinant_rational, inverse_rational, inverse_unimodular, is_unimodular,
    kernel_rational, primitive_integer_columns, rank_integer, rank_rational, solve_integer,
    solve_integer_rat, solve_rational, solve_rational_unique,
};
