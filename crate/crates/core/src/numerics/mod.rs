//! Dense complex linear algebra with real-operation metering.

pub mod linalg;
pub mod matrix;
pub mod meter;

pub use linalg::{
    cholesky, gauss_invert, inverse, mat_add, mat_mul, mat_sub, mat_vec, matmul, matvec,
    scalar_product, solve_linear, vec_add, vec_sub, LuFactors, PIVOT_THRESHOLD,
};
pub use matrix::{
    relative_error, relative_error_vec, ComplexMatrix, ComplexVector, RealMatrix, C64, J, ONE,
    ZERO,
};
pub use meter::{ComplexTally, CostMeter, COMPLEX_DIV_COST};
