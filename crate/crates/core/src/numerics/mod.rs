//! Special functions, quadrature and linear-algebra kernels.

pub mod dense;
pub mod quadrature;
pub mod special;
pub mod tridiag;

pub use dense::{matrix_exp, DenseMatrix};
pub use quadrature::{gauss_jacobi_unit_rule, gauss_laguerre_rule, gauss_legendre, QuadratureRule, UnitJacobiRule};
pub use special::{digamma, laguerre_generating_sum, laguerre_scaled, laguerre_sequence, log_binomial, log_gamma, Scaled};
pub use tridiag::{symtridiag_eigen, SymTridiagonal, TridiagEigen};
