//! The bases of `E₀ʰ` and the operator matrices of `d_c`, `δ_c` and the
//! Rumin Laplacian, with a certification pass over the algebraic contract.

mod assemble;
mod basis;
mod certify;
mod matrix;

pub use assemble::{
    assemble_dc, dc_from_bases, dc_order, delta_order, delta_sign, full_d, gram_adjoint,
    laplacian_order, star_matrix, RuminComplex, MAX_RETRACTION,
};
pub use basis::{
    constructions_agree, d0_matrix, e0_basis, e0_dimension, e0_kernel_basis, is_orthogonal,
    E0Basis, E0BasisJson,
};
pub use certify::{certify, CertificationReport, Check};
pub use matrix::{OperatorMatrix, OperatorMatrixJson, TermJson};
