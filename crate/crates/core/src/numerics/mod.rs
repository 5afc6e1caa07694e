//! Uniform grids, nodal samples of compactly supported test forms, central
//! difference application of the exact operator matrices, norms, refinement
//! studies and Gagliardo–Nirenberg ratio probes.

mod field;
mod gn;
mod grid;
mod stencil;
mod study;
mod testform;

pub use field::{basis_id, check_support, gram_f64, sample_slab, FieldHeader, FormField, Sampled};
pub use gn::{
    default_gn_base, dilation_invariance, dilation_sweep, gn_levels, gn_ratio, gn_stability,
    required_reach, DilationReport, GnCase, GnReport, GnStability, NormTerm, GN_HALF_WIDTH,
    H1_PROXY_WARNING,
};
pub use grid::Grid;
pub use stencil::{
    apply_generator_array, apply_generator_slab, apply_matrix_slab, apply_terms, apply_word_array,
    generator_stencil, Applied, CompiledMatrix, GeneratorStencil, NodeField, Slab, Term, WordSum,
};
pub use study::{
    dc_squared_decay, decomposition_decay, duality_gap, duality_pair, fd_consistency,
    generator_matrix, ConvergenceReport, GridDecompositionReport, Level, ProbeConfig,
    ROUNDOFF_FLOOR,
};
pub use testform::{bump, bump_integral, bump_polynomial, FloatPoly, TestForm, TestFormJson};
