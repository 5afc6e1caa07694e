//! The Heisenberg group ℍⁿ in exponential coordinates `(x, y, t)` and the
//! algebra of left-invariant differential operators written in the PBW basis
//! `W₁^{i₁}⋯W₂ₙ^{i₂ₙ}T^{i₂ₙ₊₁}`.

mod coords;
mod pbw;
mod point;

pub use coords::{apply_generator, apply_to_polynomial, CoordPolynomial};
pub use pbw::{pbw_normalize, Generator, Homogeneity, OperatorPolynomial, PbwMonomial};
pub use point::{dilate, group_inverse, group_mul, Point};
