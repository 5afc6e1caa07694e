//! Exact construction of the Rumin complex `(E₀*, d_c)` on the Heisenberg
//! groups ℍⁿ, together with its principal symbols, their left inverses, and a
//! finite-difference harness for probing Gagliardo–Nirenberg type estimates.
//!
//! The symbolic side works over exact rationals only:
//!
//! * [`lie_algebra`]: group law, dilations and the PBW-ordered algebra of
//!   left-invariant operators in `X₁..Xₙ, Y₁..Yₙ, T`.
//! * [`exterior`]: covectors in the frame `dx, dy, θ`, Hodge star and the
//!   Lefschetz pair `L`/`Λ`.
//! * [`complex`]: the bases of `E₀ʰ` and the operator matrices of `d_c`,
//!   `δ_c` and the Rumin Laplacian, plus their certification.
//! * [`symbol`]: principal symbols, left inverses, symplectic equivariance
//!   and the divergence-free decomposition of closed forms.
//!
//! [`numerics`] evaluates the same operator matrices with central
//! differences on uniform grids.

pub mod complex;
pub mod error;
pub mod exec;
pub mod exterior;
pub mod lie_algebra;
pub mod linalg;
pub mod numerics;
pub mod rational;
pub mod symbol;

pub use error::{Error, Result};
pub use rational::Rational;

/// Version tag written into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
