use num_traits::One;

use super::basis::{e0_basis, E0Basis};
use super::matrix::OperatorMatrix;
use crate::exec::Exec;
use crate::exterior::{Covector, ExteriorBasis};
use crate::lie_algebra::{Generator, OperatorPolynomial};
use crate::linalg::QMatrix;
use crate::rational::{int, Rational};
use crate::{Error, Result};

/// Iterations allowed for the retraction onto `E`; two always suffice on ℍⁿ.
pub const MAX_RETRACTION: usize = 4;

/// Exterior derivative `Λʰ𝔥 → Λʰ⁺¹𝔥` in the full monomial bases:
/// `d(f ω_J) = Σᵢ (Wᵢf) ωᵢ∧ω_J + f dω_J` with `W_{2n+1} = T`, `ω_{2n+1} = θ`,
/// and `d(β∧θ) = (−1)^{|β|} Lβ` for constant horizontal `β`.
pub fn full_d(n: usize, h: usize) -> OperatorMatrix {
    let src = ExteriorBasis::full(n, h);
    let dst = ExteriorBasis::full(n, h + 1);
    let mut m = OperatorMatrix::zeros(n, dst.len(), src.len(), h, h + 1);
    let dtheta = Covector::dtheta(n);
    for (c, &mono) in src.monomials().iter().enumerate() {
        for i in 0..=2 * n {
            let single = crate::exterior::WedgeMonomial::from_indices(&[i]).unwrap();
            if let Some((sign, target)) = single.wedge(mono) {
                let r = dst.position(target).expect("target monomial in basis");
                let g = OperatorPolynomial::generator(n, Generator(i)).scale(&int(sign as i64));
                let entry = m.get(r, c).add(&g);
                m.set(r, c, entry);
            }
        }
        if mono.contains(2 * n) {
            let beta = mono.without(2 * n);
            let sign = if beta.degree() % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            let image = dtheta.wedge(&Covector::monomial(n, beta, sign));
            for (tm, tc) in image.terms() {
                let r = dst.position(*tm).expect("target monomial in basis");
                let entry = m
                    .get(r, c)
                    .add(&OperatorPolynomial::constant(n, tc.clone()));
                m.set(r, c, entry);
            }
        }
    }
    m
}

/// `d_c : E₀ʰ → E₀ʰ⁺¹` in the given bases.
///
/// Starting from the embedding `A = C` of `E₀ʰ`, repeat `A ← A − d₀⁺ (d A)`
/// until `d A` has no component in `im d₀`; then `d_c = Π_{E₀ʰ⁺¹} d A`.
pub fn dc_from_bases(src: &E0Basis, dst: &E0Basis) -> Result<OperatorMatrix> {
    let (n, h) = (src.n(), src.degree());
    let d = full_d(n, h);
    let d0 = d.constant_part();
    let d0_plus = d0.pseudo_inverse();
    let im_d0 = d0.mul(&d0_plus);
    let mut a = OperatorMatrix::from_constant(n, &src.matrix(), h, h);
    for _ in 0..=MAX_RETRACTION {
        let da = d.mul(&a)?;
        if da.left_constant(&im_d0, h + 1).is_zero() {
            return Ok(da.left_constant(&dst.projector(), h + 1));
        }
        a = a.sub(&da.left_constant(&d0_plus, h))?;
    }
    Err(Error::RetractionDiverged {
        n,
        h,
        iterations: MAX_RETRACTION,
    })
}

pub fn assemble_dc(n: usize, h: usize) -> Result<OperatorMatrix> {
    if h > 2 * n {
        return Err(Error::DegreeOutOfRange { n, degree: h });
    }
    dc_from_bases(&e0_basis(n, h)?, &e0_basis(n, h + 1)?)
}

/// Coefficient matrix of `∗ : E₀ʰ → E₀^{2n+1−h}`.
pub fn star_matrix(src: &E0Basis, dst: &E0Basis) -> Result<QMatrix> {
    let cols = src
        .xi()
        .iter()
        .map(|x| dst.coefficients(&x.hodge_star()))
        .collect::<Result<Vec<_>>>()?;
    Ok(QMatrix::from_columns(dst.dim(), &cols))
}

/// `(−1)^{h(2n+1)}`.
pub fn delta_sign(n: usize, h: usize) -> Rational {
    if (h * (2 * n + 1)).is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// The full Rumin complex of ℍⁿ: bases, `d_c`, `δ_c` and `∗` in every degree.
#[derive(Clone, Debug)]
pub struct RuminComplex {
    n: usize,
    bases: Vec<E0Basis>,
    dc: Vec<OperatorMatrix>,
    delta: Vec<OperatorMatrix>,
    star: Vec<QMatrix>,
}

impl RuminComplex {
    pub fn new(n: usize) -> Result<Self> {
        Self::build(n, Exec::default())
    }

    pub fn build(n: usize, exec: Exec) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedN(n));
        }
        let top = 2 * n + 1;
        let bases = exec
            .map(top + 1, |h| e0_basis(n, h))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let dc = exec
            .map(top, |h| dc_from_bases(&bases[h], &bases[h + 1]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let star = (0..=top)
            .map(|h| star_matrix(&bases[h], &bases[top - h]))
            .collect::<Result<Vec<_>>>()?;
        let mut complex = Self {
            n,
            bases,
            dc,
            delta: Vec::new(),
            star,
        };
        complex.delta = (1..=top)
            .map(|h| complex.conjugated_delta(h))
            .collect::<Result<Vec<_>>>()?;
        Ok(complex)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn top(&self) -> usize {
        2 * self.n + 1
    }

    pub fn basis(&self, h: usize) -> &E0Basis {
        &self.bases[h]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(E0Basis::dim).collect()
    }

    /// `d_c : E₀ʰ → E₀ʰ⁺¹`, `0 ≤ h ≤ 2n`.
    pub fn dc(&self, h: usize) -> &OperatorMatrix {
        &self.dc[h]
    }

    /// `δ_c : E₀ʰ → E₀ʰ⁻¹`, `1 ≤ h ≤ 2n+1`.
    pub fn delta_c(&self, h: usize) -> &OperatorMatrix {
        &self.delta[h - 1]
    }

    /// `∗ : E₀ʰ → E₀^{2n+1−h}`.
    pub fn star(&self, h: usize) -> &QMatrix {
        &self.star[h]
    }

    /// Replaces a stored `d_c` without touching `δ_c`; used to inject
    /// corrupted matrices into certification runs.
    pub fn replace_dc(&mut self, h: usize, m: OperatorMatrix) -> Result<()> {
        let old = &self.dc[h];
        if (old.rows(), old.cols()) != (m.rows(), m.cols()) || m.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: old.rows() * old.cols(),
                found: m.rows() * m.cols(),
            });
        }
        self.dc[h] = m;
        Ok(())
    }

    /// `(−1)^{h(2n+1)} ∗ d_c ∗` on `E₀ʰ`, from the currently stored `d_c`.
    pub fn conjugated_delta(&self, h: usize) -> Result<OperatorMatrix> {
        let top = self.top();
        if h == 0 || h > top {
            return Err(Error::DegreeOutOfRange {
                n: self.n,
                degree: h,
            });
        }
        let inner = self.dc[top - h].right_constant(&self.star[h], h);
        Ok(inner
            .left_constant(&self.star[top + 1 - h], h - 1)
            .scale(&delta_sign(self.n, h)))
    }

    /// Rumin Laplacian `Δ_h`: `dδ + δd` off the middle degrees,
    /// `(dδ)² + δd` at `h = n` and `dδ + (δd)²` at `h = n+1`.
    pub fn laplacian(&self, h: usize) -> Result<OperatorMatrix> {
        let (n, top) = (self.n, self.top());
        if h > top {
            return Err(Error::DegreeOutOfRange { n, degree: h });
        }
        let size = self.bases[h].dim();
        let d_delta = if h >= 1 {
            Some(self.dc(h - 1).mul(self.delta_c(h))?)
        } else {
            None
        };
        let delta_d = if h < top {
            Some(self.delta_c(h + 1).mul(self.dc(h))?)
        } else {
            None
        };
        let square = |m: OperatorMatrix| m.mul(&m);
        let d_delta = match d_delta {
            Some(m) if h == n => Some(square(m)?),
            other => other,
        };
        let delta_d = match delta_d {
            Some(m) if h == n + 1 => Some(square(m)?),
            other => other,
        };
        let mut out = OperatorMatrix::zeros(n, size, size, h, h);
        for m in [d_delta, delta_d].into_iter().flatten() {
            out = out.add(&m)?;
        }
        Ok(out)
    }
}

/// Expected dilation degree of `d_c` out of degree `h`.
pub fn dc_order(n: usize, h: usize) -> u32 {
    if h == n {
        2
    } else {
        1
    }
}

/// Expected dilation degree of `δ_c` out of degree `h`.
pub fn delta_order(n: usize, h: usize) -> u32 {
    if h == n + 1 {
        2
    } else {
        1
    }
}

/// Expected dilation degree of the Rumin Laplacian in degree `h`.
pub fn laplacian_order(n: usize, h: usize) -> u32 {
    if h == n || h == n + 1 {
        4
    } else {
        2
    }
}

/// Gram-aware formal adjoint of `d_c(h)`, which must coincide with `δ_c(h+1)`:
/// `g_k δ_{kI} = g'_I P_{Ik}ᵗ`.
pub fn gram_adjoint(src: &E0Basis, dst: &E0Basis, dc: &OperatorMatrix) -> OperatorMatrix {
    let adj = dc.formal_adjoint();
    let mut out = adj.clone();
    for k in 0..adj.rows() {
        for i in 0..adj.cols() {
            let s = &dst.gram()[i] / &src.gram()[k];
            out.set(k, i, adj.get(k, i).scale(&s));
        }
    }
    out
}
