use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::assemble::full_d;
use crate::exterior::{self, Covector, CovectorJson, ExteriorBasis, SubspaceBasis};
use crate::linalg::{self, QMatrix};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Orthogonal rational basis `ξ₁..ξ_N` of `E₀ʰ` with its diagonal Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E0Basis {
    n: usize,
    h: usize,
    xi: Vec<Covector>,
    gram: Vec<Rational>,
}

impl E0Basis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self) -> &[Covector] {
        &self.xi
    }

    /// `⟨ξ_k, ξ_k⟩`; off-diagonal entries vanish.
    pub fn gram(&self) -> &[Rational] {
        &self.gram
    }

    /// Columns are the `ξ_k` in the full monomial basis of `Λʰ𝔥`.
    pub fn matrix(&self) -> QMatrix {
        let full = ExteriorBasis::full(self.n, self.h);
        let cols: Vec<Vec<Rational>> = self.xi.iter().map(|v| full.to_vector(v)).collect();
        QMatrix::from_columns(full.len(), &cols)
    }

    /// Orthogonal projection coefficients `⟨ξ_k, v⟩ / g_k` as a matrix on
    /// full-basis vectors.
    pub fn projector(&self) -> QMatrix {
        let m = self.matrix().transpose();
        QMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c) / &self.gram[r])
    }

    /// Coefficients of `a` in this basis; `a` must lie in the span.
    pub fn coefficients(&self, a: &Covector) -> Result<Vec<Rational>> {
        if a.degree() != self.h {
            return Err(Error::DegreeMismatch(self.h, a.degree()));
        }
        let c: Vec<Rational> = self
            .xi
            .iter()
            .zip(&self.gram)
            .map(|(x, g)| x.inner(a).unwrap() / g)
            .collect();
        let residual = a.sub(&self.combine(&c));
        if !residual.is_zero() {
            return Err(Error::NonzeroResidual(format!(
                "covector outside E0^{}: residual {}",
                self.h,
                residual.pretty()
            )));
        }
        Ok(c)
    }

    pub fn combine(&self, c: &[Rational]) -> Covector {
        self.xi
            .iter()
            .zip(c)
            .fold(Covector::zero(self.n, self.h), |acc, (x, k)| {
                acc.add(&x.scale(k))
            })
    }

    pub fn as_subspace(&self) -> SubspaceBasis {
        SubspaceBasis {
            degree: self.h,
            vectors: self.xi.clone(),
        }
    }

    pub fn to_json(&self) -> E0BasisJson {
        E0BasisJson {
            n: self.n,
            degree: self.h,
            xi: self.xi.iter().map(Covector::to_json).collect(),
            gram: self.gram.iter().map(rational::to_parts).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E0BasisJson {
    pub n: usize,
    pub degree: usize,
    pub xi: Vec<CovectorJson>,
    pub gram: Vec<(String, String)>,
}

/// `E₀ʰ = Pʰ` for `h ≤ n`, and `{β∧θ : β ∈ Λ^{h−1}𝔥₁, Lβ = 0}` for `h > n`.
pub fn e0_basis(n: usize, h: usize) -> Result<E0Basis> {
    if h > 2 * n + 1 {
        return Err(Error::DegreeOutOfRange { n, degree: h });
    }
    let raw = if h <= n {
        exterior::primitive_basis(n, h)?
    } else {
        let src = ExteriorBasis::horizontal(n, h - 1);
        let theta = Covector::theta(n);
        let betas = exterior::lefschetz_matrix(n, h - 1).nullspace();
        SubspaceBasis {
            degree: h,
            vectors: betas
                .iter()
                .map(|b| src.from_vector(b).wedge(&theta))
                .collect(),
        }
    };
    let ortho = exterior::orthogonal_basis(n, &raw);
    let gram = ortho.vectors.iter().map(Covector::norm_squared).collect();
    Ok(E0Basis {
        n,
        h,
        xi: ortho.vectors,
        gram,
    })
}

/// Weight-zero part `d₀ : Λʰ𝔥 → Λʰ⁺¹𝔥` of the exterior derivative.
pub fn d0_matrix(n: usize, h: usize) -> QMatrix {
    full_d(n, h).constant_part()
}

/// `ker d₀ ∩ ker d₀ᵀ` in degree `h`, computed without reference to `L`.
pub fn e0_kernel_basis(n: usize, h: usize) -> Result<SubspaceBasis> {
    if h > 2 * n + 1 {
        return Err(Error::DegreeOutOfRange { n, degree: h });
    }
    let full = ExteriorBasis::full(n, h);
    let mut stacked = d0_matrix(n, h);
    if h > 0 {
        stacked = stacked.vstack(&d0_matrix(n, h - 1).transpose());
    }
    let ns = if stacked.rows() == 0 {
        QMatrix::identity(full.len()).columns()
    } else {
        stacked.nullspace()
    };
    Ok(SubspaceBasis {
        degree: h,
        vectors: ns.iter().map(|v| full.from_vector(v)).collect(),
    })
}

/// `dim E₀ʰ` from the closed formula.
pub fn e0_dimension(n: usize, h: usize) -> usize {
    if h <= n {
        exterior::primitive_dimension(n, h)
    } else if h <= 2 * n + 1 {
        exterior::primitive_dimension(n, 2 * n + 1 - h)
    } else {
        0
    }
}

/// True when both constructions of `E₀ʰ` span the same subspace.
pub fn constructions_agree(n: usize, h: usize) -> Result<bool> {
    let a = e0_basis(n, h)?;
    let b = e0_kernel_basis(n, h)?;
    if a.dim() != b.dim() {
        return Ok(false);
    }
    if a.dim() == 0 {
        return Ok(true);
    }
    Ok(linalg::same_column_space(&a.matrix(), &b.matrix(n)))
}

/// Pairwise orthogonality and the recorded Gram diagonal.
pub fn is_orthogonal(b: &E0Basis) -> bool {
    b.xi.iter().enumerate().all(|(i, x)| {
        b.xi.iter().enumerate().all(|(j, y)| {
            let ip = x.inner(y).unwrap();
            if i == j {
                ip == b.gram[i]
            } else {
                ip.is_zero()
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::binomial;

    #[test]
    fn dimension_examples() {
        let dims = |n: usize| {
            (0..=2 * n + 1)
                .map(|h| e0_basis(n, h).unwrap().dim())
                .collect::<Vec<_>>()
        };
        assert_eq!(dims(1), vec![1, 2, 2, 1]);
        assert_eq!(dims(2), vec![1, 4, 5, 5, 4, 1]);
        assert_eq!(
            e0_basis(3, 3).unwrap().dim(),
            binomial(6, 3) - binomial(6, 1)
        );
    }

    #[test]
    fn bases_have_the_defining_shape() {
        for n in 1..=3 {
            for h in 0..=2 * n + 1 {
                let b = e0_basis(n, h).unwrap();
                assert_eq!(b.dim(), e0_dimension(n, h));
                assert!(is_orthogonal(&b));
                for x in b.xi() {
                    if h <= n {
                        assert!(x.is_horizontal());
                        if h >= 2 {
                            assert!(x.lefschetz_lambda().unwrap().is_zero());
                        }
                    } else {
                        let (a1, a2) = x.theta_split();
                        assert!(a1.is_zero());
                        assert!(a2.lefschetz_l().unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_construction_agrees() {
        for n in 1..=3 {
            for h in 0..=2 * n + 1 {
                assert!(constructions_agree(n, h).unwrap(), "n={n} h={h}");
            }
        }
    }

    #[test]
    fn coefficients_round_trip_and_reject_outsiders() {
        let b = e0_basis(2, 2).unwrap();
        let v = b.combine(&[1, -2, 0, 3, 5].map(rational::int));
        assert_eq!(
            b.coefficients(&v).unwrap(),
            [1, -2, 0, 3, 5].map(rational::int).to_vec()
        );
        let outside = Covector::dtheta(2);
        assert!(matches!(
            b.coefficients(&outside),
            Err(Error::NonzeroResidual(_))
        ));
    }
}
