use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::form::{poly_to_json, PolyForm, PolyJson};
use super::tensor::{extract_symbol, left_inverse, LeftInverse, LeftInverseJson, Symbol};
use crate::complex::{E0Basis, OperatorMatrix};
use crate::lie_algebra::{apply_generator, CoordPolynomial, Generator};
use crate::linalg::QMatrix;
use crate::rational::{self, to_f64, Rational};
use crate::{Error, Result};

/// Fields `G_{I,a} = Σ_k F[I,k,a] α_k` of a closed form together with the
/// certificates of the decomposition.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub n: usize,
    pub degree: usize,
    pub order: u32,
    /// `fields[I][a]`, `a` ranging over `i` (order 1) or `(i, j)` row-major (order 2).
    pub fields: Vec<Vec<CoordPolynomial>>,
    pub left_inverse: LeftInverse,
    /// `Σᵢ Wᵢ G_{I,i}` or `Σ_{i,j} WᵢWⱼ G_{I,i,j}`.
    pub divergences: Vec<CoordPolynomial>,
    pub reconstruction_exact: bool,
    /// For order 2: the reversed composition `Σ WⱼWᵢ` agrees with `Σ WᵢWⱼ` on the symmetric parts.
    pub reversed_order_symmetric_agrees: Option<bool>,
    pub constant_squared: Rational,
}

impl DecompositionResult {
    pub fn divergence_free(&self) -> bool {
        self.divergences.iter().all(CoordPolynomial::is_zero)
    }

    /// `C` with `|G_I| ≤ C |α|` pointwise for every `I`.
    pub fn constant(&self) -> f64 {
        to_f64(&self.constant_squared).sqrt()
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            n: self.n,
            degree: self.degree,
            order: self.order,
            fields: self
                .fields
                .iter()
                .map(|row| row.iter().map(poly_to_json).collect())
                .collect(),
            left_inverse: self.left_inverse.to_json(),
            divergence_residuals: self
                .divergences
                .iter()
                .map(|p| rational::fmt(&p.max_abs_coefficient()))
                .collect(),
            divergence_free: self.divergence_free(),
            reconstruction_exact: self.reconstruction_exact,
            reversed_order_symmetric_agrees: self.reversed_order_symmetric_agrees,
            constant_squared: rational::fmt(&self.constant_squared),
            constant: self.constant(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub n: usize,
    pub degree: usize,
    pub order: u32,
    pub fields: Vec<Vec<PolyJson>>,
    pub left_inverse: LeftInverseJson,
    pub divergence_residuals: Vec<String>,
    pub divergence_free: bool,
    pub reconstruction_exact: bool,
    pub reversed_order_symmetric_agrees: Option<bool>,
    pub constant_squared: String,
    pub constant: f64,
}

/// `max_I Σ_{a,k} F[I,k,a]² / g_k`: by Cauchy–Schwarz `|G_I|² ≤ C² Σ_k g_k α_k²`.
pub fn field_constant_squared(f: &QMatrix, slots: usize, src: &E0Basis) -> Rational {
    let rows = f.rows() / slots.max(1);
    (0..rows)
        .map(|big_i| {
            (0..slots).fold(Rational::zero(), |acc, a| {
                f.row(big_i * slots + a)
                    .iter()
                    .zip(src.gram())
                    .fold(acc, |acc, (v, g)| acc + v * v / g)
            })
        })
        .max()
        .unwrap_or_else(Rational::zero)
}

fn apply_word(word: &[usize], f: &CoordPolynomial) -> CoordPolynomial {
    word.iter()
        .rev()
        .fold(f.clone(), |acc, &g| apply_generator(Generator(g), &acc))
}

/// Realises a closed form in `E₀ʰ` as divergence-free horizontal fields.
pub fn pierre_decompose(
    alpha: &PolyForm,
    dc: &OperatorMatrix,
    src: &E0Basis,
    dst: &E0Basis,
) -> Result<DecompositionResult> {
    let (n, h) = (alpha.n(), alpha.degree());
    let closed = alpha.apply(dc)?;
    if !closed.is_zero() {
        let worst = closed
            .coeffs()
            .iter()
            .map(CoordPolynomial::max_abs_coefficient)
            .max()
            .unwrap_or_else(Rational::zero);
        return Err(Error::NotClosed(rational::fmt(&worst)));
    }
    let symbol = extract_symbol(dc)?;
    let b = left_inverse(&symbol, dst)?;
    let f = symbol.field_tensor();
    let slots = symbol.slots();
    let m = 2 * n;
    let rows = dst.dim();

    let fields: Vec<Vec<CoordPolynomial>> = (0..rows)
        .map(|big_i| {
            (0..slots)
                .map(|a| {
                    alpha.coeffs().iter().enumerate().fold(
                        CoordPolynomial::zero(n),
                        |acc, (k, ak)| {
                            let c = f.get(big_i * slots + a, k);
                            if c.is_zero() {
                                acc
                            } else {
                                acc.add(&ak.scale(c))
                            }
                        },
                    )
                })
                .collect()
        })
        .collect();

    let word = |a: usize| -> Vec<usize> {
        match symbol {
            Symbol::Order1(_) => vec![a],
            Symbol::Order2(_) => vec![a / m, a % m],
        }
    };
    let divergences = fields
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold(CoordPolynomial::zero(n), |acc, (a, g)| {
                    acc.add(&apply_word(&word(a), g))
                })
        })
        .collect();

    let reconstructed: Vec<CoordPolynomial> = (0..src.dim())
        .map(|j| {
            (0..rows * slots).fold(CoordPolynomial::zero(n), |acc, col| {
                let c = b.b.get(j, col);
                if c.is_zero() {
                    acc
                } else {
                    acc.add(&fields[col / slots][col % slots].scale(c))
                }
            })
        })
        .collect();
    let reconstruction_exact = reconstructed.as_slice() == alpha.coeffs();

    let reversed_order_symmetric_agrees = match &symbol {
        Symbol::Order1(_) => None,
        Symbol::Order2(_) => {
            let sym = symbol.flattened();
            let ok = (0..rows).all(|big_i| {
                let sym_field = |a: usize| {
                    alpha
                        .coeffs()
                        .iter()
                        .enumerate()
                        .fold(CoordPolynomial::zero(n), |acc, (k, ak)| {
                            acc.add(&ak.scale(sym.get(big_i * slots + a, k)))
                        })
                };
                let forward = (0..slots).fold(CoordPolynomial::zero(n), |acc, a| {
                    acc.add(&apply_word(&[a / m, a % m], &sym_field(a)))
                });
                let reverse = (0..slots).fold(CoordPolynomial::zero(n), |acc, a| {
                    acc.add(&apply_word(&[a % m, a / m], &sym_field(a)))
                });
                forward == reverse
            });
            Some(ok)
        }
    };

    Ok(DecompositionResult {
        n,
        degree: h,
        order: symbol.order(),
        fields,
        left_inverse: b,
        divergences,
        reconstruction_exact,
        reversed_order_symmetric_agrees,
        constant_squared: field_constant_squared(&f, slots, src),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RuminComplex;
    use crate::rational::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn decompose(c: &RuminComplex, alpha: &PolyForm) -> Result<DecompositionResult> {
        let h = alpha.degree();
        pierre_decompose(alpha, c.dc(h), c.basis(h), c.basis(h + 1))
    }

    #[test]
    fn zero_form() {
        let c = RuminComplex::new(1).unwrap();
        let r = decompose(&c, &PolyForm::zero(1, 1, 2)).unwrap();
        assert!(r.fields.iter().flatten().all(CoordPolynomial::is_zero));
        assert!(r.reconstruction_exact && r.divergence_free());
    }

    #[test]
    fn exact_one_form() {
        let c = RuminComplex::new(1).unwrap();
        let u = PolyForm::new(1, 0, vec![CoordPolynomial::var(1, 0)]);
        let alpha = u.apply(c.dc(0)).unwrap();
        assert_eq!(alpha, PolyForm::constant(1, 1, &[int(1), int(0)]));
        let r = decompose(&c, &alpha).unwrap();
        assert!(r.reconstruction_exact && r.divergence_free());
        assert!(r.fields.iter().flatten().all(|g| g.degree() == 0));
        assert_eq!(r.reversed_order_symmetric_agrees, Some(true));
    }

    #[test]
    fn random_exact_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=2 {
            let c = RuminComplex::new(n).unwrap();
            for h in 1..=2 * n {
                let u = PolyForm::random(n, h - 1, c.basis(h - 1).dim(), 3, 4, &mut rng);
                let alpha = u.apply(c.dc(h - 1)).unwrap();
                let r = decompose(&c, &alpha).unwrap();
                assert!(r.reconstruction_exact, "n={n} h={h}");
                assert!(r.divergence_free(), "n={n} h={h}");
                assert!(r.constant_squared > Rational::zero());
            }
        }
    }

    #[test]
    fn non_closed_rejected() {
        let c = RuminComplex::new(1).unwrap();
        // d_c is second order on 1-forms when n = 1, so use a quadratic coefficient.
        let alpha = PolyForm::new(
            1,
            1,
            vec![CoordPolynomial::var(1, 1).pow(2), CoordPolynomial::zero(1)],
        );
        assert!(matches!(decompose(&c, &alpha), Err(Error::NotClosed(_))));
    }
}
