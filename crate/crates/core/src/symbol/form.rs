use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{E0Basis, OperatorMatrix};
use crate::exterior::Covector;
use crate::lie_algebra::{apply_to_polynomial, CoordPolynomial};
use crate::rational::{self, int, Rational};
use crate::{Error, Result};

/// Section of `E₀ʰ` with polynomial coefficients in the recorded basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    h: usize,
    coeffs: Vec<CoordPolynomial>,
}

impl PolyForm {
    pub fn new(n: usize, h: usize, coeffs: Vec<CoordPolynomial>) -> Self {
        assert!(coeffs.iter().all(|c| c.n() == n));
        Self { n, h, coeffs }
    }

    pub fn zero(n: usize, h: usize, dim: usize) -> Self {
        Self::new(n, h, vec![CoordPolynomial::zero(n); dim])
    }

    /// Constant-coefficient form `Σ c_k ξ_k`.
    pub fn constant(n: usize, h: usize, c: &[Rational]) -> Self {
        Self::new(
            n,
            h,
            c.iter()
                .map(|v| CoordPolynomial::constant(n, v.clone()))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[CoordPolynomial] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CoordPolynomial::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.n,
            self.h,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.n,
            self.h,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    /// `(M u)_r = Σ_c M[r][c] u_c`.
    pub fn apply(&self, m: &OperatorMatrix) -> Result<Self> {
        if m.cols() != self.dim() || m.source_degree() != self.h {
            return Err(Error::DimensionMismatch {
                expected: m.cols(),
                found: self.dim(),
            });
        }
        let coeffs = (0..m.rows())
            .map(|r| {
                (0..m.cols()).fold(CoordPolynomial::zero(self.n), |acc, c| {
                    let e = m.get(r, c);
                    if e.is_zero() || self.coeffs[c].is_zero() {
                        acc
                    } else {
                        acc.add(&apply_to_polynomial(e, &self.coeffs[c]))
                    }
                })
            })
            .collect();
        Ok(Self::new(self.n, m.target_degree(), coeffs))
    }

    /// Random form: each coefficient has up to `terms` monomials of total
    /// degree ≤ `max_degree` with integer coefficients in `[-3, 3]`.
    pub fn random(
        n: usize,
        h: usize,
        dim: usize,
        max_degree: u32,
        terms: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let nv = 2 * n + 1;
        let coeffs = (0..dim)
            .map(|_| {
                let mut p = CoordPolynomial::zero(n);
                for _ in 0..rng.gen_range(0..=terms) {
                    let mut e = vec![0u32; nv];
                    for _ in 0..rng.gen_range(0..=max_degree) {
                        e[rng.gen_range(0..nv)] += 1;
                    }
                    p.add_term(e, int(rng.gen_range(-3..=3)));
                }
                p
            })
            .collect();
        Self::new(n, h, coeffs)
    }

    /// Covector value at a rational point.
    pub fn eval(&self, basis: &E0Basis, point: &[Rational]) -> Covector {
        let c: Vec<Rational> = self.coeffs.iter().map(|p| p.eval(point)).collect();
        basis.combine(&c)
    }

    pub fn to_json(&self) -> PolyFormJson {
        PolyFormJson {
            n: self.n,
            degree: self.h,
            coefficients: self.coeffs.iter().map(poly_to_json).collect(),
        }
    }

    pub fn from_json(j: &PolyFormJson) -> Result<Self> {
        let coeffs = j
            .coefficients
            .iter()
            .map(|c| poly_from_json(j.n, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(j.n, j.degree, coeffs))
    }
}

pub type PolyJson = Vec<(Vec<u32>, String, String)>;

pub fn poly_to_json(p: &CoordPolynomial) -> PolyJson {
    p.terms()
        .map(|(e, c)| {
            let (num, den) = rational::to_parts(c);
            (e.clone(), num, den)
        })
        .collect()
}

pub fn poly_from_json(n: usize, j: &PolyJson) -> Result<CoordPolynomial> {
    let mut p = CoordPolynomial::zero(n);
    for (e, num, den) in j {
        if e.len() != 2 * n + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * n + 1,
                found: e.len(),
            });
        }
        p.add_term(e.clone(), rational::from_parts(num, den)?);
    }
    Ok(p)
}

/// Coefficients in the `E₀ʰ` basis as lists of `(exponents, numerator, denominator)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyFormJson {
    pub n: usize,
    pub degree: usize,
    pub coefficients: Vec<PolyJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RuminComplex;

    #[test]
    fn dc_of_x1() {
        let c = RuminComplex::new(1).unwrap();
        let u = PolyForm::new(1, 0, vec![CoordPolynomial::var(1, 0)]);
        let du = u.apply(c.dc(0)).unwrap();
        assert_eq!(du, PolyForm::constant(1, 1, &[int(1), int(0)]));
        let j = serde_json::to_string(&du.to_json()).unwrap();
        assert_eq!(
            PolyForm::from_json(&serde_json::from_str(&j).unwrap()).unwrap(),
            du
        );
    }
}
