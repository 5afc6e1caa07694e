use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::pbw::{Generator, OperatorPolynomial};
use crate::linalg::QMatrix;
use crate::rational::{half, int, to_f64, Rational};

/// Commutative polynomial in the exponential coordinates
/// `x₁..xₙ, y₁..yₙ, t` (variable `i` matches generator `Wᵢ`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordPolynomial {
    n: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl CoordPolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; 2 * n + 1], c);
        p
    }

    /// The coordinate function of variable `var` (0-based, `2n` is `t`).
    pub fn var(n: usize, var: usize) -> Self {
        let mut e = vec![0; 2 * n + 1];
        e[var] = 1;
        let mut p = Self::zero(n);
        p.add_term(e, Rational::one());
        p
    }

    pub fn monomial(n: usize, exps: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exps.len(), 2 * n + 1);
        let mut p = Self::zero(n);
        p.add_term(exps, c);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.n, Rational::one()), |acc, _| {
            acc.mul(self)
        })
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.add_term(d, c * int(e[var] as i64));
        }
        out
    }

    pub fn mul_var(&self, var: usize) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[var] += 1;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (e, c)| {
            let m = e.iter().zip(point).fold(c.clone(), |m, (&k, v)| {
                m * num_traits::pow(v.clone(), k as usize)
            });
            acc + m
        })
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(to_f64(c), |m, (&k, v)| m * v.powi(k as i32))
            })
            .sum()
    }

    /// `p(M z)`: each variable `zᵢ` is replaced by `Σⱼ Mᵢⱼ zⱼ`.
    pub fn substitute_linear(&self, m: &QMatrix) -> Self {
        let nv = self.nvars();
        assert_eq!((m.rows(), m.cols()), (nv, nv));
        let images: Vec<Self> = (0..nv)
            .map(|i| {
                let mut p = Self::zero(self.n);
                for j in 0..nv {
                    let mut e = vec![0; nv];
                    e[j] = 1;
                    p.add_term(e, m.get(i, j).clone());
                }
                p
            })
            .collect();
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&images[i].pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// `p ∘ δ_λ`.
    pub fn dilate(&self, lambda: &Rational) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let w: u32 = e[..2 * n].iter().sum::<u32>() + 2 * e[2 * n];
            out.add_term(e.clone(), c * num_traits::pow(lambda.clone(), w as usize));
        }
        out
    }

    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms
            .values()
            .map(num_traits::Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// `Xᵢ = ∂_{xᵢ} − ½yᵢ∂_t`, `Yᵢ = ∂_{yᵢ} + ½xᵢ∂_t`, `T = ∂_t`.
pub fn apply_generator(g: Generator, f: &CoordPolynomial) -> CoordPolynomial {
    let n = f.n();
    let t = 2 * n;
    let dt = f.derivative(t);
    if g.0 < n {
        f.derivative(g.0).sub(&dt.mul_var(n + g.0).scale(&half()))
    } else if g.0 < 2 * n {
        f.derivative(g.0).add(&dt.mul_var(g.0 - n).scale(&half()))
    } else {
        dt
    }
}

/// Applies an operator to a polynomial; within each PBW monomial the
/// rightmost generator acts first.
pub fn apply_to_polynomial(p: &OperatorPolynomial, f: &CoordPolynomial) -> CoordPolynomial {
    assert_eq!(p.n(), f.n());
    let mut out = CoordPolynomial::zero(f.n());
    for (m, c) in p.terms() {
        let mut g = f.clone();
        for gen in m.word().into_iter().rev() {
            g = apply_generator(gen, &g);
            if g.is_zero() {
                break;
            }
        }
        out = out.add(&g.scale(c));
    }
    out
}
