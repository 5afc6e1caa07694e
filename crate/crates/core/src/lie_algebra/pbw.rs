use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, int, Rational};

/// A generator `Wᵢ` of the Heisenberg Lie algebra, stored 0-based:
/// `0..n` are `X₁..Xₙ`, `n..2n` are `Y₁..Yₙ`, `2n` is `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator(pub usize);

impl Generator {
    /// From the 1-based index used in `W₁..W₂ₙ₊₁`.
    pub fn from_one_based(i: usize) -> Self {
        assert!(i >= 1, "generator indices start at 1");
        Generator(i - 1)
    }

    pub fn x(j: usize) -> Self {
        Generator(j)
    }

    pub fn y(n: usize, j: usize) -> Self {
        Generator(n + j)
    }

    pub fn t(n: usize) -> Self {
        Generator(2 * n)
    }

    pub fn is_t(self, n: usize) -> bool {
        self.0 == 2 * n
    }

    /// Dilation weight: 1 on the first layer, 2 for `T`.
    pub fn weight(self, n: usize) -> u32 {
        if self.is_t(n) {
            2
        } else {
            1
        }
    }

    pub fn name(self, n: usize) -> String {
        if self.0 < n {
            format!("X{}", self.0 + 1)
        } else if self.0 < 2 * n {
            format!("Y{}", self.0 - n + 1)
        } else {
            "T".to_string()
        }
    }

    fn latex(self, n: usize) -> String {
        if self.0 < n {
            format!("X_{{{}}}", self.0 + 1)
        } else if self.0 < 2 * n {
            format!("Y_{{{}}}", self.0 - n + 1)
        } else {
            "T".to_string()
        }
    }
}

/// Exponent vector of `W₁^{i₁}⋯W₂ₙ^{i₂ₙ}T^{i₂ₙ₊₁}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PbwMonomial(pub Vec<u32>);

impl PbwMonomial {
    pub fn one(n: usize) -> Self {
        PbwMonomial(vec![0; 2 * n + 1])
    }

    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    /// `|I|`, the order as a differential operator.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `d(I) = i₁+⋯+i₂ₙ + 2·i₂ₙ₊₁`.
    pub fn homogeneity(&self) -> u32 {
        let last = self.0.len() - 1;
        self.0[..last].iter().sum::<u32>() + 2 * self.0[last]
    }

    /// The generators in canonical order, leftmost first.
    pub fn word(&self) -> Vec<Generator> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(g, &e)| std::iter::repeat_n(Generator(g), e as usize))
            .collect()
    }

    pub fn t_exponent(&self) -> u32 {
        *self.0.last().unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    /// The zero polynomial is homogeneous of every degree.
    Zero,
    Degree(u32),
    Inhomogeneous,
}

/// Exact noncommutative polynomial in `W₁..W₂ₙ, T`, stored in PBW normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorPolynomial {
    n: usize,
    terms: BTreeMap<PbwMonomial, Rational>,
}

impl OperatorPolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(PbwMonomial::one(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn generator(n: usize, g: Generator) -> Self {
        Self::monomial(n, &[g], Rational::one())
    }

    /// Single ordered monomial; `word` must already be in canonical order.
    pub fn monomial(n: usize, word: &[Generator], c: Rational) -> Self {
        let mut exps = vec![0; 2 * n + 1];
        let mut last = 0;
        for g in word {
            assert!(g.0 >= last, "word is not in PBW order; use pbw_normalize");
            last = g.0;
            exps[g.0] += 1;
        }
        let mut p = Self::zero(n);
        p.add_term(PbwMonomial(exps), c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (PbwMonomial, Rational)>) -> Self {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            assert_eq!(m.0.len(), 2 * n + 1, "monomial length does not match n");
            p.add_term(m, c);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &PbwMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&PbwMonomial::one(self.n))
    }

    pub fn add_term(&mut self, m: PbwMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// `self · W_g`, re-normalised. Only `Yⱼ^b Xⱼ = Xⱼ Yⱼ^b − b Yⱼ^{b−1} T`
    /// produces extra terms.
    pub fn mul_generator(&self, g: Generator) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            let mut up = m.clone();
            up.0[g.0] += 1;
            out.add_term(up, c.clone());
            if g.0 < n {
                let b = m.0[n + g.0];
                if b > 0 {
                    let mut swapped = m.clone();
                    swapped.0[n + g.0] -= 1;
                    swapped.0[2 * n] += 1;
                    out.add_term(swapped, -c * int(b as i64));
                }
            }
        }
        out
    }

    /// Operator composition `self ∘ other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "operators over different groups");
        let mut out = Self::zero(self.n);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (m, c) in &other.terms {
            let mut acc = self.clone();
            for g in m.word() {
                acc = acc.mul_generator(g);
            }
            out.add_assign(&acc.scale(c));
        }
        out
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut degrees = self.terms.keys().map(PbwMonomial::homogeneity);
        match degrees.next() {
            None => Homogeneity::Zero,
            Some(d) if degrees.all(|e| e == d) => Homogeneity::Degree(d),
            Some(_) => Homogeneity::Inhomogeneous,
        }
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(PbwMonomial::order).max().unwrap_or(0)
    }

    /// Formal transpose with respect to Haar measure: `Wᵢᵗ = −Wᵢ`, so a word
    /// is reversed and multiplied by `(−1)^{|I|}`.
    pub fn formal_adjoint(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let mut word = m.word();
            word.reverse();
            let sign = if m.order() % 2 == 0 { c.clone() } else { -c };
            out.add_assign(&pbw_normalize(self.n, &word, sign));
        }
        out
    }

    pub fn to_latex(&self) -> String {
        self.render(
            |g, e| {
                if e == 1 {
                    g.latex(self.n)
                } else {
                    format!("{}^{{{e}}}", g.latex(self.n))
                }
            },
            " ",
        )
    }

    fn render(&self, factor: impl Fn(Generator, u32) -> String, sep: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        // Highest order first, then lexicographically descending exponents.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            b.0.order()
                .cmp(&a.0.order())
                .then_with(|| b.0 .0.cmp(&a.0 .0))
        });
        let mut out = String::new();
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(g, &e)| factor(Generator(g), e))
                    .collect::<Vec<_>>()
                    .join(sep);
            if mono.is_empty() {
                out.push_str(&rational::fmt(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&rational::fmt(&mag));
                out.push_str(sep);
                out.push_str(&mono);
            }
        }
        out
    }
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.render(
            |g, e| {
                if e == 1 {
                    g.name(self.n)
                } else {
                    format!("{}^{e}", g.name(self.n))
                }
            },
            "*",
        );
        f.write_str(&s)
    }
}

/// Rewrites `c · w₁w₂⋯wₖ` into PBW normal form.
pub fn pbw_normalize(n: usize, word: &[Generator], c: Rational) -> OperatorPolynomial {
    let mut acc = OperatorPolynomial::constant(n, c);
    for &g in word {
        assert!(g.0 <= 2 * n, "generator index out of range");
        acc = acc.mul_generator(g);
    }
    acc
}
