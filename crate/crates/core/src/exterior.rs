//! Exact exterior algebra on `𝔥* = span{dx₁..dxₙ, dy₁..dyₙ, θ}`.
//!
//! Index `i < 2n` is `ωᵢ` (`dxᵢ` then `dyᵢ`), index `2n` is `θ`. The monomial
//! basis is orthonormal, the volume form is `ω₁∧⋯∧ω₂ₙ∧θ`, and
//! `dθ = −Σᵢ dxᵢ∧dyᵢ`. The Lefschetz operator is `L = dθ ∧ ·` on horizontal
//! covectors and `Λ` is its transpose.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, QMatrix};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// `ω_{i₁}∧⋯∧ω_{iₖ}` with `i₁ < ⋯ < iₖ`, stored as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WedgeMonomial(u32);

impl WedgeMonomial {
    pub const ONE: WedgeMonomial = WedgeMonomial(0);

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Invalid(format!(
                    "wedge indices not strictly increasing: {indices:?}"
                )));
            }
        }
        for &i in indices {
            mask |= 1 << i;
        }
        Ok(WedgeMonomial(mask))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|i| self.0 & (1 << i) != 0).collect()
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        WedgeMonomial(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        WedgeMonomial(self.0 & !(1 << i))
    }

    /// `self ∧ other = sign · (self ∪ other)`, or `None` when they overlap.
    pub fn wedge(self, other: Self) -> Option<(i32, Self)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Count inversions: pairs (a in self, b in other) with a > b.
        let mut swaps = 0;
        for b in other.indices() {
            swaps += (self.0 >> (b + 1)).count_ones();
        }
        let sign = if swaps % 2 == 0 { 1 } else { -1 };
        Some((sign, WedgeMonomial(self.0 | other.0)))
    }
}

impl Ord for WedgeMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for WedgeMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered monomial basis `Ψʰ` (or its horizontal part).
#[derive(Clone, Debug)]
pub struct ExteriorBasis {
    n: usize,
    degree: usize,
    monomials: Vec<WedgeMonomial>,
    index: HashMap<WedgeMonomial, usize>,
}

impl ExteriorBasis {
    /// All of `Λʰ𝔥` in lexicographic order.
    pub fn full(n: usize, degree: usize) -> Self {
        Self::build(n, degree, 2 * n + 1)
    }

    /// `Λʰ𝔥₁`: monomials avoiding `θ`.
    pub fn horizontal(n: usize, degree: usize) -> Self {
        Self::build(n, degree, 2 * n)
    }

    fn build(n: usize, degree: usize, span: usize) -> Self {
        let monomials: Vec<WedgeMonomial> = if degree > span {
            Vec::new()
        } else {
            (0..span)
                .combinations(degree)
                .map(|c| WedgeMonomial::from_indices(&c).unwrap())
                .collect()
        };
        let index = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Self {
            n,
            degree,
            monomials,
            index,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[WedgeMonomial] {
        &self.monomials
    }

    pub fn position(&self, m: WedgeMonomial) -> Option<usize> {
        self.index.get(&m).copied()
    }

    pub fn to_vector(&self, a: &Covector) -> Vec<Rational> {
        assert_eq!(a.degree, self.degree);
        let mut v = vec![Rational::zero(); self.len()];
        for (m, c) in &a.coeffs {
            let i = self
                .position(*m)
                .expect("covector has components outside this basis");
            v[i] = c.clone();
        }
        v
    }

    pub fn from_vector(&self, v: &[Rational]) -> Covector {
        let mut a = Covector::zero(self.n, self.degree);
        for (m, c) in self.monomials.iter().zip(v) {
            a.add_term(*m, c.clone());
        }
        a
    }
}

/// Exact covector of fixed degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covector {
    n: usize,
    degree: usize,
    coeffs: BTreeMap<WedgeMonomial, Rational>,
}

impl Covector {
    pub fn zero(n: usize, degree: usize) -> Self {
        Self {
            n,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(n, WedgeMonomial::ONE, Rational::one())
    }

    pub fn monomial(n: usize, m: WedgeMonomial, c: Rational) -> Self {
        let mut a = Self::zero(n, m.degree());
        a.add_term(m, c);
        a
    }

    /// `ωᵢ` for `i < 2n`, `θ` for `i = 2n`.
    pub fn omega(n: usize, i: usize) -> Self {
        Self::monomial(n, WedgeMonomial(1 << i), Rational::one())
    }

    pub fn dx(n: usize, j: usize) -> Self {
        Self::omega(n, j)
    }

    pub fn dy(n: usize, j: usize) -> Self {
        Self::omega(n, n + j)
    }

    pub fn theta(n: usize) -> Self {
        Self::omega(n, 2 * n)
    }

    /// `dV = ω₁∧⋯∧ω₂ₙ∧θ`.
    pub fn volume(n: usize) -> Self {
        Self::monomial(n, WedgeMonomial((1 << (2 * n + 1)) - 1), Rational::one())
    }

    /// `dθ = −Σ dxᵢ∧dyᵢ`.
    pub fn dtheta(n: usize) -> Self {
        let mut a = Self::zero(n, 2);
        for j in 0..n {
            a.add_term(WedgeMonomial((1 << j) | (1 << (n + j))), -Rational::one());
        }
        a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WedgeMonomial, &Rational)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, m: WedgeMonomial) -> Rational {
        self.coeffs.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_horizontal(&self) -> bool {
        self.coeffs.keys().all(|m| !m.contains(2 * self.n))
    }

    pub fn add_term(&mut self, m: WedgeMonomial, c: Rational) {
        assert_eq!(
            m.degree(),
            self.degree,
            "monomial degree differs from covector degree"
        );
        if c.is_zero() {
            return;
        }
        let v = self.coeffs.entry(m).or_insert_with(Rational::zero);
        *v += c;
        if v.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.n, self.degree);
        }
        Self {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    /// Exterior product. When the degrees add up past `2n+1` the result is
    /// the zero covector of degree `2n+1`.
    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let top = 2 * self.n + 1;
        let degree = (self.degree + other.degree).min(top);
        let mut out = Self::zero(self.n, degree);
        if self.degree + other.degree > top {
            return out;
        }
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if let Some((sign, m)) = a.wedge(*b) {
                    let c = ca * cb;
                    out.add_term(m, if sign > 0 { c } else { -c });
                }
            }
        }
        out
    }

    /// Inner product making the monomial basis orthonormal.
    pub fn inner(&self, other: &Self) -> Result<Rational> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(self
            .coeffs
            .iter()
            .filter_map(|(m, c)| other.coeffs.get(m).map(|d| c * d))
            .fold(Rational::zero(), |acc, v| acc + v))
    }

    pub fn norm_squared(&self) -> Rational {
        self.coeffs
            .values()
            .fold(Rational::zero(), |acc, c| acc + c * c)
    }

    /// Hodge star: `b ∧ ∗a = ⟨b, a⟩ dV` for every `b` of the same degree.
    pub fn hodge_star(&self) -> Self {
        let top = 2 * self.n + 1;
        let full = WedgeMonomial((1 << top) - 1);
        let mut out = Self::zero(self.n, top - self.degree);
        for (m, c) in &self.coeffs {
            let comp = WedgeMonomial(full.0 & !m.0);
            let (sign, _) = m.wedge(comp).unwrap();
            out.add_term(comp, if sign > 0 { c.clone() } else { -c });
        }
        out
    }

    /// `(a₁, a₂)` with `a = a₁ + θ∧a₂`, both horizontal.
    pub fn theta_split(&self) -> (Self, Self) {
        let t = 2 * self.n;
        let mut a1 = Self::zero(self.n, self.degree);
        let mut a2 = Self::zero(self.n, self.degree.saturating_sub(1));
        for (m, c) in &self.coeffs {
            if m.contains(t) {
                // ω_J ∧ θ = (−1)^{|J|} θ ∧ ω_J
                let rest = m.without(t);
                let sign_neg = rest.degree() % 2 == 1;
                a2.add_term(rest, if sign_neg { -c } else { c.clone() });
            } else {
                a1.add_term(*m, c.clone());
            }
        }
        (a1, a2)
    }

    pub fn lefschetz_l(&self) -> Result<Self> {
        if !self.is_horizontal() {
            return Err(Error::NonHorizontal);
        }
        let out = Self::dtheta(self.n).wedge(self);
        if self.degree + 2 > 2 * self.n {
            return Ok(Self::zero(self.n, out.degree));
        }
        Ok(out)
    }

    /// Adjoint of `L` with respect to the monomial inner product.
    pub fn lefschetz_lambda(&self) -> Result<Self> {
        if !self.is_horizontal() {
            return Err(Error::NonHorizontal);
        }
        if self.degree < 2 {
            return Ok(Self::zero(self.n, 0));
        }
        let m = lefschetz_matrix(self.n, self.degree - 2);
        let src = ExteriorBasis::horizontal(self.n, self.degree);
        let dst = ExteriorBasis::horizontal(self.n, self.degree - 2);
        Ok(dst.from_vector(&m.transpose().mul_vec(&src.to_vector(self))))
    }

    pub fn to_json(&self) -> CovectorJson {
        CovectorJson {
            n: self.n,
            degree: self.degree,
            terms: self
                .coeffs
                .iter()
                .map(|(m, c)| {
                    let (num, den) = rational::to_parts(c);
                    (m.indices().into_iter().map(|i| i + 1).collect(), num, den)
                })
                .collect(),
        }
    }

    pub fn from_json(j: &CovectorJson) -> Result<Self> {
        let mut a = Self::zero(j.n, j.degree);
        for (idx, num, den) in &j.terms {
            if idx.iter().any(|&i| i == 0 || i > 2 * j.n + 1) {
                return Err(Error::Invalid(format!(
                    "wedge index out of range in {idx:?}"
                )));
            }
            let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            let m = WedgeMonomial::from_indices(&zero_based)?;
            if m.degree() != j.degree {
                return Err(Error::DegreeMismatch(j.degree, m.degree()));
            }
            a.add_term(m, rational::from_parts(num, den)?);
        }
        Ok(a)
    }

    /// e.g. `dx1^dy1 - 2 dy1^theta`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let n = self.n;
        let name = |i: usize| {
            if i < n {
                format!("dx{}", i + 1)
            } else if i < 2 * n {
                format!("dy{}", i - n + 1)
            } else {
                "theta".into()
            }
        };
        self.coeffs
            .iter()
            .map(|(m, c)| {
                let mono = if m.degree() == 0 {
                    "1".into()
                } else {
                    m.indices().into_iter().map(name).join("^")
                };
                format!("{} {}", rational::fmt(c), mono)
            })
            .join(" + ")
    }
}

/// Serialized covector: 1-based index lists with exact numerator/denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CovectorJson {
    pub n: usize,
    pub degree: usize,
    pub terms: Vec<(Vec<usize>, String, String)>,
}

/// Matrix of `L : Λʰ𝔥₁ → Λ^{h+2}𝔥₁` in the horizontal monomial bases.
pub fn lefschetz_matrix(n: usize, h: usize) -> QMatrix {
    let src = ExteriorBasis::horizontal(n, h);
    let dst = ExteriorBasis::horizontal(n, h + 2);
    let dtheta = Covector::dtheta(n);
    let mut m = QMatrix::zeros(dst.len(), src.len());
    for (c, mono) in src.monomials().iter().enumerate() {
        let image = dtheta.wedge(&Covector::monomial(n, *mono, Rational::one()));
        for (tm, tc) in image.terms() {
            if let Some(r) = dst.position(*tm) {
                m.set(r, c, tc.clone());
            }
        }
    }
    m
}

/// `L^k : Λʰ𝔥₁ → Λ^{h+2k}𝔥₁`.
pub fn lefschetz_power_matrix(n: usize, h: usize, k: usize) -> QMatrix {
    let mut m = QMatrix::identity(ExteriorBasis::horizontal(n, h).len());
    for i in 0..k {
        m = lefschetz_matrix(n, h + 2 * i).mul(&m);
    }
    m
}

/// Linearly independent covectors of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    pub degree: usize,
    pub vectors: Vec<Covector>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Columns in the full monomial basis of `Λ^degree 𝔥`.
    pub fn matrix(&self, n: usize) -> QMatrix {
        let basis = ExteriorBasis::full(n, self.degree);
        let cols: Vec<Vec<Rational>> = self.vectors.iter().map(|v| basis.to_vector(v)).collect();
        QMatrix::from_columns(basis.len(), &cols)
    }
}

/// `Pʰ = ker Λ ∩ Λʰ𝔥₁` (with `P⁰ = ℝ`, `P¹ = Λ¹𝔥₁`).
pub fn primitive_basis(n: usize, h: usize) -> Result<SubspaceBasis> {
    if h > 2 * n {
        return Err(Error::DegreeOutOfRange { n, degree: h });
    }
    let basis = ExteriorBasis::horizontal(n, h);
    let vectors = if h < 2 {
        (0..basis.len())
            .map(|i| {
                let mut v = vec![Rational::zero(); basis.len()];
                v[i] = Rational::one();
                v
            })
            .collect()
    } else {
        // Λ on degree h is the transpose of L from degree h − 2.
        lefschetz_matrix(n, h - 2).transpose().nullspace()
    };
    Ok(SubspaceBasis {
        degree: h,
        vectors: vectors.iter().map(|v| basis.from_vector(v)).collect(),
    })
}

/// `ker L^{n−h+1}` on `Λʰ𝔥₁`, the second characterisation of `Pʰ` for `h ≤ n`.
pub fn primitive_basis_via_l_power(n: usize, h: usize) -> SubspaceBasis {
    assert!(h <= n);
    let basis = ExteriorBasis::horizontal(n, h);
    let ns = lefschetz_power_matrix(n, h, n - h + 1).nullspace();
    SubspaceBasis {
        degree: h,
        vectors: ns.iter().map(|v| basis.from_vector(v)).collect(),
    }
}

/// Writes a horizontal covector as `Σᵢ Lⁱ pᵢ` with `pᵢ ∈ P^{h−2i}`; only the
/// nonzero components are returned, ordered by `i`.
pub fn lefschetz_decompose(a: &Covector) -> Result<Vec<(usize, Covector)>> {
    if !a.is_horizontal() {
        return Err(Error::NonHorizontal);
    }
    let (n, h) = (a.n(), a.degree());
    let target = ExteriorBasis::horizontal(n, h);
    let mut columns = Vec::new();
    let mut owners = Vec::new();
    for i in 0..=h / 2 {
        let d = h - 2 * i;
        if d > n {
            continue;
        }
        let prim = primitive_basis(n, d)?;
        let src = ExteriorBasis::horizontal(n, d);
        let li = lefschetz_power_matrix(n, d, i);
        for p in &prim.vectors {
            columns.push(li.mul_vec(&src.to_vector(p)));
            owners.push((i, p.clone()));
        }
    }
    let m = QMatrix::from_columns(target.len(), &columns);
    let coeffs = m
        .solve(&target.to_vector(a))
        .ok_or_else(|| Error::Invalid("Lefschetz decomposition system is inconsistent".into()))?;
    let mut parts: BTreeMap<usize, Covector> = BTreeMap::new();
    for ((i, p), c) in owners.into_iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let entry = parts
            .entry(i)
            .or_insert_with(|| Covector::zero(n, p.degree()));
        *entry = entry.add(&p.scale(&c));
    }
    Ok(parts.into_iter().filter(|(_, p)| !p.is_zero()).collect())
}

/// `Lⁱ a`.
pub fn lefschetz_power(a: &Covector, i: usize) -> Result<Covector> {
    let mut out = a.clone();
    for _ in 0..i {
        out = out.lefschetz_l()?;
    }
    Ok(out)
}

/// Orthogonalised, primitive-integer version of a subspace basis.
pub fn orthogonal_basis(n: usize, basis: &SubspaceBasis) -> SubspaceBasis {
    let full = ExteriorBasis::full(n, basis.degree);
    let vecs: Vec<Vec<Rational>> = basis.vectors.iter().map(|v| full.to_vector(v)).collect();
    SubspaceBasis {
        degree: basis.degree,
        vectors: linalg::orthogonalize(&vecs)
            .iter()
            .map(|v| full.from_vector(v))
            .collect(),
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(2n, h) − C(2n, h−2)`.
pub fn primitive_dimension(n: usize, h: usize) -> usize {
    if h > n {
        return 0;
    }
    binomial(2 * n, h) - if h >= 2 { binomial(2 * n, h - 2) } else { 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    #[test]
    fn wedge_examples() {
        let n = 1;
        let dx = Covector::dx(n, 0);
        let dy = Covector::dy(n, 0);
        let th = Covector::theta(n);
        let dxdy = dx.wedge(&dy);
        assert_eq!(
            dxdy,
            Covector::monomial(n, WedgeMonomial::from_indices(&[0, 1]).unwrap(), int(1))
        );
        assert!(dx.wedge(&dx).is_zero());
        let e = dx.add(&dy).wedge(&th);
        assert_eq!(e.terms().count(), 2);
        assert_eq!(
            e.coefficient(WedgeMonomial::from_indices(&[0, 2]).unwrap()),
            int(1)
        );
        assert_eq!(
            e.coefficient(WedgeMonomial::from_indices(&[1, 2]).unwrap()),
            int(1)
        );
        // Overflow clamps to the top degree.
        let big = dxdy.wedge(&dxdy);
        assert!(big.is_zero());
        assert_eq!(big.degree(), 3);
    }

    #[test]
    fn inner_examples() {
        let n = 1;
        let dx = Covector::dx(n, 0);
        assert_eq!(dx.inner(&dx).unwrap(), int(1));
        assert_eq!(dx.inner(&Covector::dy(n, 0)).unwrap(), int(0));
        let v = dx.scale(&int(2)).add(&Covector::theta(n).scale(&int(3)));
        assert_eq!(v.inner(&v).unwrap(), int(13));
        assert!(matches!(
            dx.inner(&Covector::one(n)),
            Err(Error::DegreeMismatch(1, 0))
        ));
    }

    #[test]
    fn hodge_examples() {
        let n = 1;
        assert_eq!(Covector::one(n).hodge_star(), Covector::volume(n));
        assert_eq!(
            Covector::dx(n, 0).hodge_star(),
            Covector::dy(n, 0).wedge(&Covector::theta(n))
        );
    }

    /// Brute force: solve `b ∧ ∗a = ⟨b,a⟩ dV` over every basis pair.
    #[test]
    fn hodge_matches_defining_identity() {
        for n in 1..=2 {
            for h in 0..=2 * n + 1 {
                let basis = ExteriorBasis::full(n, h);
                for a in basis.monomials() {
                    let a = Covector::monomial(n, *a, int(1));
                    let star = a.hodge_star();
                    for b in basis.monomials() {
                        let b = Covector::monomial(n, *b, int(1));
                        let lhs = b.wedge(&star);
                        let rhs = Covector::volume(n).scale(&b.inner(&a).unwrap());
                        assert_eq!(lhs, rhs);
                    }
                    assert_eq!(star.hodge_star(), a);
                }
            }
        }
    }

    #[test]
    fn lefschetz_examples() {
        let one1 = Covector::one(1);
        assert_eq!(
            one1.lefschetz_l().unwrap(),
            Covector::dx(1, 0)
                .wedge(&Covector::dy(1, 0))
                .scale(&int(-1))
        );
        let one2 = Covector::one(2);
        let expected = Covector::dx(2, 0)
            .wedge(&Covector::dy(2, 0))
            .add(&Covector::dx(2, 1).wedge(&Covector::dy(2, 1)))
            .scale(&int(-1));
        assert_eq!(one2.lefschetz_l().unwrap(), expected);
        assert!(one1.lefschetz_l().unwrap().lefschetz_l().unwrap().is_zero());
        assert!(matches!(
            Covector::theta(1).lefschetz_l(),
            Err(Error::NonHorizontal)
        ));
    }

    #[test]
    fn lambda_examples() {
        let dxdy = Covector::dx(1, 0).wedge(&Covector::dy(1, 0));
        assert_eq!(
            dxdy.lefschetz_lambda().unwrap(),
            Covector::one(1).scale(&int(-1))
        );
        let dx1dx2 = Covector::dx(2, 0).wedge(&Covector::dx(2, 1));
        assert!(dx1dx2.lefschetz_lambda().unwrap().is_zero());
        assert!(Covector::one(2).lefschetz_lambda().unwrap().is_zero());
        assert!(Covector::theta(1).lefschetz_lambda().is_err());
    }

    #[test]
    fn primitive_dimensions() {
        assert_eq!(primitive_basis(1, 1).unwrap().dim(), 2);
        assert_eq!(primitive_basis(2, 2).unwrap().dim(), 5);
        assert_eq!(primitive_basis(2, 3).unwrap().dim(), 0);
        for n in 1..=3 {
            for h in 0..=2 * n {
                let p = primitive_basis(n, h).unwrap();
                assert_eq!(p.dim(), primitive_dimension(n, h), "n={n} h={h}");
                if h <= n {
                    let q = primitive_basis_via_l_power(n, h);
                    assert!(linalg::same_column_space(&p.matrix(n), &q.matrix(n)));
                }
            }
        }
    }

    #[test]
    fn sl2_relation() {
        for n in 1..=3 {
            for h in 0..=2 * n {
                let dim = ExteriorBasis::horizontal(n, h).len();
                let l_down = if h >= 2 {
                    Some(lefschetz_matrix(n, h - 2))
                } else {
                    None
                };
                let l_here = lefschetz_matrix(n, h);
                // LΛ on degree h: L_{h-2} Λ_h with Λ_h = L_{h-2}ᵀ.
                let l_lambda = l_down
                    .as_ref()
                    .map(|m| m.mul(&m.transpose()))
                    .unwrap_or_else(|| QMatrix::zeros(dim, dim));
                let lambda_l = l_here.transpose().mul(&l_here);
                let comm = l_lambda.sub(&lambda_l);
                let expected = QMatrix::identity(dim).scale(&int(h as i64 - n as i64));
                assert_eq!(comm, expected, "n={n} h={h}");
            }
        }
    }

    #[test]
    fn hard_lefschetz_is_bijective() {
        for n in 1..=3 {
            for h in 0..=n {
                let m = lefschetz_power_matrix(n, h, n - h);
                assert_eq!(m.rows(), m.cols());
                assert_eq!(m.rank(), m.rows(), "n={n} h={h}");
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let p = Covector::dx(2, 0).wedge(&Covector::dx(2, 1));
        assert_eq!(lefschetz_decompose(&p).unwrap(), vec![(0, p.clone())]);
        let dxdy = Covector::dx(1, 0).wedge(&Covector::dy(1, 0));
        assert_eq!(
            lefschetz_decompose(&dxdy).unwrap(),
            vec![(1, Covector::one(1).scale(&int(-1)))]
        );
    }

    #[test]
    fn theta_split_examples() {
        let n = 1;
        let (a1, a2) = Covector::dx(n, 0).theta_split();
        assert_eq!((a1, a2.is_zero()), (Covector::dx(n, 0), true));
        let (b1, b2) = Covector::theta(n).theta_split();
        assert!(b1.is_zero());
        assert_eq!(b2, Covector::one(n));
        let (c1, c2) = Covector::dx(n, 0).wedge(&Covector::theta(n)).theta_split();
        assert!(c1.is_zero());
        assert_eq!(c2, Covector::dx(n, 0).scale(&int(-1)));
    }

    #[test]
    fn json_roundtrip() {
        let a = Covector::dx(2, 0)
            .wedge(&Covector::theta(2))
            .scale(&crate::rational::rat(-7, 3));
        let j = a.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back: CovectorJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Covector::from_json(&back).unwrap(), a);
        assert_eq!(j.terms[0].0, vec![1, 5]);
    }

    fn arb_covector(n: usize, h: usize, horizontal: bool) -> impl Strategy<Value = Covector> {
        let basis = if horizontal {
            ExteriorBasis::horizontal(n, h)
        } else {
            ExteriorBasis::full(n, h)
        };
        let len = basis.len();
        proptest::collection::vec(-4i64..5, len)
            .prop_map(move |v| basis.from_vector(&v.into_iter().map(int).collect::<Vec<_>>()))
    }

    proptest! {
        #[test]
        fn graded_anticommutative(a in arb_covector(2, 2, false), b in arb_covector(2, 1, false), c in arb_covector(2, 1, false)) {
            prop_assert_eq!(b.wedge(&c), c.wedge(&b).scale(&int(-1)));
            prop_assert_eq!(a.wedge(&b), b.wedge(&a));
            prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
        }

        #[test]
        fn hodge_is_isometry(a in arb_covector(2, 2, false), b in arb_covector(2, 2, false)) {
            prop_assert_eq!(a.hodge_star().inner(&b.hodge_star()).unwrap(), a.inner(&b).unwrap());
            prop_assert_eq!(a.hodge_star().hodge_star(), a);
        }

        #[test]
        fn lambda_is_adjoint(a in arb_covector(2, 3, true), b in arb_covector(2, 1, true)) {
            let lhs = a.lefschetz_lambda().unwrap().inner(&b).unwrap();
            let rhs = a.inner(&b.lefschetz_l().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn decomposition_reconstructs(a in arb_covector(2, 2, true)) {
            let parts = lefschetz_decompose(&a).unwrap();
            let mut sum = Covector::zero(2, 2);
            for (i, p) in &parts {
                prop_assert!(p.lefschetz_lambda().unwrap().is_zero() || p.degree() < 2);
                sum = sum.add(&lefschetz_power(p, *i).unwrap());
            }
            prop_assert_eq!(sum, a);
            for (x, y) in parts.iter().tuple_combinations() {
                let lx = lefschetz_power(&x.1, x.0).unwrap();
                let ly = lefschetz_power(&y.1, y.0).unwrap();
                prop_assert!(lx.inner(&ly).unwrap().is_zero());
            }
        }

        #[test]
        fn theta_split_reconstructs(a in arb_covector(2, 3, false)) {
            let (a1, a2) = a.theta_split();
            prop_assert!(a1.is_horizontal() && a2.is_horizontal());
            prop_assert_eq!(a1.add(&Covector::theta(2).wedge(&a2)), a);
        }
    }
}
