use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::complex::{E0Basis, OperatorMatrix};
use crate::lie_algebra::{pbw_normalize, Generator, Homogeneity, OperatorPolynomial};
use crate::linalg::QMatrix;
use crate::rational::{self, half, Rational};
use crate::{Error, Result};

/// Principal symbol of a homogeneous operator matrix `E₀ʰ → E₀ʰ⁺¹`.
///
/// Order 1: `P_{I,k} = Σᵢ F[I,k,i] Wᵢ`. Order 2: `P_{I,k} = Σ_{i,j} Fsym[I,k,i,j] WᵢWⱼ + Tcoeff[I,k] T`
/// with `Fsym` symmetric in `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symbol {
    Order1(Symbol1),
    Order2(Symbol2),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol1 {
    pub n: usize,
    pub degree: usize,
    pub rows: usize,
    pub cols: usize,
    /// Flat `[I][k][i]`.
    pub f: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol2 {
    pub n: usize,
    pub degree: usize,
    pub rows: usize,
    pub cols: usize,
    /// Flat `[I][k][i][j]`.
    pub fsym: Vec<Rational>,
    /// Flat `[I][k]`.
    pub tcoeff: Vec<Rational>,
}

impl Symbol1 {
    pub fn get(&self, big_i: usize, k: usize, i: usize) -> &Rational {
        &self.f[(big_i * self.cols + k) * 2 * self.n + i]
    }
}

impl Symbol2 {
    fn idx(&self, big_i: usize, k: usize, i: usize, j: usize) -> usize {
        let m = 2 * self.n;
        ((big_i * self.cols + k) * m + i) * m + j
    }

    pub fn get(&self, big_i: usize, k: usize, i: usize, j: usize) -> &Rational {
        &self.fsym[self.idx(big_i, k, i, j)]
    }

    pub fn t(&self, big_i: usize, k: usize) -> &Rational {
        &self.tcoeff[big_i * self.cols + k]
    }

    /// The `T` coefficient written as a skew horizontal tensor `K` with
    /// `Σ K_{ij} WᵢWⱼ = c T`: `K_{m,m+n} = c/n = −K_{m+n,m}`.
    pub fn skew_part(&self, big_i: usize, k: usize) -> Vec<Rational> {
        let n = self.n;
        let m = 2 * n;
        let c = self.t(big_i, k) / Rational::from_integer(n.into());
        let mut out = vec![Rational::zero(); m * m];
        for a in 0..n {
            out[a * m + a + n] = c.clone();
            out[(a + n) * m + a] = -c.clone();
        }
        out
    }

    /// Rebuilds the operator entry from the symmetric tensor and `T` part.
    pub fn recombine(&self, big_i: usize, k: usize) -> OperatorPolynomial {
        let n = self.n;
        let mut p = OperatorPolynomial::generator(n, Generator::t(n)).scale(self.t(big_i, k));
        for i in 0..2 * n {
            for j in 0..2 * n {
                let c = self.get(big_i, k, i, j);
                if !c.is_zero() {
                    p.add_assign(&pbw_normalize(n, &[Generator(i), Generator(j)], c.clone()));
                }
            }
        }
        p
    }
}

impl Symbol {
    pub fn order(&self) -> u32 {
        match self {
            Symbol::Order1(_) => 1,
            Symbol::Order2(_) => 2,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Symbol::Order1(s) => s.n,
            Symbol::Order2(s) => s.n,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Symbol::Order1(s) => s.degree,
            Symbol::Order2(s) => s.degree,
        }
    }

    /// `(N_{h+1}, N_h)`.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Symbol::Order1(s) => (s.rows, s.cols),
            Symbol::Order2(s) => (s.rows, s.cols),
        }
    }

    /// Number of horizontal slots per row index: `2n` or `(2n)²`.
    pub fn slots(&self) -> usize {
        let m = 2 * self.n();
        match self {
            Symbol::Order1(_) => m,
            Symbol::Order2(_) => m * m,
        }
    }

    /// The symbol as a linear map `ℚ^{N_h} → ℚ^{N_{h+1}·slots}`, row `(I, a)`
    /// at `I·slots + a`. For order 2 only the symmetric part enters.
    pub fn flattened(&self) -> QMatrix {
        let (rows, cols) = self.shape();
        let s = self.slots();
        match self {
            Symbol::Order1(sym) => {
                QMatrix::from_fn(rows * s, cols, |r, k| sym.get(r / s, k, r % s).clone())
            }
            Symbol::Order2(sym) => QMatrix::from_fn(rows * s, cols, |r, k| {
                sym.fsym[(r / s * cols + k) * s + r % s].clone()
            }),
        }
    }

    /// Full horizontal tensor `F[I,k,a]` used to build divergence-free fields:
    /// order 1 as is, order 2 as symmetric part plus the skew form of `T`.
    pub fn field_tensor(&self) -> QMatrix {
        match self {
            Symbol::Order1(_) => self.flattened(),
            Symbol::Order2(sym) => {
                let s = self.slots();
                let mut f = self.flattened();
                for big_i in 0..sym.rows {
                    for k in 0..sym.cols {
                        for (a, v) in sym.skew_part(big_i, k).into_iter().enumerate() {
                            f.add_at(big_i * s + a, k, &v);
                        }
                    }
                }
                f
            }
        }
    }

    pub fn to_json(&self) -> SymbolJson {
        let (rows, cols) = self.shape();
        let parts = |v: &[Rational]| v.iter().map(rational::to_parts).collect();
        match self {
            Symbol::Order1(s) => SymbolJson {
                n: s.n,
                degree: s.degree,
                order: 1,
                shape: vec![rows, cols, 2 * s.n],
                entries: parts(&s.f),
                t_coefficients: None,
            },
            Symbol::Order2(s) => SymbolJson {
                n: s.n,
                degree: s.degree,
                order: 2,
                shape: vec![rows, cols, 2 * s.n, 2 * s.n],
                entries: parts(&s.fsym),
                t_coefficients: Some(parts(&s.tcoeff)),
            },
        }
    }

    pub fn from_json(j: &SymbolJson) -> Result<Self> {
        let parse = |v: &[(String, String)]| {
            v.iter()
                .map(|(a, b)| rational::from_parts(a, b))
                .collect::<Result<Vec<_>>>()
        };
        let expected: usize = j.shape.iter().product();
        if j.entries.len() != expected || j.shape.len() < 3 {
            return Err(Error::DimensionMismatch {
                expected,
                found: j.entries.len(),
            });
        }
        let (rows, cols) = (j.shape[0], j.shape[1]);
        match (j.order, &j.t_coefficients) {
            (1, None) => Ok(Symbol::Order1(Symbol1 {
                n: j.n,
                degree: j.degree,
                rows,
                cols,
                f: parse(&j.entries)?,
            })),
            (2, Some(t)) => Ok(Symbol::Order2(Symbol2 {
                n: j.n,
                degree: j.degree,
                rows,
                cols,
                fsym: parse(&j.entries)?,
                tcoeff: parse(t)?,
            })),
            _ => Err(Error::Invalid(format!(
                "unsupported symbol order {}",
                j.order
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolJson {
    pub n: usize,
    pub degree: usize,
    pub order: u32,
    pub shape: Vec<usize>,
    pub entries: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_coefficients: Option<Vec<(String, String)>>,
}

/// Reads off `σ(d_c)` (order 1) or the symmetric/`T` split (order 2).
pub fn extract_symbol(m: &OperatorMatrix) -> Result<Symbol> {
    let n = m.n();
    let (rows, cols) = (m.rows(), m.cols());
    let dim = 2 * n;
    let order = match m.homogeneity() {
        Homogeneity::Zero | Homogeneity::Degree(1) => 1,
        Homogeneity::Degree(2) => 2,
        Homogeneity::Degree(d) => {
            return Err(Error::Invalid(format!(
                "symbols of order {d} are not supported"
            )))
        }
        Homogeneity::Inhomogeneous => {
            let (row, col) = m.find_inhomogeneous(1).unwrap_or((0, 0));
            return Err(Error::Inhomogeneous { row, col });
        }
    };
    if order == 1 {
        let mut f = vec![Rational::zero(); rows * cols * dim];
        for r in 0..rows {
            for c in 0..cols {
                for (mono, coef) in m.get(r, c).terms() {
                    let i = mono
                        .0
                        .iter()
                        .position(|&e| e == 1)
                        .expect("degree-1 monomial");
                    f[(r * cols + c) * dim + i] = coef.clone();
                }
            }
        }
        return Ok(Symbol::Order1(Symbol1 {
            n,
            degree: m.source_degree(),
            rows,
            cols,
            f,
        }));
    }
    let mut fsym = vec![Rational::zero(); rows * cols * dim * dim];
    let mut tcoeff = vec![Rational::zero(); rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let base = (r * cols + c) * dim * dim;
            for (mono, coef) in m.get(r, c).terms() {
                let gens = mono.word();
                match gens.as_slice() {
                    [g] if g.is_t(n) => tcoeff[r * cols + c] += coef,
                    [a, b] if a == b => fsym[base + a.0 * dim + a.0] += coef,
                    [a, b] => {
                        // WₐW_b = ½(WₐW_b + W_bWₐ) + ½[Wₐ, W_b], and [Xⱼ, Yⱼ] = T.
                        let h = coef * half();
                        fsym[base + a.0 * dim + b.0] += &h;
                        fsym[base + b.0 * dim + a.0] += &h;
                        if b.0 == a.0 + n {
                            tcoeff[r * cols + c] += h;
                        }
                    }
                    _ => unreachable!("homogeneous degree-2 monomial"),
                }
            }
        }
    }
    Ok(Symbol::Order2(Symbol2 {
        n,
        degree: m.source_degree(),
        rows,
        cols,
        fsym,
        tcoeff,
    }))
}

/// Exact rank of the flattened symbol and whether it is injective.
pub fn check_injective(s: &Symbol) -> (usize, bool) {
    let rank = s.flattened().rank();
    (rank, rank == s.shape().1)
}

/// Left inverse `B` with `B·σ = id` on `E₀ʰ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftInverse {
    pub n: usize,
    pub degree: usize,
    pub order: u32,
    pub slots: usize,
    /// `N_h × (N_{h+1}·slots)`; entry `[J][I·slots + a]` is `b_{a,I}^J`.
    pub b: QMatrix,
}

impl LeftInverse {
    pub fn to_json(&self) -> LeftInverseJson {
        LeftInverseJson {
            n: self.n,
            degree: self.degree,
            order: self.order,
            slots: self.slots,
            rows: self.b.rows(),
            cols: self.b.cols(),
            entries: (0..self.b.rows())
                .flat_map(|r| {
                    self.b
                        .row(r)
                        .iter()
                        .map(rational::to_parts)
                        .collect::<Vec<_>>()
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftInverseJson {
    pub n: usize,
    pub degree: usize,
    pub order: u32,
    pub slots: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(String, String)>,
}

/// Moore–Penrose left inverse with respect to the orthonormal frames
/// underlying the Gram-weighted bases: `B = (Fᵀ W F)⁻¹ Fᵀ W` with
/// `W = diag(g'_I)` on each row block.
pub fn left_inverse(s: &Symbol, target: &E0Basis) -> Result<LeftInverse> {
    let f = s.flattened();
    let (rank, injective) = check_injective(s);
    if !injective {
        return Err(Error::NotInjective {
            rank,
            cols: f.cols(),
        });
    }
    let slots = s.slots();
    let weights: Vec<Rational> = (0..f.rows())
        .map(|r| target.gram()[r / slots].clone())
        .collect();
    let ftw = QMatrix::from_fn(f.cols(), f.rows(), |k, r| f.get(r, k) * &weights[r]);
    let normal = ftw.mul(&f).inverse().ok_or(Error::NotInjective {
        rank,
        cols: f.cols(),
    })?;
    let b = normal.mul(&ftw);
    debug_assert_eq!(b.mul(&f), QMatrix::identity(f.cols()));
    Ok(LeftInverse {
        n: s.n(),
        degree: s.degree(),
        order: s.order(),
        slots,
        b,
    })
}

/// `B·σ = id`.
pub fn is_left_inverse(b: &LeftInverse, s: &Symbol) -> bool {
    b.b.mul(&s.flattened()) == QMatrix::identity(s.shape().1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RuminComplex;
    use crate::rational::rat;
    use num_traits::One;

    #[test]
    fn gradient_symbol() {
        for n in 1..=3 {
            let c = RuminComplex::new(n).unwrap();
            let s = extract_symbol(c.dc(0)).unwrap();
            let Symbol::Order1(s1) = &s else {
                panic!("order 1 expected")
            };
            for big_i in 0..2 * n {
                for i in 0..2 * n {
                    let expected = if big_i == i {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    assert_eq!(s1.get(big_i, 0, i), &expected);
                }
            }
            assert_eq!(check_injective(&s), (1, true));
            let b = left_inverse(&s, c.basis(1)).unwrap();
            for col in 0..b.b.cols() {
                let (big_i, i) = (col / (2 * n), col % (2 * n));
                let expected = if big_i == i {
                    rat(1, 2 * n as i64)
                } else {
                    Rational::zero()
                };
                assert_eq!(b.b.get(0, col), &expected);
            }
        }
    }

    #[test]
    fn zero_matrix_gives_zero_tensor() {
        let m = OperatorMatrix::zeros(1, 2, 2, 1, 2);
        let s = extract_symbol(&m).unwrap();
        assert!(s.flattened().is_zero());
        assert_eq!(check_injective(&s), (0, false));
    }

    #[test]
    fn inhomogeneous_rejected() {
        let mut m = OperatorMatrix::zeros(1, 1, 1, 0, 1);
        m.set(
            0,
            0,
            OperatorPolynomial::generator(1, Generator(0))
                .add(&OperatorPolynomial::generator(1, Generator(2))),
        );
        assert!(matches!(
            extract_symbol(&m),
            Err(Error::Inhomogeneous { .. })
        ));
    }

    #[test]
    fn order_two_split_round_trips() {
        for n in 1..=3 {
            let c = RuminComplex::new(n).unwrap();
            let s = extract_symbol(c.dc(n)).unwrap();
            let Symbol::Order2(s2) = &s else {
                panic!("order 2 expected")
            };
            for big_i in 0..s2.rows {
                for k in 0..s2.cols {
                    for i in 0..2 * n {
                        for j in 0..2 * n {
                            assert_eq!(s2.get(big_i, k, i, j), s2.get(big_i, k, j, i));
                        }
                    }
                    assert_eq!(&s2.recombine(big_i, k), c.dc(n).get(big_i, k));
                    // The skew tensor reproduces the T part exactly.
                    let skew = s2.skew_part(big_i, k);
                    let mut p = OperatorPolynomial::zero(n);
                    for (a, v) in skew.iter().enumerate() {
                        p.add_assign(&pbw_normalize(
                            n,
                            &[Generator(a / (2 * n)), Generator(a % (2 * n))],
                            v.clone(),
                        ));
                    }
                    assert_eq!(
                        p,
                        OperatorPolynomial::generator(n, Generator::t(n)).scale(s2.t(big_i, k))
                    );
                }
            }
        }
    }

    #[test]
    fn injective_with_exact_left_inverse() {
        for n in 1..=3 {
            let c = RuminComplex::new(n).unwrap();
            for h in 0..=2 * n {
                let s = extract_symbol(c.dc(h)).unwrap();
                let (rank, inj) = check_injective(&s);
                assert!(inj, "n={n} h={h} rank={rank}");
                let b = left_inverse(&s, c.basis(h + 1)).unwrap();
                assert!(is_left_inverse(&b, &s));
            }
        }
        let c2 = RuminComplex::new(2).unwrap();
        assert_eq!(
            check_injective(&extract_symbol(c2.dc(1)).unwrap()),
            (4, true)
        );
        let c3 = RuminComplex::new(3).unwrap();
        assert_eq!(
            check_injective(&extract_symbol(c3.dc(3)).unwrap()),
            (14, true)
        );
    }

    #[test]
    fn json_round_trip() {
        let c = RuminComplex::new(1).unwrap();
        for h in 0..=2 {
            let s = extract_symbol(c.dc(h)).unwrap();
            let text = serde_json::to_string(&s.to_json()).unwrap();
            assert_eq!(
                Symbol::from_json(&serde_json::from_str(&text).unwrap()).unwrap(),
                s
            );
        }
    }
}
