use serde::{Deserialize, Serialize};

use crate::lie_algebra::{Homogeneity, OperatorPolynomial, PbwMonomial};
use crate::linalg::QMatrix;
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Dense matrix of left-invariant operators mapping coefficient vectors in
/// degree `source` to degree `target`: `(Mu)_r = Σ_c M[r][c] u_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    source: usize,
    target: usize,
    entries: Vec<OperatorPolynomial>,
}

impl OperatorMatrix {
    pub fn zeros(n: usize, rows: usize, cols: usize, source: usize, target: usize) -> Self {
        Self {
            n,
            rows,
            cols,
            source,
            target,
            entries: vec![OperatorPolynomial::zero(n); rows * cols],
        }
    }

    /// Constant-coefficient operator matrix.
    pub fn from_constant(n: usize, m: &QMatrix, source: usize, target: usize) -> Self {
        let mut out = Self::zeros(n, m.rows(), m.cols(), source, target);
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.entries[r * m.cols() + c] =
                    OperatorPolynomial::constant(n, m.get(r, c).clone());
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn source_degree(&self) -> usize {
        self.source
    }

    pub fn target_degree(&self) -> usize {
        self.target
    }

    pub fn get(&self, r: usize, c: usize) -> &OperatorPolynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: OperatorPolynomial) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn entries(&self) -> impl Iterator<Item = &OperatorPolynomial> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(OperatorPolynomial::is_zero)
    }

    /// `self ∘ other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.n, self.rows, other.cols, other.source, self.target);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = OperatorPolynomial::zero(self.n);
                for k in 0..self.cols {
                    let (a, b) = (self.get(r, k), other.get(k, c));
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_assign(&a.mul(b));
                    }
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// `m · self` for a constant matrix `m`.
    pub fn left_constant(&self, m: &QMatrix, target: usize) -> Self {
        assert_eq!(m.cols(), self.rows);
        let mut out = Self::zeros(self.n, m.rows(), self.cols, self.source, target);
        for r in 0..m.rows() {
            for c in 0..self.cols {
                let mut acc = OperatorPolynomial::zero(self.n);
                for k in 0..self.rows {
                    let s = m.get(r, k);
                    if !num_traits::Zero::is_zero(s) {
                        acc.add_assign(&self.get(k, c).scale(s));
                    }
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// `self · m` for a constant matrix `m`.
    pub fn right_constant(&self, m: &QMatrix, source: usize) -> Self {
        assert_eq!(m.rows(), self.cols);
        let mut out = Self::zeros(self.n, self.rows, m.cols(), source, self.target);
        for r in 0..self.rows {
            for c in 0..m.cols() {
                let mut acc = OperatorPolynomial::zero(self.n);
                for k in 0..self.cols {
                    let s = m.get(k, c);
                    if !num_traits::Zero::is_zero(s) {
                        acc.add_assign(&self.get(r, k).scale(s));
                    }
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(&OperatorPolynomial, &OperatorPolynomial) -> OperatorPolynomial,
    ) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let mut out = self.clone();
        out.entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = self.clone();
        out.entries = self.entries.iter().map(|e| e.scale(s)).collect();
        out
    }

    /// Matrix of constant terms.
    pub fn constant_part(&self) -> QMatrix {
        QMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).constant_term())
    }

    /// Transpose with every entry replaced by its formal adjoint.
    pub fn formal_adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n, self.cols, self.rows, self.target, self.source);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).formal_adjoint());
            }
        }
        out
    }

    /// Common homogeneity degree of all nonzero entries; `Zero` for the
    /// zero matrix.
    pub fn homogeneity(&self) -> Homogeneity {
        let mut found = Homogeneity::Zero;
        for e in &self.entries {
            match (found, e.homogeneity()) {
                (_, Homogeneity::Zero) => {}
                (_, Homogeneity::Inhomogeneous) => return Homogeneity::Inhomogeneous,
                (Homogeneity::Zero, d) => found = d,
                (Homogeneity::Degree(a), Homogeneity::Degree(b)) if a != b => {
                    return Homogeneity::Inhomogeneous
                }
                _ => {}
            }
        }
        found
    }

    /// First entry that is not homogeneous of degree `d`.
    pub fn find_inhomogeneous(&self, d: u32) -> Option<(usize, usize)> {
        (0..self.rows * self.cols)
            .find(|&i| {
                !matches!(self.entries[i].homogeneity(), Homogeneity::Zero)
                    && self.entries[i].homogeneity() != Homogeneity::Degree(d)
            })
            .map(|i| (i / self.cols, i % self.cols))
    }

    pub fn to_json(&self) -> OperatorMatrixJson {
        OperatorMatrixJson {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            source_degree: self.source,
            target_degree: self.target,
            entries: (0..self.rows)
                .map(|r| {
                    (0..self.cols)
                        .map(|c| {
                            self.get(r, c)
                                .terms()
                                .map(|(m, q)| {
                                    let (num, den) = rational::to_parts(q);
                                    (m.0.clone(), num, den)
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(j: &OperatorMatrixJson) -> Result<Self> {
        let mut out = Self::zeros(j.n, j.rows, j.cols, j.source_degree, j.target_degree);
        if j.entries.len() != j.rows {
            return Err(Error::DimensionMismatch {
                expected: j.rows,
                found: j.entries.len(),
            });
        }
        for (r, row) in j.entries.iter().enumerate() {
            if row.len() != j.cols {
                return Err(Error::DimensionMismatch {
                    expected: j.cols,
                    found: row.len(),
                });
            }
            for (c, terms) in row.iter().enumerate() {
                let mut p = OperatorPolynomial::zero(j.n);
                for (exps, num, den) in terms {
                    if exps.len() != 2 * j.n + 1 {
                        return Err(Error::DimensionMismatch {
                            expected: 2 * j.n + 1,
                            found: exps.len(),
                        });
                    }
                    p.add_term(PbwMonomial(exps.clone()), rational::from_parts(num, den)?);
                }
                out.set(r, c, p);
            }
        }
        Ok(out)
    }

    /// `array` environment with one polynomial per cell.
    pub fn to_latex(&self) -> String {
        let mut s = format!(
            "\\left(\\begin{{array}}{{{}}}\n",
            "c".repeat(self.cols.max(1))
        );
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_latex()).collect();
            s.push_str("  ");
            s.push_str(&row.join(" & "));
            s.push_str(if r + 1 < self.rows { " \\\\\n" } else { "\n" });
        }
        s.push_str("\\end{array}\\right)");
        s
    }
}

/// One serialized term: `(exponents, numerator, denominator)`.
pub type TermJson = (Vec<u32>, String, String);

/// Row-major entries; each entry is a list of terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorMatrixJson {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub source_degree: usize,
    pub target_degree: usize,
    pub entries: Vec<Vec<Vec<TermJson>>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_algebra::Generator;
    use crate::rational::int;

    fn gen(n: usize, i: usize) -> OperatorPolynomial {
        OperatorPolynomial::generator(n, Generator(i))
    }

    #[test]
    fn product_keeps_operator_order() {
        let n = 1;
        let mut a = OperatorMatrix::zeros(n, 1, 1, 0, 0);
        a.set(0, 0, gen(n, 1));
        let mut b = OperatorMatrix::zeros(n, 1, 1, 0, 0);
        b.set(0, 0, gen(n, 0));
        let yx = a.mul(&b).unwrap();
        let expected = gen(n, 0).mul(&gen(n, 1)).sub(&gen(n, 2));
        assert_eq!(yx.get(0, 0), &expected);
    }

    #[test]
    fn constant_products() {
        let n = 1;
        let mut a = OperatorMatrix::zeros(n, 2, 1, 0, 1);
        a.set(0, 0, gen(n, 0));
        a.set(1, 0, gen(n, 1));
        let m = QMatrix::from_fn(1, 2, |_, c| int(c as i64 + 1));
        let left = a.left_constant(&m, 2);
        assert_eq!(left.get(0, 0), &gen(n, 0).add(&gen(n, 1).scale(&int(2))));
        let as_matrix = OperatorMatrix::from_constant(n, &m, 1, 2);
        assert_eq!(as_matrix.mul(&a).unwrap(), left);
        assert_eq!(a.constant_part(), QMatrix::zeros(2, 1));
    }

    #[test]
    fn adjoint_and_json() {
        let n = 1;
        let mut a = OperatorMatrix::zeros(n, 2, 1, 0, 1);
        a.set(0, 0, gen(n, 0).mul(&gen(n, 1)));
        a.set(1, 0, gen(n, 2).scale(&crate::rational::rat(-3, 4)));
        let adj = a.formal_adjoint();
        assert_eq!((adj.rows(), adj.cols()), (1, 2));
        assert_eq!(adj.formal_adjoint(), a);
        let j = serde_json::to_string(&a.to_json()).unwrap();
        let back = OperatorMatrix::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.homogeneity(), Homogeneity::Degree(2));
        assert!(a.to_latex().contains("X_{1} Y_{1}"));
    }
}
