use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::form::PolyForm;
use crate::complex::{E0Basis, OperatorMatrix};
use crate::exterior::{Covector, ExteriorBasis};
use crate::linalg::QMatrix;
use crate::rational::{self, int, rat, Rational};
use crate::{Error, Result};

/// `A ∈ Sp(2n, ℚ)` together with its lift `diag(A, 1)` acting on `(x, y, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticMap {
    n: usize,
    a: QMatrix,
    lifted: QMatrix,
}

/// `J = [[0, I], [−I, 0]]`.
pub fn standard_j(n: usize) -> QMatrix {
    QMatrix::from_fn(2 * n, 2 * n, |r, c| {
        if c == r + n {
            Rational::one()
        } else if r == c + n {
            -Rational::one()
        } else {
            Rational::zero()
        }
    })
}

pub fn is_symplectic(a: &QMatrix) -> bool {
    let m = a.rows();
    if m != a.cols() || !m.is_multiple_of(2) {
        return false;
    }
    let j = standard_j(m / 2);
    a.transpose().mul(&j).mul(a) == j
}

impl SymplecticMap {
    pub fn new(a: QMatrix) -> Result<Self> {
        if !is_symplectic(&a) {
            return Err(Error::Invalid("matrix is not symplectic".into()));
        }
        let n = a.rows() / 2;
        let lifted = QMatrix::from_fn(2 * n + 1, 2 * n + 1, |r, c| {
            if r < 2 * n && c < 2 * n {
                a.get(r, c).clone()
            } else if r == c {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        Ok(Self { n, a, lifted })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(QMatrix::identity(2 * n)).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.a
    }

    pub fn lifted(&self) -> &QMatrix {
        &self.lifted
    }

    /// `f_A*` on covectors: `ωᵢ ↦ Σⱼ Aᵢⱼ ωⱼ`, `θ ↦ θ`.
    pub fn pullback_covector(&self, a: &Covector) -> Covector {
        let n = self.n;
        let images: Vec<Covector> = (0..=2 * n)
            .map(|i| {
                let mut v = Covector::zero(n, 1);
                for j in 0..=2 * n {
                    let c = self.lifted.get(i, j);
                    if !c.is_zero() {
                        v = v.add(&Covector::omega(n, j).scale(c));
                    }
                }
                v
            })
            .collect();
        let mut out = Covector::zero(n, a.degree());
        for (m, c) in a.terms() {
            let img = m
                .indices()
                .into_iter()
                .fold(Covector::one(n), |acc, i| acc.wedge(&images[i]));
            out = out.add(&img.scale(c));
        }
        out
    }

    /// Matrix of `f_A*` on `E₀ʰ`; fails if the image leaves the span.
    pub fn pullback_matrix(&self, basis: &E0Basis) -> Result<QMatrix> {
        let cols = basis
            .xi()
            .iter()
            .map(|x| basis.coefficients(&self.pullback_covector(x)))
            .collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::from_columns(basis.dim(), &cols))
    }

    /// `f_A* u = Σ_k (u_k ∘ f_A) f_A*ξ_k` in the `E₀ʰ` basis.
    pub fn pullback_form(&self, basis: &E0Basis, u: &PolyForm) -> Result<PolyForm> {
        let m = self.pullback_matrix(basis)?;
        let composed: Vec<_> = u
            .coeffs()
            .iter()
            .map(|p| p.substitute_linear(&self.lifted))
            .collect();
        let coeffs = (0..basis.dim())
            .map(|r| {
                composed.iter().enumerate().fold(
                    crate::lie_algebra::CoordPolynomial::zero(self.n),
                    |acc, (k, p)| {
                        let c = m.get(r, k);
                        if c.is_zero() {
                            acc
                        } else {
                            acc.add(&p.scale(c))
                        }
                    },
                )
            })
            .collect();
        Ok(PolyForm::new(self.n, u.degree(), coeffs))
    }

    pub fn to_json(&self) -> SymplecticJson {
        SymplecticJson {
            n: self.n,
            a: (0..2 * self.n)
                .map(|r| self.a.row(r).iter().map(rational::fmt).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticJson {
    pub n: usize,
    pub a: Vec<Vec<String>>,
}

const STEPS: [(i64, i64); 6] = [(-2, 1), (-1, 1), (-1, 2), (1, 2), (1, 1), (2, 1)];

fn random_step(n: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    let m = 2 * n;
    let pick = |rng: &mut ChaCha8Rng| {
        let (p, q) = *STEPS.choose(rng).unwrap();
        rat(p, q)
    };
    match rng.gen_range(0..4) {
        0 => standard_j(n),
        kind @ (1 | 2) => {
            // [[I, S], [0, I]] or [[I, 0], [S, I]] with S symmetric.
            let mut s = QMatrix::zeros(n, n);
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let v = pick(rng);
            s.set(i, j, v.clone());
            s.set(j, i, v);
            QMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    Rational::one()
                } else if kind == 1 && r < n && c >= n {
                    s.get(r, c - n).clone()
                } else if kind == 2 && r >= n && c < n {
                    s.get(r - n, c).clone()
                } else {
                    Rational::zero()
                }
            })
        }
        _ => {
            // diag(M, M⁻ᵀ) with M = I + v·E_ij; falls back to a scaling when n = 1.
            let mut mm = QMatrix::identity(n);
            let v = pick(rng);
            if n > 1 {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                mm.set(i, j, v);
            } else {
                mm.set(0, 0, v);
            }
            let inv_t = mm.inverse().unwrap().transpose();
            QMatrix::from_fn(m, m, |r, c| match (r < n, c < n) {
                (true, true) => mm.get(r, c).clone(),
                (false, false) => inv_t.get(r - n, c - n).clone(),
                _ => Rational::zero(),
            })
        }
    }
}

/// Product of 5–20 random elementary symplectic matrices (shears, `J`,
/// block-diagonal `diag(M, M⁻ᵀ)`), deterministic in `seed`.
pub fn random_symplectic(n: usize, seed: u64) -> SymplecticMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = rng.gen_range(5..=20);
    let mut a = QMatrix::identity(2 * n);
    for _ in 0..steps {
        a = a.mul(&random_step(n, &mut rng));
    }
    SymplecticMap::new(a).expect("product of symplectic generators")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub n: usize,
    pub degree: usize,
    pub trials: usize,
    /// Largest absolute coefficient of `d_c(f*α) − f*(d_c α)` over all trials.
    pub max_residual: String,
    pub passed: bool,
}

/// Compares `d_c(f_A* α)` with `f_A*(d_c α)` on random polynomial forms.
pub fn equivariance_check(
    map: &SymplecticMap,
    src: &E0Basis,
    dst: &E0Basis,
    dc: &OperatorMatrix,
    trials: usize,
    seed: u64,
) -> Result<EquivarianceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Rational::zero();
    for _ in 0..trials {
        let alpha = PolyForm::random(src.n(), src.degree(), src.dim(), 3, 4, &mut rng);
        let lhs = map.pullback_form(src, &alpha)?.apply(dc)?;
        let rhs = map.pullback_form(dst, &alpha.apply(dc)?)?;
        for p in lhs.sub(&rhs).coeffs() {
            let m = p.max_abs_coefficient();
            if m > worst {
                worst = m;
            }
        }
    }
    Ok(EquivarianceReport {
        n: src.n(),
        degree: src.degree(),
        trials,
        max_residual: rational::fmt(&worst),
        passed: worst.is_zero(),
    })
}

/// Horizontal covector basis helper: `f_A*` commutes with `L`.
pub fn commutes_with_lefschetz(map: &SymplecticMap, a: &Covector) -> Result<bool> {
    let lhs = map.pullback_covector(&a.lefschetz_l()?);
    let rhs = map.pullback_covector(a).lefschetz_l()?;
    Ok(lhs == rhs)
}

/// Random horizontal covector with small integer coefficients.
pub fn random_horizontal(n: usize, h: usize, rng: &mut impl Rng) -> Covector {
    let basis = ExteriorBasis::horizontal(n, h);
    let v: Vec<Rational> = (0..basis.len())
        .map(|_| int(rng.gen_range(-3..=3)))
        .collect();
    basis.from_vector(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RuminComplex;
    use crate::lie_algebra::CoordPolynomial;

    #[test]
    fn generators_are_symplectic() {
        assert!(is_symplectic(&QMatrix::identity(4)));
        assert!(is_symplectic(&standard_j(2)));
        let a = random_symplectic(2, 42);
        assert!(is_symplectic(a.matrix()));
        assert_eq!(a, random_symplectic(2, 42));
        assert_ne!(a, random_symplectic(2, 43));
        assert!(SymplecticMap::new(QMatrix::identity(4).scale(&int(2))).is_err());
    }

    #[test]
    fn theta_is_fixed() {
        for seed in 0..5 {
            let a = random_symplectic(2, seed);
            assert_eq!(a.pullback_covector(&Covector::theta(2)), Covector::theta(2));
            assert_eq!(
                a.pullback_covector(&Covector::dtheta(2)),
                Covector::dtheta(2)
            );
        }
    }

    #[test]
    fn identity_pullback() {
        let c = RuminComplex::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = PolyForm::random(2, 2, c.basis(2).dim(), 2, 3, &mut rng);
        assert_eq!(
            SymplecticMap::identity(2)
                .pullback_form(c.basis(2), &u)
                .unwrap(),
            u
        );
    }

    #[test]
    fn e0_is_invariant() {
        for n in 1..=3 {
            let c = RuminComplex::new(n).unwrap();
            let a = random_symplectic(n, 11 + n as u64);
            for h in 0..=c.top() {
                assert!(a.pullback_matrix(c.basis(h)).is_ok(), "n={n} h={h}");
            }
        }
    }

    #[test]
    fn lefschetz_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..5 {
            let a = random_symplectic(2, seed);
            for h in 0..=2 {
                assert!(commutes_with_lefschetz(&a, &random_horizontal(2, h, &mut rng)).unwrap());
            }
        }
    }

    #[test]
    fn equivariance_examples() {
        let c = RuminComplex::new(1).unwrap();
        let x1 = PolyForm::new(1, 0, vec![CoordPolynomial::var(1, 0)]);
        let a = random_symplectic(1, 5);
        let lhs = a
            .pullback_form(c.basis(0), &x1)
            .unwrap()
            .apply(c.dc(0))
            .unwrap();
        let rhs = a
            .pullback_form(c.basis(1), &x1.apply(c.dc(0)).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);

        let c2 = RuminComplex::new(2).unwrap();
        let a = random_symplectic(2, 42);
        let r = equivariance_check(&a, c2.basis(2), c2.basis(3), c2.dc(2), 10, 1).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
