use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lie_algebra::CoordPolynomial;
use crate::rational::{int, rat, to_f64};
use crate::symbol::{poly_from_json, poly_to_json, PolyJson};
use crate::{Error, Result};

/// Polynomial with `f64` coefficients, for fast nodal evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    pub fn from_exact(p: &CoordPolynomial) -> Self {
        Self {
            terms: p.terms().map(|(e, c)| (e.clone(), to_f64(c))).collect(),
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(z).fold(
                    *c,
                    |m, (&k, v)| if k == 0 { m } else { m * v.powi(k as i32) },
                )
            })
            .sum()
    }
}

/// `(1 − r²)⁴` on `r < 1`, zero outside.
pub fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        let s = 1.0 - r2;
        let s2 = s * s;
        s2 * s2
    } else {
        0.0
    }
}

/// `(1 − r²)⁴` as an exact polynomial (equal to the bump inside the unit ball).
pub fn bump_polynomial(n: usize) -> CoordPolynomial {
    let r2 = (0..=2 * n).fold(CoordPolynomial::zero(n), |acc, v| {
        acc.add(&CoordPolynomial::var(n, v).pow(2))
    });
    CoordPolynomial::constant(n, int(1)).sub(&r2).pow(4)
}

/// Section of `E₀ʰ` with coefficients `p_k(δ_λ z)·bump(δ_λ z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestForm {
    n: usize,
    degree: usize,
    prefactors: Vec<CoordPolynomial>,
    fast: Vec<FloatPoly>,
    lambda: f64,
}

impl TestForm {
    pub fn new(n: usize, degree: usize, prefactors: Vec<CoordPolynomial>) -> Self {
        let fast = prefactors.iter().map(FloatPoly::from_exact).collect();
        Self {
            n,
            degree,
            prefactors,
            fast,
            lambda: 1.0,
        }
    }

    /// The bump itself in every component.
    pub fn bump(n: usize, degree: usize, dim: usize) -> Self {
        Self::new(n, degree, vec![CoordPolynomial::constant(n, int(1)); dim])
    }

    /// Component `k` gets the prefactor `1 + ½ z_{k mod (2n+1)}`, so that no
    /// two components coincide.
    pub fn standard(n: usize, degree: usize, dim: usize) -> Self {
        let p = (0..dim)
            .map(|k| {
                CoordPolynomial::constant(n, int(1))
                    .add(&CoordPolynomial::var(n, k % (2 * n + 1)).scale(&rat(1, 2)))
            })
            .collect();
        Self::new(n, degree, p)
    }

    /// Random prefactors of degree ≤ 2 with small rational coefficients.
    pub fn random(n: usize, degree: usize, dim: usize, rng: &mut impl Rng) -> Self {
        let nv = 2 * n + 1;
        let p = (0..dim)
            .map(|_| {
                let mut p = CoordPolynomial::zero(n);
                for _ in 0..4 {
                    let mut e = vec![0u32; nv];
                    for _ in 0..rng.gen_range(0..=2) {
                        e[rng.gen_range(0..nv)] += 1;
                    }
                    p.add_term(e, rat(rng.gen_range(-4..=4), 2));
                }
                p
            })
            .collect();
        Self::new(n, degree, p)
    }

    pub fn zero(n: usize, degree: usize, dim: usize) -> Self {
        Self::new(n, degree, vec![CoordPolynomial::zero(n); dim])
    }

    /// `u ∘ δ_λ`.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::NonPositiveDilation(lambda.to_string()));
        }
        Ok(Self {
            lambda: self.lambda * lambda,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.prefactors.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn prefactors(&self) -> &[CoordPolynomial] {
        &self.prefactors
    }

    /// Support radii `(1/λ, 1/λ²)` along the horizontal and `t` axes.
    pub fn support(&self) -> (f64, f64) {
        (1.0 / self.lambda, 1.0 / (self.lambda * self.lambda))
    }

    pub fn eval(&self, k: usize, z: &[f64]) -> f64 {
        let l = self.lambda;
        let nv = z.len();
        let mut w = [0.0f64; 16];
        let mut r2 = 0.0;
        for (i, &v) in z.iter().enumerate() {
            w[i] = if i + 1 == nv { l * l * v } else { l * v };
            r2 += w[i] * w[i];
        }
        let b = bump(r2);
        if b == 0.0 {
            return 0.0;
        }
        self.fast[k].eval(&w[..nv]) * b
    }

    /// Exact coefficient `p_k · (1 − r²)⁴`, valid inside the unit ball; only for `λ = 1`.
    pub fn analytic(&self) -> Result<Vec<CoordPolynomial>> {
        if self.lambda != 1.0 {
            return Err(Error::Invalid(
                "analytic coefficients are only kept for λ = 1".into(),
            ));
        }
        let b = bump_polynomial(self.n);
        Ok(self.prefactors.iter().map(|p| p.mul(&b)).collect())
    }

    pub fn to_json(&self) -> TestFormJson {
        TestFormJson {
            n: self.n,
            degree: self.degree,
            lambda: self.lambda,
            prefactors: self.prefactors.iter().map(poly_to_json).collect(),
        }
    }

    pub fn from_json(j: &TestFormJson) -> Result<Self> {
        let p = j
            .prefactors
            .iter()
            .map(|p| poly_from_json(j.n, p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.n, j.degree, p).dilated(j.lambda)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFormJson {
    pub n: usize,
    pub degree: usize,
    #[serde(default = "unit")]
    pub lambda: f64,
    pub prefactors: Vec<PolyJson>,
}

fn unit() -> f64 {
    1.0
}

/// `∫ (1 − r²)⁴` over the unit ball of `ℝ^d`: `π^{d/2} Γ(5) / Γ(d/2 + 5)`.
pub fn bump_integral(d: usize) -> f64 {
    // Γ(d/2 + 5) = Γ(d/2 + 1) Π_{j=1}^{4} (d/2 + j).
    let half = d as f64 / 2.0;
    let ball = std::f64::consts::PI.powf(half) / gamma_half(d + 2);
    let ratio: f64 = (1..=4).map(|j| half + j as f64).product::<f64>() / 24.0;
    ball / ratio
}

/// `Γ(m/2)` for a positive integer `m`.
fn gamma_half(m: usize) -> f64 {
    let mut g = if m.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut k = if m.is_multiple_of(2) { 2 } else { 1 };
    while k < m {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::One;

    #[test]
    fn bump_polynomial_matches_bump() {
        let b = bump_polynomial(1);
        for z in [[0.1, -0.2, 0.3], [0.5, 0.5, -0.5], [0.0, 0.0, 0.0]] {
            let r2: f64 = z.iter().map(|v| v * v).sum();
            assert!((b.eval_f64(&z) - bump(r2)).abs() < 1e-14);
        }
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(4.0), 0.0);
    }

    #[test]
    fn dilation_moves_support() {
        let u = TestForm::bump(1, 0, 1).dilated(2.0).unwrap();
        assert_eq!(u.support(), (0.5, 0.25));
        assert_eq!(
            u.eval(0, &[0.25, 0.0, 0.0]),
            TestForm::bump(1, 0, 1).eval(0, &[0.5, 0.0, 0.0])
        );
        assert_eq!(u.eval(0, &[0.0, 0.0, 0.3]), 0.0);
        assert!(TestForm::bump(1, 0, 1).dilated(0.0).is_err());
    }

    #[test]
    fn standard_form_components_differ() {
        let u = TestForm::standard(1, 1, 2);
        let z = [0.2, 0.1, 0.0];
        assert!((u.eval(0, &z) - 1.1 * bump(0.05)).abs() < 1e-15);
        assert!((u.eval(1, &z) - 1.05 * bump(0.05)).abs() < 1e-15);
        let a = u.analytic().unwrap();
        assert_eq!(a[0].eval(&[Rational::one(), int(0), int(0)]), int(0));
    }

    #[test]
    fn bump_integral_by_radial_quadrature() {
        // ∫ = |S^{d−1}| ∫₀¹ (1 − r²)⁴ r^{d−1} dr, the radial part by composite Simpson.
        for d in [3usize, 5] {
            let m = 2000;
            let f = |r: f64| (1.0 - r * r).powi(4) * r.powi(d as i32 - 1);
            let h = 1.0 / m as f64;
            let s: f64 = (0..=m)
                .map(|i| {
                    let w = if i == 0 || i == m {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    w * f(i as f64 * h)
                })
                .sum::<f64>()
                * h
                / 3.0;
            let sphere = 2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half(d);
            assert!((sphere * s - bump_integral(d)).abs() < 1e-10, "d={d}");
        }
    }

    #[test]
    fn json_round_trip() {
        let u = TestForm::standard(2, 2, 5).dilated(0.5).unwrap();
        assert_eq!(TestForm::from_json(&u.to_json()).unwrap(), u);
    }
}
