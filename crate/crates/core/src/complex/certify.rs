use serde::{Deserialize, Serialize};

use super::assemble::{dc_order, delta_order, gram_adjoint, laplacian_order, RuminComplex};
use super::basis::{constructions_agree, e0_dimension, is_orthogonal};
use super::matrix::OperatorMatrix;
use crate::lie_algebra::Homogeneity;
use crate::linalg::QMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub n: usize,
    pub degree: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub checks: Vec<Check>,
}

impl CertificationReport {
    pub fn push(
        &mut self,
        name: &str,
        n: usize,
        degree: Option<usize>,
        passed: bool,
        detail: impl Into<String>,
    ) {
        self.checks.push(Check {
            name: name.into(),
            n,
            degree,
            passed,
            detail: detail.into(),
        });
    }

    pub fn extend(&mut self, other: CertificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn homogeneity_detail(m: &OperatorMatrix, expected: u32) -> (bool, String) {
    match m.homogeneity() {
        Homogeneity::Degree(d) if d == expected => (true, format!("degree {d}")),
        Homogeneity::Zero => (m.rows() * m.cols() == 0, "zero matrix".into()),
        Homogeneity::Degree(d) => (false, format!("degree {d}, expected {expected}")),
        Homogeneity::Inhomogeneous => {
            let at = m.find_inhomogeneous(expected);
            (false, format!("inhomogeneous entry at {at:?}"))
        }
    }
}

fn zero_detail(m: &crate::Result<OperatorMatrix>) -> (bool, String) {
    match m {
        Ok(m) if m.is_zero() => (true, "zero".into()),
        Ok(m) => {
            let nz = m.entries().filter(|e| !e.is_zero()).count();
            (false, format!("{nz} nonzero entries"))
        }
        Err(e) => (false, e.to_string()),
    }
}

/// Runs the algebraic contract on an assembled complex. Laplacian checks
/// are included when `with_laplacian` is set.
pub fn certify(c: &RuminComplex, with_laplacian: bool) -> CertificationReport {
    let n = c.n();
    let top = c.top();
    let mut r = CertificationReport::default();

    let dims = c.dims();
    let expected: Vec<usize> = (0..=top).map(|h| e0_dimension(n, h)).collect();
    let symmetric = (0..=top).all(|h| dims[h] == dims[top - h]);
    r.push(
        "e0_dimensions",
        n,
        None,
        dims == expected && symmetric,
        format!("{dims:?}"),
    );

    for h in 0..=top {
        let agree = constructions_agree(n, h).unwrap_or(false);
        r.push(
            "e0_kernel_construction",
            n,
            Some(h),
            agree,
            if agree { "same span" } else { "spans differ" },
        );
        let orth = is_orthogonal(c.basis(h));
        r.push(
            "e0_orthogonal",
            n,
            Some(h),
            orth,
            format!(
                "gram {:?}",
                c.basis(h)
                    .gram()
                    .iter()
                    .map(crate::rational::fmt)
                    .collect::<Vec<_>>()
            ),
        );
    }

    for h in 0..top {
        let (ok, detail) = homogeneity_detail(c.dc(h), dc_order(n, h));
        r.push("dc_homogeneity", n, Some(h), ok, detail);
    }
    for h in 0..top.saturating_sub(1) {
        let (ok, detail) = zero_detail(&c.dc(h + 1).mul(c.dc(h)));
        r.push("dc_squared_zero", n, Some(h), ok, detail);
    }

    for h in 0..=top {
        let round = c.star(top - h).mul(c.star(h));
        let ok = round == QMatrix::identity(c.basis(h).dim());
        r.push(
            "star_maps_e0",
            n,
            Some(h),
            ok,
            if ok {
                "∗∗ = id on E0"
            } else {
                "∗∗ ≠ id"
            },
        );
    }

    for h in 1..=top {
        let stored = c.delta_c(h);
        let (ok, detail) = match c.conjugated_delta(h) {
            Ok(m) if &m == stored => (true, "entrywise equal".to_string()),
            Ok(_) => (false, "differs from sign·∗d_c∗".to_string()),
            Err(e) => (false, e.to_string()),
        };
        r.push("delta_star_conjugate", n, Some(h), ok, detail);
        let adj = gram_adjoint(c.basis(h - 1), c.basis(h), c.dc(h - 1));
        let ok = &adj == stored;
        r.push(
            "delta_formal_adjoint",
            n,
            Some(h),
            ok,
            if ok {
                "equal"
            } else {
                "differs from formal adjoint"
            },
        );
        let (ok, detail) = homogeneity_detail(stored, delta_order(n, h));
        r.push("delta_homogeneity", n, Some(h), ok, detail);
    }
    for h in 2..=top {
        let (ok, detail) = zero_detail(&c.delta_c(h - 1).mul(c.delta_c(h)));
        r.push("delta_squared_zero", n, Some(h), ok, detail);
    }

    if with_laplacian {
        let laps: Vec<_> = (0..=top).map(|h| c.laplacian(h)).collect();
        for (h, lap) in laps.iter().enumerate() {
            let (ok, detail) = match lap {
                Ok(m) => homogeneity_detail(m, laplacian_order(n, h)),
                Err(e) => (false, e.to_string()),
            };
            r.push("laplacian_homogeneity", n, Some(h), ok, detail);
        }
        let side = |k: usize| k == n || k == n + 1;
        for h in 0..top {
            if side(h) || side(h + 1) {
                continue;
            }
            let (ok, detail) = match (&laps[h], &laps[h + 1]) {
                (Ok(a), Ok(b)) => {
                    let eq = c.dc(h).mul(a).ok() == b.mul(c.dc(h)).ok();
                    (
                        eq,
                        if eq {
                            "d_c Δ = Δ d_c"
                        } else {
                            "commutator nonzero"
                        }
                        .to_string(),
                    )
                }
                _ => (false, "laplacian unavailable".to_string()),
            };
            r.push("laplacian_commutes", n, Some(h), ok, detail);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_algebra::{Generator, OperatorPolynomial};

    #[test]
    fn clean_complex_passes() {
        for n in 1..=2 {
            let c = RuminComplex::new(n).unwrap();
            let report = certify(&c, true);
            let failures: Vec<_> = report.failures().collect();
            assert!(failures.is_empty(), "{failures:#?}");
        }
    }

    #[test]
    fn corrupted_dc_is_caught() {
        let mut c = RuminComplex::new(1).unwrap();
        let mut bad = c.dc(0).clone();
        bad.set(0, 0, OperatorPolynomial::generator(1, Generator(1)));
        c.replace_dc(0, bad).unwrap();
        let report = certify(&c, false);
        let names: Vec<_> = report.failures().map(|f| f.name.as_str()).collect();
        assert!(names.contains(&"dc_squared_zero"));
        assert!(names.contains(&"delta_formal_adjoint"));
    }
}
