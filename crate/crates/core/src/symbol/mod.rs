//! Principal symbols of `d_c`, their left inverses, symplectic equivariance
//! and the decomposition of closed forms into divergence-free fields.

mod form;
mod pierre;
mod symplectic;
mod tensor;

pub use form::{poly_from_json, poly_to_json, PolyForm, PolyFormJson, PolyJson};
pub use pierre::{
    field_constant_squared, pierre_decompose, DecompositionJson, DecompositionResult,
};
pub use symplectic::{
    commutes_with_lefschetz, equivariance_check, is_symplectic, random_horizontal,
    random_symplectic, standard_j, EquivarianceReport, SymplecticJson, SymplecticMap,
};
pub use tensor::{
    check_injective, extract_symbol, is_left_inverse, left_inverse, LeftInverse, LeftInverseJson,
    Symbol, Symbol1, Symbol2, SymbolJson,
};

use crate::complex::{CertificationReport, RuminComplex};

/// Symbol and equivariance checks for every degree of an assembled complex.
pub fn certify_symbols(c: &RuminComplex, maps: usize, seed: u64) -> CertificationReport {
    let n = c.n();
    let mut r = CertificationReport::default();
    for h in 0..c.top() {
        match extract_symbol(c.dc(h)) {
            Ok(s) => {
                let (rank, injective) = check_injective(&s);
                r.push(
                    "symbol_injective",
                    n,
                    Some(h),
                    injective,
                    format!("rank {rank} of {}", s.shape().1),
                );
                let ok = left_inverse(&s, c.basis(h + 1))
                    .map(|b| is_left_inverse(&b, &s))
                    .unwrap_or(false);
                r.push(
                    "symbol_left_inverse",
                    n,
                    Some(h),
                    ok,
                    if ok {
                        "B·σ = id"
                    } else {
                        "no exact left inverse"
                    },
                );
            }
            Err(e) => r.push("symbol_injective", n, Some(h), false, e.to_string()),
        }
        let mut worst = String::from("0");
        let mut ok = true;
        for m in 0..maps {
            let map = random_symplectic(n, seed.wrapping_add(m as u64));
            match equivariance_check(
                &map,
                c.basis(h),
                c.basis(h + 1),
                c.dc(h),
                1,
                seed ^ ((m as u64) << 8),
            ) {
                Ok(rep) if rep.passed => {}
                Ok(rep) => {
                    ok = false;
                    worst = rep.max_residual;
                }
                Err(e) => {
                    ok = false;
                    worst = e.to_string();
                }
            }
        }
        r.push(
            "equivariance",
            n,
            Some(h),
            ok,
            format!("{maps} maps, max residual {worst}"),
        );
    }
    r
}
