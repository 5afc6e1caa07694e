//! Ratios `‖u‖_{Lᵖ} / (right-hand side)` for the Gagliardo–Nirenberg type
//! estimates on `E₀ʰ`, evaluated on grid samples of test forms.

use serde::{Deserialize, Serialize};

use super::field::{check_support, gram_f64, sample_slab};
use super::grid::Grid;
use super::stencil::{apply_matrix_slab, CompiledMatrix, Slab};
use super::testform::TestForm;
use crate::complex::RuminComplex;
use crate::exec::Exec;
use crate::{Error, Result};

/// Warning attached to every Hardy-norm case.
pub const H1_PROXY_WARNING: &str =
    "H1 proxy: the Hardy norm is replaced by the L1 norm, lower bound proxy only";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GnCase {
    I,
    Ii,
    Iii,
    Iv,
}

impl GnCase {
    /// `h ∈ {0, 2n+1}` → i; `h ∈ {n, n+1}` → iv; `h ∈ {1, 2n}` → ii; otherwise iii.
    /// For `n = 1` the middle degrees are both ii and iv; iv is used.
    pub fn select(n: usize, h: usize) -> Result<Self> {
        if h > 2 * n + 1 {
            return Err(Error::DegreeOutOfRange { n, degree: h });
        }
        Ok(if h == 0 || h == 2 * n + 1 {
            GnCase::I
        } else if h == n || h == n + 1 {
            GnCase::Iv
        } else if h == 1 || h == 2 * n {
            GnCase::Ii
        } else {
            GnCase::Iii
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            GnCase::I => "i",
            GnCase::Ii => "ii",
            GnCase::Iii => "iii",
            GnCase::Iv => "iv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTerm {
    pub name: String,
    pub norm: f64,
    /// Stands in for a Hardy norm.
    pub proxy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnReport {
    pub n: usize,
    pub degree: usize,
    pub case: GnCase,
    /// Homogeneous dimension `Q = 2n + 2`.
    pub q: usize,
    pub exponent_label: String,
    pub exponent: f64,
    pub lhs: f64,
    pub rhs_terms: Vec<NormTerm>,
    pub rhs: f64,
    pub ratio: Option<f64>,
    /// `ok`, `undefined` (zero sample) or `outside_hypotheses` (zero right-hand side).
    pub status: String,
    pub warnings: Vec<String>,
    pub lambda: f64,
    pub grid: Grid,
}

/// Nodes of padding needed around the support: the composites `d_c δ_c`
/// and `δ_c d_c` of case iv reach three nodes, everything else one.
pub fn required_reach(n: usize, h: usize) -> usize {
    match GnCase::select(n, h) {
        Ok(GnCase::Iv) => 3,
        _ => 1,
    }
}

/// Target number of nodes per slab array; slabs are never thinner than a
/// third of the grid.
const SLAB_NODES: usize = 1 << 24;

/// `Σ_{nodes in range} |v|^p` with `|v|² = Σ_k g_k v_k²`.
fn power_sum(
    data: &[Vec<f64>],
    gram: &[f64],
    range: std::ops::Range<usize>,
    p: f64,
    exec: Exec,
) -> f64 {
    let off = range.start;
    exec.sum(range.len(), |i| {
        let s: f64 = data
            .iter()
            .zip(gram)
            .map(|(a, g)| g * a[off + i] * a[off + i])
            .sum();
        if p == 1.0 {
            s.sqrt()
        } else {
            s.powf(p / 2.0)
        }
    })
}

/// `(label, input index, (operator, target Gram))`.
type Step<'a> = (&'a str, usize, (CompiledMatrix, Vec<f64>));

/// Samples `tf` on `grid` and evaluates the estimate selected by `(n, h)`.
///
/// The grid is swept in slabs along `x₁` with a halo as wide as the longest
/// composite stencil, so only one slab of every intermediate field is held
/// at a time; results equal the full-grid evaluation up to summation order.
pub fn gn_ratio(c: &RuminComplex, tf: &TestForm, grid: &Grid, exec: Exec) -> Result<GnReport> {
    gn_ratio_slabbed(c, tf, grid, SLAB_NODES, exec)
}

fn gn_ratio_slabbed(
    c: &RuminComplex,
    tf: &TestForm,
    grid: &Grid,
    slab_nodes: usize,
    exec: Exec,
) -> Result<GnReport> {
    let (n, h) = (c.n(), tf.degree());
    let case = GnCase::select(n, h)?;
    let top = c.top();
    let q = 2 * n + 2;
    let qf = q as f64;
    let halo = required_reach(n, h);
    check_support(tf, grid, halo)?;
    if tf.dim() != c.basis(h).dim() {
        return Err(Error::DimensionMismatch {
            expected: c.basis(h).dim(),
            found: tf.dim(),
        });
    }

    let dc = |k: usize| (CompiledMatrix::new(c.dc(k)), gram_f64(c.basis(k + 1)));
    let delta = |k: usize| (CompiledMatrix::new(c.delta_c(k)), gram_f64(c.basis(k - 1)));
    // Operators in evaluation order; each acts on the slab fields named by `input`
    // (0 is `u`, j > 0 the output of step j − 1).
    let steps: Vec<Step> = match case {
        GnCase::I if h == 0 => vec![("f = d_c u", 0, dc(0))],
        GnCase::I => vec![("g = delta_c u", 0, delta(top))],
        GnCase::Ii | GnCase::Iii => vec![("f = d_c u", 0, dc(h)), ("g = delta_c u", 0, delta(h))],
        GnCase::Iv if h == n => vec![
            ("f = d_c u", 0, dc(h)),
            ("g = delta_c u", 0, delta(h)),
            ("d_c g", 2, dc(h - 1)),
        ],
        GnCase::Iv => vec![
            ("g = delta_c u", 0, delta(h)),
            ("f = d_c u", 0, dc(h)),
            ("delta_c f", 2, delta(h + 1)),
        ],
    };
    let u_gram = gram_f64(c.basis(h));
    let (p_low, p_high) = (qf / (qf - 1.0), qf / (qf - 2.0));

    let nx = grid.nodes_xy;
    let s0 = grid.stride(0);
    let width = (slab_nodes / s0)
        .saturating_sub(2 * halo)
        .max(nx.div_ceil(3))
        .max(1);
    let mut sums = vec![0.0; steps.len()];
    let (mut lhs_low, mut lhs_high) = (0.0, 0.0);
    for i0 in (0..nx).step_by(width) {
        let i1 = (i0 + width).min(nx);
        let lo = i0.saturating_sub(halo);
        let slab = Slab {
            lo,
            len: (i1 + halo).min(nx) - lo,
        };
        let inner = (i0 - lo) * s0..(i1 - lo) * s0;
        let u = sample_slab(tf, grid, slab, exec);
        lhs_low += power_sum(&u, &u_gram, inner.clone(), p_low, exec);
        lhs_high += power_sum(&u, &u_gram, inner.clone(), p_high, exec);
        let mut outputs: Vec<Vec<Vec<f64>>> = Vec::with_capacity(steps.len());
        for (j, (_, input, (m, gram))) in steps.iter().enumerate() {
            let src = if *input == 0 { &u } else { &outputs[input - 1] };
            let out = apply_matrix_slab(grid, slab, m, src, exec);
            sums[j] += power_sum(&out, gram, inner.clone(), 1.0, exec);
            let later = steps[j + 1..].iter().any(|s| s.1 == j + 1);
            outputs.push(if later { out } else { Vec::new() });
        }
    }
    let vol = grid.cell_volume();
    let l1: Vec<f64> = sums.iter().map(|s| s * vol).collect();
    let term = |j: usize| NormTerm {
        name: steps[j].0.into(),
        norm: l1[j],
        proxy: false,
    };

    let mut warnings = Vec::new();
    let (mut exponent_label, mut exponent) = ("Q/(Q-1)", p_low);
    let mut rhs_terms = match case {
        GnCase::I => vec![term(0)],
        GnCase::Ii | GnCase::Iii => vec![term(0), term(1)],
        GnCase::Iv if l1[0] == 0.0 => {
            let (zero, other) = if h == n { ("f", "g") } else { ("g", "f") };
            warnings.push(format!(
                "{zero} = 0: using the L^{{Q/(Q-1)}} variant with right-hand side ||{other}||_1"
            ));
            vec![term(1)]
        }
        GnCase::Iv => {
            (exponent_label, exponent) = ("Q/(Q-2)", p_high);
            if h == n {
                vec![term(0), term(2)]
            } else {
                vec![term(2), term(0)]
            }
        }
    };
    if case == GnCase::Ii {
        let hardy = if h == 2 * n {
            "f = d_c u"
        } else {
            "g = delta_c u"
        };
        rhs_terms
            .iter_mut()
            .filter(|t| t.name == hardy)
            .for_each(|t| t.proxy = true);
        warnings.push(H1_PROXY_WARNING.to_string());
    }
    let lhs = (if exponent == p_low { lhs_low } else { lhs_high } * vol).powf(1.0 / exponent);
    let rhs: f64 = rhs_terms.iter().map(|t| t.norm).sum();
    let (ratio, status) = if lhs == 0.0 {
        (None, "undefined")
    } else if rhs == 0.0 {
        (None, "outside_hypotheses")
    } else {
        (Some(lhs / rhs), "ok")
    };
    Ok(GnReport {
        n,
        degree: h,
        case,
        q,
        exponent_label: exponent_label.into(),
        exponent,
        lhs,
        rhs_terms,
        rhs,
        ratio,
        status: status.into(),
        warnings,
        lambda: tf.lambda(),
        grid: grid.clone(),
    })
}

/// Ratios on successive grids and the largest relative change between neighbours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnStability {
    pub reports: Vec<GnReport>,
    pub max_relative_change: Option<f64>,
    pub tolerance: f64,
    pub stable: bool,
}

pub fn gn_stability(
    c: &RuminComplex,
    tf: &TestForm,
    grids: &[Grid],
    tolerance: f64,
    exec: Exec,
) -> Result<GnStability> {
    let reports = grids
        .iter()
        .map(|g| gn_ratio(c, tf, g, exec))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Option<Vec<f64>> = reports.iter().map(|r| r.ratio).collect();
    let max_relative_change = ratios.map(|r| {
        r.windows(2)
            .map(|w| ((w[1] - w[0]) / w[1]).abs())
            .fold(0.0, f64::max)
    });
    let stable = max_relative_change.is_some_and(|m| m <= tolerance);
    Ok(GnStability {
        reports,
        max_relative_change,
        tolerance,
        stable,
    })
}

/// Coarsest grid of the default stability ladder.
pub fn default_gn_base(n: usize) -> usize {
    if n == 1 {
        65
    } else {
        25
    }
}

/// Box half-width used for GN probes of the unit-support test forms.
pub const GN_HALF_WIDTH: f64 = 1.5;

/// `refinements + 1` nested-or-finer grids starting at `base` nodes per
/// horizontal axis: `N → 2N − 1` for `n = 1`; in five dimensions halving
/// the spacing is beyond desk memory, so `n ≥ 2` steps `N → N + 4`.
pub fn gn_levels(n: usize, base: usize, refinements: usize) -> Result<Vec<Grid>> {
    let mut nodes = base;
    let mut out = Vec::with_capacity(refinements + 1);
    for _ in 0..=refinements {
        out.push(Grid::with_nodes(n, GN_HALF_WIDTH, nodes)?);
        nodes = if n == 1 { 2 * nodes - 1 } else { nodes + 4 };
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    pub n: usize,
    pub degree: usize,
    pub lambda: f64,
    pub ratio: Option<f64>,
    pub dilated_ratio: Option<f64>,
    pub relative_difference: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares the ratio of `u` on `grid` with that of `u ∘ δ_λ` on the grid
/// carried by `δ_{1/λ}`, whose nodes correspond one-to-one.
pub fn dilation_invariance(
    c: &RuminComplex,
    tf: &TestForm,
    lambda: f64,
    grid: &Grid,
    exec: Exec,
) -> Result<DilationReport> {
    Ok(dilation_sweep(c, tf, &[lambda], grid, exec)?.remove(0))
}

/// [`dilation_invariance`] for several `λ`, sharing the undilated ratio.
pub fn dilation_sweep(
    c: &RuminComplex,
    tf: &TestForm,
    lambdas: &[f64],
    grid: &Grid,
    exec: Exec,
) -> Result<Vec<DilationReport>> {
    let base = gn_ratio(c, tf, grid, exec)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let scaled = gn_ratio(c, &tf.dilated(lambda)?, &grid.scaled(lambda), exec)?;
            Ok(dilation_report(
                c.n(),
                tf.degree(),
                lambda,
                base.ratio,
                scaled.ratio,
            ))
        })
        .collect()
}

fn dilation_report(
    n: usize,
    degree: usize,
    lambda: f64,
    ratio: Option<f64>,
    dilated_ratio: Option<f64>,
) -> DilationReport {
    let relative_difference = match (ratio, dilated_ratio) {
        (Some(a), Some(b)) => Some(((a - b) / a).abs()),
        _ => None,
    };
    let tolerance = 1e-10;
    DilationReport {
        n,
        degree,
        lambda,
        ratio,
        dilated_ratio,
        relative_difference,
        tolerance,
        passed: relative_difference.is_some_and(|d| d <= tolerance),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_selection() {
        assert_eq!(GnCase::select(1, 0).unwrap(), GnCase::I);
        assert_eq!(GnCase::select(1, 1).unwrap(), GnCase::Iv);
        assert_eq!(GnCase::select(1, 2).unwrap(), GnCase::Iv);
        assert_eq!(GnCase::select(1, 3).unwrap(), GnCase::I);
        let two: Vec<_> = (0..=5)
            .map(|h| GnCase::select(2, h).unwrap().label())
            .collect();
        assert_eq!(two, ["i", "ii", "iv", "iv", "ii", "i"]);
        assert_eq!(GnCase::select(3, 2).unwrap(), GnCase::Iii);
        assert!(GnCase::select(1, 4).is_err());
    }

    #[test]
    fn zero_sample_is_undefined() {
        let c = RuminComplex::new(1).unwrap();
        let g = Grid::with_nodes(1, 1.5, 17).unwrap();
        let r = gn_ratio(&c, &TestForm::zero(1, 0, 1), &g, Exec::Parallel).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, None));
        assert_eq!(r.status, "undefined");
        assert_eq!(r.q, 4);
    }

    #[test]
    fn hardy_cases_are_flagged() {
        let c = RuminComplex::new(2).unwrap();
        let g = Grid::with_nodes(2, 1.5, 9).unwrap();
        let r = gn_ratio(&c, &TestForm::standard(2, 1, 4), &g, Exec::Parallel).unwrap();
        assert_eq!(r.case, GnCase::Ii);
        assert!(r.warnings.iter().any(|w| w.contains("H1 proxy")));
        assert!(r.rhs_terms[1].proxy && !r.rhs_terms[0].proxy);
    }

    #[test]
    fn slabs_match_full_grid_fields() {
        use crate::numerics::FormField;
        let c = RuminComplex::new(2).unwrap();
        let grid = Grid::with_nodes(2, 2.0, 13).unwrap();
        let tf = TestForm::standard(2, 2, 5);
        let slabbed = gn_ratio_slabbed(&c, &tf, &grid, 0, Exec::Parallel).unwrap();
        let whole = gn_ratio(&c, &tf, &grid, Exec::Sequential).unwrap();
        let u = FormField::sample(&tf, &grid, c.basis(2), 3, Exec::Sequential).unwrap();
        let ap = |f: &FormField, m: &crate::complex::OperatorMatrix, k| {
            f.apply(&CompiledMatrix::new(m), c.basis(k), Exec::Sequential)
                .unwrap()
        };
        let f = ap(&u, c.dc(2), 3).lp_norm(1.0, Exec::Sequential);
        let dg = ap(&ap(&u, c.delta_c(2), 1), c.dc(1), 2).lp_norm(1.0, Exec::Sequential);
        let lhs = u.lp_norm(1.5, Exec::Sequential);
        for r in [&slabbed, &whole] {
            assert_eq!(r.case, GnCase::Iv);
            assert_eq!(r.exponent_label, "Q/(Q-2)");
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
            assert!(
                close(r.rhs_terms[0].norm, f)
                    && close(r.rhs_terms[1].norm, dg)
                    && close(r.lhs, lhs),
                "{r:?}"
            );
        }
    }

    #[test]
    fn standard_bump_n1_h0() {
        let c = RuminComplex::new(1).unwrap();
        let grids: Vec<Grid> = [33, 65, 129]
            .iter()
            .map(|&k| Grid::with_nodes(1, 1.5, k).unwrap())
            .collect();
        let s = gn_stability(&c, &TestForm::bump(1, 0, 1), &grids, 0.02, Exec::Parallel).unwrap();
        assert!(s.stable, "{:?}", s.max_relative_change);
        assert_eq!(s.reports[0].exponent_label, "Q/(Q-1)");
    }

    #[test]
    fn ladders() {
        let one: Vec<usize> = gn_levels(1, 33, 2)
            .unwrap()
            .iter()
            .map(|g| g.nodes_xy)
            .collect();
        assert_eq!(one, [33, 65, 129]);
        let two: Vec<usize> = gn_levels(2, 25, 2)
            .unwrap()
            .iter()
            .map(|g| g.nodes_xy)
            .collect();
        assert_eq!(two, [25, 29, 33]);
    }

    #[test]
    fn dilation_bookkeeping() {
        let c = RuminComplex::new(1).unwrap();
        let g = Grid::with_nodes(1, 1.5, 17).unwrap();
        let tf = TestForm::bump(1, 0, 1);
        let same = dilation_invariance(&c, &tf, 1.0, &g, Exec::Parallel).unwrap();
        assert_eq!(
            same.ratio.unwrap().to_bits(),
            same.dilated_ratio.unwrap().to_bits()
        );
        for lambda in [2.0, 0.5, 1.0 / 3.0] {
            let r = dilation_invariance(&c, &tf, lambda, &g, Exec::Parallel).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
