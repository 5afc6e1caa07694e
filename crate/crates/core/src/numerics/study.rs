//! Refinement studies. Consistency, `d_c²` decay and the divergence of the
//! decomposition fields are measured at a fixed set of probe nodes, shared
//! by all nested levels and evaluated lazily; the pairing gap is a global
//! sum and is streamed over slabs of the full grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{check_support, gram_f64, sample_slab, Sampled};
use super::grid::Grid;
use super::stencil::{apply_matrix_slab, Applied, CompiledMatrix, NodeField, Slab};
use super::testform::{FloatPoly, TestForm};
use crate::complex::{OperatorMatrix, RuminComplex};
use crate::exec::Exec;
use crate::lie_algebra::{Generator, OperatorPolynomial};
use crate::symbol::{extract_symbol, left_inverse, PolyForm, Symbol};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub nodes_xy: usize,
    pub nodes_t: usize,
    pub spacing_xy: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub study: String,
    pub n: usize,
    pub degree: usize,
    pub levels: Vec<Level>,
    /// `log(e_k / e_{k+1}) / log(h_k / h_{k+1})` for consecutive levels.
    pub orders: Vec<f64>,
    pub min_order: Option<f64>,
    /// Every error sits below the round-off floor, so no order is measured.
    pub exact: bool,
    pub required_order: f64,
    pub passed: bool,
}

/// Errors below this are treated as round-off.
pub const ROUNDOFF_FLOOR: f64 = 1e-9;

impl ConvergenceReport {
    pub fn new(
        study: &str,
        n: usize,
        degree: usize,
        levels: Vec<Level>,
        required_order: f64,
    ) -> Self {
        let exact = levels.iter().all(|l| l.error <= ROUNDOFF_FLOOR);
        let orders: Vec<f64> = levels
            .windows(2)
            .map(|w| (w[0].error / w[1].error).ln() / (w[0].spacing_xy / w[1].spacing_xy).ln())
            .collect();
        let min_order = orders.iter().copied().reduce(f64::min);
        let passed = exact || min_order.is_some_and(|m| m >= required_order);
        Self {
            study: study.into(),
            n,
            degree,
            levels,
            orders,
            min_order,
            exact,
            required_order,
            passed,
        }
    }

    pub fn csv_header() -> &'static str {
        "study,n,degree,nodes_xy,nodes_t,spacing_xy,error,order"
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.levels
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let order = if k == 0 {
                    String::new()
                } else {
                    format!("{:.6}", self.orders[k - 1])
                };
                format!(
                    "{},{},{},{},{},{:.6e},{:.6e},{}",
                    self.study,
                    self.n,
                    self.degree,
                    l.nodes_xy,
                    l.nodes_t,
                    l.spacing_xy,
                    l.error,
                    order
                )
            })
            .collect()
    }
}

/// Parameters shared by the probe-based studies.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub base: Grid,
    pub levels: usize,
    pub probes: usize,
    /// Probes lie in the Euclidean ball of this radius, inside the bump's support.
    pub radius: f64,
    pub seed: u64,
}

impl ProbeConfig {
    /// Base grid `33 × 65` (`n = 1`) or `33⁵` (`n = 2`), three nested levels.
    pub fn default_for(n: usize) -> Result<Self> {
        Ok(Self {
            base: Grid::with_nodes(n, 1.5, 33)?,
            levels: 3,
            probes: if n == 1 { 64 } else { 24 },
            radius: 0.5,
            seed: 7,
        })
    }

    pub fn grids(&self) -> Vec<Grid> {
        std::iter::successors(Some(self.base.clone()), |g| Some(g.refined()))
            .take(self.levels)
            .collect()
    }

    /// Node indices of the base grid, drawn uniformly from the probe ball.
    pub fn probe_nodes(&self) -> Vec<Vec<i64>> {
        let g = &self.base;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.probes);
        let mut attempts = 0;
        while out.len() < self.probes && attempts < 1_000_000 {
            attempts += 1;
            let idx: Vec<i64> = (0..g.axes())
                .map(|a| rng.gen_range(0..g.nodes(a) as i64))
                .collect();
            let r2: f64 = g.point(&idx).iter().map(|v| v * v).sum();
            if r2 <= self.radius * self.radius {
                out.push(idx);
            }
        }
        out
    }

    /// `max` over probes and components of `|err(field, idx, component)|` on every level.
    fn run<F>(&self, mut measure: F) -> Result<Vec<Level>>
    where
        F: FnMut(&Grid, &mut [i64]) -> Result<f64>,
    {
        let probes = self.probe_nodes();
        self.grids()
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let scale = 1i64 << k;
                let mut worst = 0.0f64;
                for p in &probes {
                    let mut idx: Vec<i64> = p.iter().map(|v| v * scale).collect();
                    worst = worst.max(measure(g, &mut idx)?);
                }
                Ok(Level {
                    nodes_xy: g.nodes_xy,
                    nodes_t: g.nodes_t,
                    spacing_xy: g.spacing_xy(),
                    error: worst,
                })
            })
            .collect()
    }
}

fn max_component(f: &dyn NodeField, idx: &mut [i64]) -> f64 {
    (0..f.components())
        .map(|r| f.value(r, idx).abs())
        .fold(0.0, f64::max)
}

/// `1 × 1` matrix holding a single generator, acting on functions.
pub fn generator_matrix(n: usize, g: usize) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(n, 1, 1, 0, 0);
    m.set(0, 0, OperatorPolynomial::generator(n, Generator(g)));
    m
}

/// Central differences of `M u` against the exact `M u` of the polynomial
/// representation of `u` inside its support.
pub fn fd_consistency(
    name: &str,
    m: &OperatorMatrix,
    tf: &TestForm,
    cfg: &ProbeConfig,
) -> Result<ConvergenceReport> {
    let exact = PolyForm::new(tf.n(), tf.degree(), tf.analytic()?).apply(m)?;
    let exact: Vec<FloatPoly> = exact.coeffs().iter().map(FloatPoly::from_exact).collect();
    let cm = CompiledMatrix::new(m);
    let levels = cfg.run(|g, idx| {
        check_support(tf, g, cm.reach())?;
        let s = Sampled { tf, grid: g };
        let fd = Applied { op: &cm, inner: &s };
        let z = g.point(idx);
        Ok((0..cm.rows)
            .map(|r| (fd.value(r, idx) - exact[r].eval(&z)).abs())
            .fold(0.0, f64::max))
    })?;
    Ok(ConvergenceReport::new(
        name,
        tf.n(),
        m.source_degree(),
        levels,
        1.8,
    ))
}

/// `‖d_c(d_c u)‖_∞` at the probes, both factors discretised separately.
pub fn dc_squared_decay(
    c: &RuminComplex,
    tf: &TestForm,
    cfg: &ProbeConfig,
) -> Result<ConvergenceReport> {
    let h = tf.degree();
    if h + 1 >= c.top() {
        return Err(Error::DegreeOutOfRange {
            n: c.n(),
            degree: h,
        });
    }
    let (first, second) = (
        CompiledMatrix::new(c.dc(h)),
        CompiledMatrix::new(c.dc(h + 1)),
    );
    let levels = cfg.run(|g, idx| {
        check_support(tf, g, first.reach() + second.reach())?;
        let s = Sampled { tf, grid: g };
        let du = Applied {
            op: &first,
            inner: &s,
        };
        let ddu = Applied {
            op: &second,
            inner: &du,
        };
        Ok(max_component(&ddu, idx))
    })?;
    Ok(ConvergenceReport::new("dc_squared", c.n(), h, levels, 1.8))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDecompositionReport {
    pub divergence: ConvergenceReport,
    /// `max |Σ b·G − α|` over probes and levels.
    pub reconstruction_error: f64,
}

/// Fields `G = F·α` of `α = d_c u ∈ E₀ʰ` and their discrete divergence
/// `Σ_a W_a G_{I,a}` (literal word order), compared across levels.
pub fn decomposition_decay(
    c: &RuminComplex,
    h: usize,
    tf: &TestForm,
    cfg: &ProbeConfig,
) -> Result<GridDecompositionReport> {
    let n = c.n();
    if h == 0 || h >= c.top() || tf.degree() != h - 1 {
        return Err(Error::DegreeOutOfRange { n, degree: h });
    }
    let symbol = extract_symbol(c.dc(h))?;
    let b = left_inverse(&symbol, c.basis(h + 1))?;
    let slots = symbol.slots();
    let rows = c.basis(h + 1).dim();
    let m = 2 * n;
    let f = symbol.field_tensor();

    let potential = CompiledMatrix::new(c.dc(h - 1));
    let fields = CompiledMatrix::new(&OperatorMatrix::from_constant(n, &f, h, h + 1));
    let recon = CompiledMatrix::new(&OperatorMatrix::from_constant(n, &b.b, h + 1, h));
    let word = |a: usize| match symbol {
        Symbol::Order1(_) => vec![a],
        Symbol::Order2(_) => vec![a / m, a % m],
    };
    let divergence = CompiledMatrix {
        n,
        rows,
        cols: rows * slots,
        source: h + 1,
        target: h + 2,
        entries: (0..rows)
            .map(|big_i| {
                (0..rows * slots)
                    .map(|col| {
                        if col / slots == big_i {
                            vec![(word(col % slots), 1.0)]
                        } else {
                            Vec::new()
                        }
                    })
                    .collect()
            })
            .collect(),
    };

    let mut recon_err = 0.0f64;
    let levels = cfg.run(|g, idx| {
        check_support(tf, g, potential.reach() + divergence.reach())?;
        let s = Sampled { tf, grid: g };
        let alpha = Applied {
            op: &potential,
            inner: &s,
        };
        let gf = Applied {
            op: &fields,
            inner: &alpha,
        };
        let back = Applied {
            op: &recon,
            inner: &gf,
        };
        let div = Applied {
            op: &divergence,
            inner: &gf,
        };
        for j in 0..alpha.components() {
            let a = alpha.value(j, idx);
            recon_err = recon_err.max((back.value(j, idx) - a).abs() / (1.0 + a.abs()));
        }
        Ok(max_component(&div, idx))
    })?;
    Ok(GridDecompositionReport {
        divergence: ConvergenceReport::new("decomposition_divergence", n, h, levels, 1.8),
        reconstruction_error: recon_err,
    })
}

/// `|⟨d_c u, v⟩ − ⟨u, δ_c v⟩|` on each grid, swept in `x₁` slabs.
pub fn duality_gap(
    c: &RuminComplex,
    u: &TestForm,
    v: &TestForm,
    grids: &[Grid],
    exec: Exec,
) -> Result<ConvergenceReport> {
    let h = u.degree();
    if v.degree() != h + 1 || h + 1 > c.top() {
        return Err(Error::DegreeMismatch(h + 1, v.degree()));
    }
    let d = CompiledMatrix::new(c.dc(h));
    let delta = CompiledMatrix::new(c.delta_c(h + 1));
    let reach = d.reach().max(delta.reach());
    let (gu, gv) = (gram_f64(c.basis(h)), gram_f64(c.basis(h + 1)));
    let pair = |a: &[Vec<f64>], b: &[Vec<f64>], g: &[f64], range: std::ops::Range<usize>| {
        let off = range.start;
        exec.sum(range.len(), |i| {
            a.iter()
                .zip(b)
                .zip(g)
                .map(|((x, y), w)| w * x[off + i] * y[off + i])
                .sum::<f64>()
        })
    };
    let levels = grids
        .iter()
        .map(|g| {
            check_support(u, g, reach)?;
            check_support(v, g, reach)?;
            let (nx, s0) = (g.nodes_xy, g.stride(0));
            let width = nx.div_ceil(3).max(1);
            let (mut lhs, mut rhs) = (0.0, 0.0);
            for i0 in (0..nx).step_by(width) {
                let i1 = (i0 + width).min(nx);
                let lo = i0.saturating_sub(reach);
                let slab = Slab {
                    lo,
                    len: (i1 + reach).min(nx) - lo,
                };
                let inner = (i0 - lo) * s0..(i1 - lo) * s0;
                let us = sample_slab(u, g, slab, exec);
                let vs = sample_slab(v, g, slab, exec);
                lhs += pair(
                    &apply_matrix_slab(g, slab, &d, &us, exec),
                    &vs,
                    &gv,
                    inner.clone(),
                );
                rhs += pair(
                    &us,
                    &apply_matrix_slab(g, slab, &delta, &vs, exec),
                    &gu,
                    inner,
                );
            }
            let vol = g.cell_volume();
            Ok(Level {
                nodes_xy: nx,
                nodes_t: g.nodes_t,
                spacing_xy: g.spacing_xy(),
                error: ((lhs - rhs) * vol).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::new("duality_gap", c.n(), h, levels, 0.0))
}

/// Random test forms for the pairing study, seeded per degree.
pub fn duality_pair(c: &RuminComplex, h: usize, seed: u64) -> (TestForm, TestForm) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (h as u64).wrapping_mul(0x9e37_79b9));
    let n = c.n();
    (
        TestForm::random(n, h, c.basis(h).dim(), &mut rng),
        TestForm::random(n, h + 1, c.basis(h + 1).dim(), &mut rng),
    )
}
