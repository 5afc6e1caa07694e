//! Central-difference realisation of the frame and of operator matrices.
//!
//! `Xⱼ ≈ D_{xⱼ} − ½yⱼ D_t`, `Yⱼ ≈ D_{yⱼ} + ½xⱼ D_t`, `T ≈ D_t` with
//! `D_a u(p) = (u(p + e_a) − u(p − e_a)) / 2h_a`, the coefficient taken at
//! the stencil centre and nodes outside the box read as zero.

use super::grid::Grid;
use crate::complex::OperatorMatrix;
use crate::exec::Exec;
use crate::rational::to_f64;

/// Differentiated axis and, for horizontal generators, the axis carrying
/// the coefficient of `D_t` together with its factor `±½`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorStencil {
    pub axis: usize,
    pub twist: Option<(usize, f64)>,
}

pub fn generator_stencil(n: usize, g: usize) -> GeneratorStencil {
    if g < n {
        GeneratorStencil {
            axis: g,
            twist: Some((n + g, -0.5)),
        }
    } else if g < 2 * n {
        GeneratorStencil {
            axis: g,
            twist: Some((g - n, 0.5)),
        }
    } else {
        GeneratorStencil {
            axis: 2 * n,
            twist: None,
        }
    }
}

/// `(input column, word, coefficient)`.
pub type Term<'a> = (usize, &'a [usize], f64);

/// One matrix entry as `(word, coefficient)` pairs.
pub type WordSum = Vec<(Vec<usize>, f64)>;

/// Operator matrix with every entry flattened into a [`WordSum`].
#[derive(Clone, Debug)]
pub struct CompiledMatrix {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub source: usize,
    pub target: usize,
    pub entries: Vec<Vec<WordSum>>,
}

impl CompiledMatrix {
    pub fn new(m: &OperatorMatrix) -> Self {
        let entries = (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| {
                        m.get(r, c)
                            .terms()
                            .map(|(mono, coef)| {
                                (mono.word().iter().map(|g| g.0).collect(), to_f64(coef))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            n: m.n(),
            rows: m.rows(),
            cols: m.cols(),
            source: m.source_degree(),
            target: m.target_degree(),
            entries,
        }
    }

    /// Longest word; the stencil reaches this many nodes along any axis.
    pub fn reach(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .flatten()
            .map(|(w, _)| w.len())
            .max()
            .unwrap_or(0)
    }
}

/// Contiguous range `lo..lo + len` of the outermost axis `x₁`; arrays on a
/// slab are the matching contiguous piece of the full flat layout, and nodes
/// beyond either end read as zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slab {
    pub lo: usize,
    pub len: usize,
}

impl Slab {
    pub fn full(grid: &Grid) -> Self {
        Self {
            lo: 0,
            len: grid.nodes_xy,
        }
    }

    pub fn nodes(&self, grid: &Grid) -> usize {
        self.len * grid.stride(0)
    }

    /// Flat index in the full grid of local node `i`.
    pub fn global(&self, grid: &Grid, i: usize) -> usize {
        self.lo * grid.stride(0) + i
    }
}

/// One generator applied to a nodal array on a slab.
pub fn apply_generator_slab(grid: &Grid, slab: Slab, g: usize, a: &[f64], exec: Exec) -> Vec<f64> {
    let s = generator_stencil(grid.n, g);
    let (sa, ha) = (grid.stride(s.axis), grid.spacing(s.axis));
    let na = if s.axis == 0 {
        slab.len
    } else {
        grid.nodes(s.axis)
    };
    let (nt, ht) = (grid.nodes_t, grid.spacing_t());
    let twist = s.twist.map(|(c, f)| {
        (
            grid.stride(c),
            if c == 0 { slab.len } else { grid.nodes(c) },
            c,
            if c == 0 { slab.lo } else { 0 },
            f,
        )
    });
    let mut out = vec![0.0; a.len()];
    let (inv_a, inv_t) = (0.5 / ha, 0.5 / ht);
    // Lines run along `t`, the contiguous axis.
    exec.fill_lines(&mut out, nt, |line, o| {
        let i = line * nt;
        let l = &a[i..i + nt];
        let (ct, horizontal) = match twist {
            None => (inv_t, false),
            Some((sc, nc, c, off, f)) => (
                f * grid.coord(c, (off + (i / sc) % nc) as i64) * inv_t,
                true,
            ),
        };
        if horizontal {
            let ia = (i / sa) % na;
            let plus = (ia + 1 < na).then(|| &a[i + sa..i + sa + nt]);
            let minus = (ia > 0).then(|| &a[i - sa..i - sa + nt]);
            match (plus, minus) {
                (Some(p), Some(m)) => o
                    .iter_mut()
                    .zip(p.iter().zip(m))
                    .for_each(|(v, (p, m))| *v = (p - m) * inv_a),
                (Some(p), None) => o.iter_mut().zip(p).for_each(|(v, p)| *v = p * inv_a),
                (None, Some(m)) => o.iter_mut().zip(m).for_each(|(v, m)| *v = -m * inv_a),
                (None, None) => {}
            }
        }
        o[0] += ct * l[1];
        for k in 1..nt - 1 {
            o[k] += ct * (l[k + 1] - l[k - 1]);
        }
        o[nt - 1] -= ct * l[nt - 2];
    });
    out
}

/// One generator applied to a full nodal array.
pub fn apply_generator_array(grid: &Grid, g: usize, a: &[f64], exec: Exec) -> Vec<f64> {
    apply_generator_slab(grid, Slab::full(grid), g, a, exec)
}

/// `W_{g₁}⋯W_{g_k} a`, rightmost factor first.
pub fn apply_word_array(grid: &Grid, word: &[usize], a: &[f64], exec: Exec) -> Vec<f64> {
    let mut it = word.iter().rev();
    let Some(&first) = it.next() else {
        return a.to_vec();
    };
    it.fold(apply_generator_array(grid, first, a, exec), |acc, &g| {
        apply_generator_array(grid, g, &acc, exec)
    })
}

/// `Σ coef · word(inputs[c])` over `(c, word, coef)`, factored by leading
/// generator so that a shared prefix is differenced once.
pub fn apply_terms(
    grid: &Grid,
    slab: Slab,
    terms: &[Term],
    inputs: &[Vec<f64>],
    exec: Exec,
) -> Vec<f64> {
    let mut leaves: Vec<(f64, &[f64])> = Vec::new();
    let mut owned: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut groups: std::collections::BTreeMap<usize, Vec<Term>> = Default::default();
    for &(c, word, coef) in terms {
        match word.split_first() {
            None => leaves.push((coef, &inputs[c])),
            Some((&g, rest)) => groups.entry(g).or_default().push((c, rest, coef)),
        }
    }
    for (g, sub) in groups {
        // A lone bare input is differenced directly and scaled afterwards.
        let (coef, inner) = match sub.as_slice() {
            [(c, [], coef)] => (
                *coef,
                apply_generator_slab(grid, slab, g, &inputs[*c], exec),
            ),
            _ => (
                1.0,
                apply_generator_slab(
                    grid,
                    slab,
                    g,
                    &apply_terms(grid, slab, &sub, inputs, exec),
                    exec,
                ),
            ),
        };
        owned.push((coef, inner));
    }
    let mut owned = owned.into_iter();
    let mut acc = match owned.next() {
        Some((coef, mut v)) => {
            if coef != 1.0 {
                v.iter_mut().for_each(|x| *x *= coef);
            }
            v
        }
        None => vec![0.0; slab.nodes(grid)],
    };
    for (coef, v) in owned {
        exec.axpy(&mut acc, coef, &v);
    }
    for (coef, x) in leaves {
        exec.axpy(&mut acc, coef, x);
    }
    acc
}

/// Every row of `m` applied to component arrays on a slab.
pub fn apply_matrix_slab(
    grid: &Grid,
    slab: Slab,
    m: &CompiledMatrix,
    inputs: &[Vec<f64>],
    exec: Exec,
) -> Vec<Vec<f64>> {
    (0..m.rows)
        .map(|r| {
            let terms: Vec<Term> = m.entries[r]
                .iter()
                .enumerate()
                .flat_map(|(c, e)| e.iter().map(move |(w, coef)| (c, w.as_slice(), *coef)))
                .collect();
            apply_terms(grid, slab, &terms, inputs, exec)
        })
        .collect()
}

/// Nodal values addressable by multi-index; nodes outside the box read as zero.
///
/// `idx` may be modified during the call but is restored on return.
pub trait NodeField: Sync {
    fn grid(&self) -> &Grid;
    fn components(&self) -> usize;
    fn value(&self, k: usize, idx: &mut [i64]) -> f64;
}

fn stencil_at(grid: &Grid, g: usize, idx: &mut [i64], f: &mut dyn FnMut(&mut [i64]) -> f64) -> f64 {
    let s = generator_stencil(grid.n, g);
    let a = s.axis;
    idx[a] += 1;
    let plus = f(idx);
    idx[a] -= 2;
    let minus = f(idx);
    idx[a] += 1;
    let mut v = (plus - minus) / (2.0 * grid.spacing(a));
    if let Some((c, fac)) = s.twist {
        let t = 2 * grid.n;
        idx[t] += 1;
        let plus = f(idx);
        idx[t] -= 2;
        let minus = f(idx);
        idx[t] += 1;
        v += fac * grid.coord(c, idx[c]) * (plus - minus) / (2.0 * grid.spacing_t());
    }
    v
}

/// A compiled matrix applied lazily to another node field.
pub struct Applied<'a> {
    pub op: &'a CompiledMatrix,
    pub inner: &'a dyn NodeField,
}

impl Applied<'_> {
    fn word_at(&self, word: &[usize], c: usize, idx: &mut [i64]) -> f64 {
        let grid = self.inner.grid();
        if !grid.contains(idx) {
            return 0.0;
        }
        match word.split_first() {
            None => self.inner.value(c, idx),
            Some((&g, rest)) => stencil_at(grid, g, idx, &mut |j| self.word_at(rest, c, j)),
        }
    }
}

impl NodeField for Applied<'_> {
    fn grid(&self) -> &Grid {
        self.inner.grid()
    }

    fn components(&self) -> usize {
        self.op.rows
    }

    fn value(&self, r: usize, idx: &mut [i64]) -> f64 {
        if !self.grid().contains(idx) {
            return 0.0;
        }
        let mut v = 0.0;
        for (c, entry) in self.op.entries[r].iter().enumerate() {
            for (word, coef) in entry {
                v += coef * self.word_at(word, c, idx);
            }
        }
        v
    }
}
