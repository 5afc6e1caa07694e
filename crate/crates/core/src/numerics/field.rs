use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::stencil::{apply_matrix_slab, CompiledMatrix, NodeField, Slab};
use super::testform::TestForm;
use crate::complex::E0Basis;
use crate::exec::Exec;
use crate::rational::to_f64;
use crate::{Error, Result, SCHEMA_VERSION};

const MAGIC: &[u8; 8] = b"RUMINFF\x01";

/// Grid samples of a section of `E₀ʰ`, one array per basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct FormField {
    grid: Grid,
    degree: usize,
    basis_id: String,
    gram: Vec<f64>,
    data: Vec<Vec<f64>>,
}

pub fn basis_id(n: usize, h: usize) -> String {
    format!("E0[n={n},h={h}]")
}

pub fn gram_f64(basis: &E0Basis) -> Vec<f64> {
    basis.gram().iter().map(to_f64).collect()
}

impl FormField {
    pub fn new(grid: Grid, degree: usize, gram: Vec<f64>, data: Vec<Vec<f64>>) -> Result<Self> {
        if data.len() != gram.len() {
            return Err(Error::DimensionMismatch {
                expected: gram.len(),
                found: data.len(),
            });
        }
        if let Some(a) = data.iter().find(|a| a.len() != grid.len()) {
            return Err(Error::GridMismatch(format!(
                "array of {} values on a grid of {} nodes",
                a.len(),
                grid.len()
            )));
        }
        Ok(Self {
            basis_id: basis_id(grid.n, degree),
            grid,
            degree,
            gram,
            data,
        })
    }

    pub fn zeros(grid: Grid, degree: usize, gram: Vec<f64>) -> Self {
        let data = vec![vec![0.0; grid.len()]; gram.len()];
        Self {
            basis_id: basis_id(grid.n, degree),
            grid,
            degree,
            gram,
            data,
        }
    }

    /// Nodal values of `tf`; its support plus `reach` nodes of padding must fit in the box.
    pub fn sample(
        tf: &TestForm,
        grid: &Grid,
        basis: &E0Basis,
        reach: usize,
        exec: Exec,
    ) -> Result<Self> {
        if tf.dim() != basis.dim() || tf.degree() != basis.degree() || tf.n() != grid.n {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: tf.dim(),
            });
        }
        check_support(tf, grid, reach)?;
        let data = sample_slab(tf, grid, Slab::full(grid), exec);
        Self::new(grid.clone(), tf.degree(), gram_f64(basis), data)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis_id(&self) -> &str {
        &self.basis_id
    }

    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            data: self
                .data
                .iter()
                .map(|a| a.iter().map(|v| c * v).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// `M u` with every PBW word realised by central differences.
    pub fn apply(&self, m: &CompiledMatrix, target: &E0Basis, exec: Exec) -> Result<Self> {
        if m.source != self.degree || m.cols != self.dim() {
            return Err(Error::DegreeMismatch(m.source, self.degree));
        }
        let data = apply_matrix_slab(&self.grid, Slab::full(&self.grid), m, &self.data, exec);
        Self::new(self.grid.clone(), m.target, gram_f64(target), data)
    }

    fn pointwise_sq(&self, i: usize) -> f64 {
        self.data
            .iter()
            .zip(&self.gram)
            .map(|(a, g)| g * a[i] * a[i])
            .sum()
    }

    /// `(Σ_nodes |u|^p · vol)^{1/p}` with `|u|² = Σ_k g_k u_k²`; `p = ∞` is the max.
    pub fn lp_norm(&self, p: f64, exec: Exec) -> f64 {
        assert!(p >= 1.0, "p must be at least 1");
        let len = self.grid.len();
        if p.is_infinite() {
            return exec.max(len, |i| self.pointwise_sq(i).sqrt());
        }
        let s = if p == 1.0 {
            exec.sum(len, |i| self.pointwise_sq(i).sqrt())
        } else if p == 2.0 {
            exec.sum(len, |i| self.pointwise_sq(i))
        } else {
            exec.sum(len, |i| self.pointwise_sq(i).powf(p / 2.0))
        };
        (s * self.grid.cell_volume()).powf(1.0 / p)
    }

    /// `(‖u‖²_{Lᵖ} + ‖u‖²_{L^q})^{1/2}`.
    pub fn lpq_norm(&self, p: f64, q: f64, exec: Exec) -> f64 {
        self.lp_norm(p, exec).hypot(self.lp_norm(q, exec))
    }

    /// `Σ_nodes Σ_k g_k u_k v_k · vol`.
    pub fn pairing(&self, other: &Self, exec: Exec) -> Result<f64> {
        if self.grid != other.grid || self.degree != other.degree || self.dim() != other.dim() {
            return Err(Error::GridMismatch(
                "pairing of fields on different grids or degrees".into(),
            ));
        }
        let s = exec.sum(self.grid.len(), |i| {
            self.data
                .iter()
                .zip(&other.data)
                .zip(&self.gram)
                .map(|((a, b), g)| g * a[i] * b[i])
                .sum::<f64>()
        });
        Ok(s * self.grid.cell_volume())
    }

    pub fn header(&self) -> FieldHeader {
        FieldHeader {
            schema_version: SCHEMA_VERSION,
            n: self.grid.n,
            degree: self.degree,
            basis_id: self.basis_id.clone(),
            gram: self.gram.clone(),
            shape: self.grid.shape(),
            half_widths: [self.grid.half_xy, self.grid.half_t],
            spacing: [self.grid.spacing_xy(), self.grid.spacing_t()],
            components: self.dim(),
            byte_order: "little-endian f64, component-major, t fastest".into(),
        }
    }

    /// `MAGIC | u64 header length | JSON header | data`.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let header = serde_json::to_vec(&self.header())?;
        w.write_all(MAGIC)?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        for a in &self.data {
            let mut buf = Vec::with_capacity(8 * a.len());
            for v in a {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Invalid("not a form field snapshot".into()));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let mut header = vec![0u8; u64::from_le_bytes(len) as usize];
        r.read_exact(&mut header)?;
        let h: FieldHeader = serde_json::from_slice(&header)?;
        if h.shape.len() != 2 * h.n + 1 {
            return Err(Error::GridMismatch("shape does not match n".into()));
        }
        let grid = Grid::new(
            h.n,
            h.half_widths[0],
            h.half_widths[1],
            h.shape[0],
            h.shape[2 * h.n],
        )?;
        let mut data = Vec::with_capacity(h.components);
        for _ in 0..h.components {
            let mut buf = vec![0u8; 8 * grid.len()];
            r.read_exact(&mut buf)?;
            data.push(
                buf.chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                    .collect(),
            );
        }
        let mut f = Self::new(grid, h.degree, h.gram, data)?;
        f.basis_id = h.basis_id;
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub schema_version: u32,
    pub n: usize,
    pub degree: usize,
    pub basis_id: String,
    pub gram: Vec<f64>,
    pub shape: Vec<usize>,
    pub half_widths: [f64; 2],
    pub spacing: [f64; 2],
    pub components: usize,
    pub byte_order: String,
}

/// Nodal values of every component of `tf` on a slab.
pub fn sample_slab(tf: &TestForm, grid: &Grid, slab: Slab, exec: Exec) -> Vec<Vec<f64>> {
    let nt = grid.nodes_t;
    let t = 2 * grid.n;
    (0..tf.dim())
        .map(|k| {
            let mut a = vec![0.0; slab.nodes(grid)];
            exec.fill_lines(&mut a, nt, |line, o| {
                let mut z = grid.point(&grid.multi_index(slab.global(grid, line * nt)));
                for (j, v) in o.iter_mut().enumerate() {
                    z[t] = grid.coord(t, j as i64);
                    *v = tf.eval(k, &z);
                }
            });
            a
        })
        .collect()
}

/// Rejects a test form whose support, padded by `reach` nodes, leaves the box.
pub fn check_support(tf: &TestForm, grid: &Grid, reach: usize) -> Result<()> {
    let (sxy, st) = tf.support();
    let pad = reach.max(1) as f64;
    let slack = 1e-12;
    if sxy + pad * grid.spacing_xy() > grid.half_xy * (1.0 + slack)
        || st + pad * grid.spacing_t() > grid.half_t * (1.0 + slack)
    {
        return Err(Error::SupportOverflow(format!(
            "support radii ({sxy}, {st}) plus {reach} node(s) exceed half-widths ({}, {})",
            grid.half_xy, grid.half_t
        )));
    }
    Ok(())
}

impl NodeField for FormField {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn components(&self) -> usize {
        self.dim()
    }

    fn value(&self, k: usize, idx: &mut [i64]) -> f64 {
        if self.grid.contains(idx) {
            self.data[k][self.grid.flat_index(idx)]
        } else {
            0.0
        }
    }
}

/// A test form read directly at grid nodes, without storing arrays.
pub struct Sampled<'a> {
    pub tf: &'a TestForm,
    pub grid: &'a Grid,
}

impl NodeField for Sampled<'_> {
    fn grid(&self) -> &Grid {
        self.grid
    }

    fn components(&self) -> usize {
        self.tf.dim()
    }

    fn value(&self, k: usize, idx: &mut [i64]) -> f64 {
        if self.grid.contains(idx) {
            self.tf.eval(k, &self.grid.point(idx))
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RuminComplex;
    use crate::numerics::stencil::Applied;
    use crate::numerics::testform::bump_integral;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampling_examples() {
        let c = RuminComplex::new(1).unwrap();
        let grid = Grid::cube(1, 2.0, 17, 17).unwrap();
        let z = FormField::sample(
            &TestForm::zero(1, 1, 2),
            &grid,
            c.basis(1),
            1,
            Exec::Sequential,
        )
        .unwrap();
        assert!(z.data().iter().flatten().all(|&v| v == 0.0));

        let u = FormField::sample(
            &TestForm::bump(1, 0, 1),
            &grid,
            c.basis(0),
            1,
            Exec::Sequential,
        )
        .unwrap();
        let centre = grid.flat_index(&[8, 8, 8]);
        assert_eq!(u.data()[0][centre], 1.0);
        for i in 0..grid.len() {
            let idx = grid.multi_index(i);
            if idx
                .iter()
                .enumerate()
                .any(|(a, &j)| j == 0 || j as usize == grid.nodes(a) - 1)
            {
                assert_eq!(u.data()[0][i], 0.0);
            }
        }
        let small = Grid::cube(1, 1.0, 9, 9).unwrap();
        assert!(matches!(
            FormField::sample(
                &TestForm::bump(1, 0, 1),
                &small,
                c.basis(0),
                1,
                Exec::Sequential
            ),
            Err(Error::SupportOverflow(_))
        ));
    }

    #[test]
    fn refined_samples_agree_at_shared_nodes() {
        let c = RuminComplex::new(1).unwrap();
        let tf = TestForm::standard(1, 1, 2);
        let g = Grid::cube(1, 1.5, 9, 17).unwrap();
        let f = g.refined();
        let a = FormField::sample(&tf, &g, c.basis(1), 1, Exec::Sequential).unwrap();
        let b = FormField::sample(&tf, &f, c.basis(1), 1, Exec::Sequential).unwrap();
        for i in 0..g.len() {
            let idx: Vec<i64> = g.multi_index(i).iter().map(|v| 2 * v).collect();
            for k in 0..2 {
                assert_eq!(a.data()[k][i], b.data()[k][f.flat_index(&idx)]);
            }
        }
    }

    #[test]
    fn zero_operator_gives_zero() {
        let c = RuminComplex::new(1).unwrap();
        let grid = Grid::cube(1, 1.5, 9, 9).unwrap();
        let u = FormField::sample(
            &TestForm::bump(1, 0, 1),
            &grid,
            c.basis(0),
            1,
            Exec::Sequential,
        )
        .unwrap();
        let zero = crate::complex::OperatorMatrix::zeros(1, 2, 1, 0, 1);
        let v = u
            .apply(&CompiledMatrix::new(&zero), c.basis(1), Exec::Sequential)
            .unwrap();
        assert!(v.data().iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn full_grid_and_lazy_application_agree() {
        let c = RuminComplex::new(1).unwrap();
        let grid = Grid::cube(1, 1.5, 13, 13).unwrap();
        let tf = TestForm::standard(1, 1, 2);
        let u = FormField::sample(&tf, &grid, c.basis(1), 2, Exec::Parallel).unwrap();
        let m = CompiledMatrix::new(c.dc(1));
        let full = u.apply(&m, c.basis(2), Exec::Parallel).unwrap();
        let s = Sampled {
            tf: &tf,
            grid: &grid,
        };
        let lazy = Applied { op: &m, inner: &s };
        for i in (0..grid.len()).step_by(7) {
            let mut idx = grid.multi_index(i);
            for r in 0..2 {
                let v = lazy.value(r, &mut idx);
                assert!((v - full.data()[r][i]).abs() <= 1e-10 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn norms() {
        let c = RuminComplex::new(1).unwrap();
        let grid = Grid::cube(1, 1.5, 49, 49).unwrap();
        let u = FormField::sample(
            &TestForm::bump(1, 0, 1),
            &grid,
            c.basis(0),
            1,
            Exec::Parallel,
        )
        .unwrap();
        let l1 = u.lp_norm(1.0, Exec::Parallel);
        let direct: f64 = u.data()[0].iter().map(|v| v.abs()).sum::<f64>() * grid.cell_volume();
        assert!((l1 - direct).abs() <= 1e-12 * direct);
        assert!((l1 - bump_integral(3)).abs() <= 0.01 * bump_integral(3));

        for c in [2.0, -0.5] {
            for p in [1.0, 2.0, f64::INFINITY] {
                assert_eq!(
                    u.scale(c).lp_norm(p, Exec::Parallel),
                    c.abs() * u.lp_norm(p, Exec::Parallel)
                );
            }
        }
        assert_eq!(u.lp_norm(f64::INFINITY, Exec::Parallel), 1.0);
        let l2 = u.lp_norm(2.0, Exec::Parallel);
        assert!(
            (u.lpq_norm(2.0, 2.0, Exec::Parallel) - std::f64::consts::SQRT_2 * l2).abs() < 1e-14
        );
        let z = FormField::zeros(grid.clone(), 0, vec![1.0]);
        assert_eq!(z.lp_norm(3.0, Exec::Parallel), 0.0);
        assert_eq!(z.lpq_norm(2.0, 4.0, Exec::Parallel), 0.0);
    }

    #[test]
    fn lpq_recombines() {
        let c = RuminComplex::new(1).unwrap();
        let grid = Grid::cube(1, 1.5, 17, 17).unwrap();
        let tf = TestForm::random(1, 1, 2, &mut ChaCha8Rng::seed_from_u64(4));
        let u = FormField::sample(&tf, &grid, c.basis(1), 1, Exec::Parallel).unwrap();
        let (p2, p4) = (
            u.lp_norm(2.0, Exec::Sequential),
            u.lp_norm(4.0, Exec::Sequential),
        );
        let by_hand = {
            let s2: f64 =
                (0..grid.len()).map(|i| u.pointwise_sq(i)).sum::<f64>() * grid.cell_volume();
            let s4: f64 = (0..grid.len())
                .map(|i| u.pointwise_sq(i).powi(2))
                .sum::<f64>()
                * grid.cell_volume();
            (s2 + s4.sqrt()).sqrt()
        };
        assert!((u.lpq_norm(2.0, 4.0, Exec::Sequential) - by_hand).abs() < 1e-12 * by_hand);
        assert!((p2.hypot(p4) - by_hand).abs() < 1e-12 * by_hand);
    }

    #[test]
    fn gram_weights_enter_the_norm() {
        let grid = Grid::cube(1, 1.0, 5, 5).unwrap();
        let f = FormField::new(
            grid.clone(),
            1,
            vec![1.0, 4.0],
            vec![vec![1.0; grid.len()], vec![1.0; grid.len()]],
        )
        .unwrap();
        assert!((f.lp_norm(f64::INFINITY, Exec::Sequential) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn binary_round_trip() {
        let c = RuminComplex::new(1).unwrap();
        let grid = Grid::cube(1, 1.5, 9, 17).unwrap();
        let u = FormField::sample(
            &TestForm::standard(1, 1, 2),
            &grid,
            c.basis(1),
            1,
            Exec::Parallel,
        )
        .unwrap();
        let mut buf = Vec::new();
        u.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        let back = FormField::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, u);
        assert!(FormField::read_from(&mut &b"nonsense........"[..]).is_err());
    }
}
