use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform box `[−R_xy, R_xy]^{2n} × [−R_t, R_t]` with `t` the fastest axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub half_xy: f64,
    pub half_t: f64,
    pub nodes_xy: usize,
    pub nodes_t: usize,
}

impl Grid {
    pub fn new(
        n: usize,
        half_xy: f64,
        half_t: f64,
        nodes_xy: usize,
        nodes_t: usize,
    ) -> Result<Self> {
        if nodes_xy < 5 || nodes_t < 5 {
            return Err(Error::GridMismatch(format!(
                "need at least 5 nodes per axis, got {nodes_xy}/{nodes_t}"
            )));
        }
        if !(half_xy > 0.0 && half_t > 0.0) {
            return Err(Error::GridMismatch(
                "box half-widths must be positive".into(),
            ));
        }
        Ok(Self {
            n,
            half_xy,
            half_t,
            nodes_xy,
            nodes_t,
        })
    }

    /// Cube of half-width `half` on both strata.
    pub fn cube(n: usize, half: f64, nodes_xy: usize, nodes_t: usize) -> Result<Self> {
        Self::new(n, half, half, nodes_xy, nodes_t)
    }

    /// Node counts used when none are given: 65 × 129 for `n = 1`, and
    /// 21 per axis for `n = 2` (a 5-dimensional array of 65 × 129 would not fit).
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Self::cube(1, 1.5, 65, 129),
            2 => Self::cube(2, 1.5, 21, 21),
            _ => Err(Error::UnsupportedN(n)),
        }
    }

    /// Node counts for a given horizontal resolution: `t` gets `2N − 1`
    /// nodes when `n = 1` and `N` otherwise.
    pub fn with_nodes(n: usize, half: f64, nodes_xy: usize) -> Result<Self> {
        let nodes_t = if n == 1 { 2 * nodes_xy - 1 } else { nodes_xy };
        Self::cube(n, half, nodes_xy, nodes_t)
    }

    pub fn axes(&self) -> usize {
        2 * self.n + 1
    }

    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.nodes_xy; 2 * self.n];
        s.push(self.nodes_t);
        s
    }

    pub fn len(&self) -> usize {
        self.nodes_xy.pow(2 * self.n as u32) * self.nodes_t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing_xy(&self) -> f64 {
        2.0 * self.half_xy / (self.nodes_xy - 1) as f64
    }

    pub fn spacing_t(&self) -> f64 {
        2.0 * self.half_t / (self.nodes_t - 1) as f64
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        if axis == 2 * self.n {
            self.spacing_t()
        } else {
            self.spacing_xy()
        }
    }

    pub fn nodes(&self, axis: usize) -> usize {
        if axis == 2 * self.n {
            self.nodes_t
        } else {
            self.nodes_xy
        }
    }

    fn half(&self, axis: usize) -> f64 {
        if axis == 2 * self.n {
            self.half_t
        } else {
            self.half_xy
        }
    }

    /// Flat-index stride of an axis.
    pub fn stride(&self, axis: usize) -> usize {
        if axis == 2 * self.n {
            1
        } else {
            self.nodes_t * self.nodes_xy.pow((2 * self.n - 1 - axis) as u32)
        }
    }

    pub fn coord(&self, axis: usize, i: i64) -> f64 {
        -self.half(axis) + i as f64 * self.spacing(axis)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing_xy().powi(2 * self.n as i32) * self.spacing_t()
    }

    pub fn contains(&self, idx: &[i64]) -> bool {
        idx.iter()
            .enumerate()
            .all(|(a, &i)| i >= 0 && (i as usize) < self.nodes(a))
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<i64> {
        let mut idx = vec![0i64; self.axes()];
        for a in (0..self.axes()).rev() {
            let m = self.nodes(a);
            idx[a] = (flat % m) as i64;
            flat /= m;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[i64]) -> usize {
        idx.iter()
            .enumerate()
            .map(|(a, &i)| i as usize * self.stride(a))
            .sum()
    }

    pub fn point(&self, idx: &[i64]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(a, &i)| self.coord(a, i))
            .collect()
    }

    /// Halves both spacings; coarse node `i` becomes fine node `2i`.
    pub fn refined(&self) -> Self {
        Self {
            nodes_xy: 2 * self.nodes_xy - 1,
            nodes_t: 2 * self.nodes_t - 1,
            ..self.clone()
        }
    }

    /// The grid carried by `δ_{1/λ}`: node `i` sits at `δ_{1/λ}` of the old node `i`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            half_xy: self.half_xy / lambda,
            half_t: self.half_t / (lambda * lambda),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let g = Grid::cube(1, 1.0, 5, 7).unwrap();
        assert_eq!(g.len(), 175);
        for flat in [0, 1, 6, 7, 100, 174] {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
        }
        assert_eq!(g.stride(2), 1);
        assert_eq!(g.stride(1), 7);
        assert_eq!(g.stride(0), 35);
        assert_eq!(g.coord(0, 0), -1.0);
        assert_eq!(g.coord(0, 4), 1.0);
    }

    #[test]
    fn refinement_nests_nodes() {
        let g = Grid::cube(1, 1.5, 9, 17).unwrap();
        let f = g.refined();
        for i in 0..9 {
            assert_eq!(g.coord(0, i), f.coord(0, 2 * i));
        }
        assert!(Grid::cube(1, 1.0, 4, 9).is_err());
    }
}
