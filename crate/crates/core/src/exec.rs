//! Execution policy for data-parallel loops.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] dispatches to
//! rayon; without it every policy runs sequentially. Both policies produce
//! identical results: work is split into fixed chunks and reductions are
//! combined in chunk order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

const CHUNK: usize = 4096;

impl Exec {
    /// Fills `out[i] = f(i)`.
    pub fn fill<F>(self, out: &mut [f64], f: F)
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => out
                .par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| {
                    let base = c * CHUNK;
                    for (j, v) in chunk.iter_mut().enumerate() {
                        *v = f(base + j);
                    }
                }),
            _ => {
                for (i, v) in out.iter_mut().enumerate() {
                    *v = f(i);
                }
            }
        }
    }

    /// Calls `f(j, line)` on consecutive lines `out[j·width..(j+1)·width]`.
    pub fn fill_lines<F>(self, out: &mut [f64], width: usize, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => out
                .par_chunks_mut(width)
                .enumerate()
                .with_min_len(CHUNK / width.max(1) + 1)
                .for_each(|(j, l)| f(j, l)),
            _ => out.chunks_mut(width).enumerate().for_each(|(j, l)| f(j, l)),
        }
    }

    /// `out[i] += c·x[i]`.
    pub fn axpy(self, out: &mut [f64], c: f64, x: &[f64]) {
        assert_eq!(out.len(), x.len());
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                out.par_chunks_mut(CHUNK)
                    .zip(x.par_chunks(CHUNK))
                    .for_each(|(o, x)| {
                        for (v, w) in o.iter_mut().zip(x) {
                            *v += c * w;
                        }
                    })
            }
            _ => {
                for (v, w) in out.iter_mut().zip(x) {
                    *v += c * w;
                }
            }
        }
    }

    /// `Σᵢ f(i)` for `i < len`, summed per chunk and then across chunks in
    /// order so the result does not depend on the policy.
    pub fn sum<F>(self, len: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let chunks = len.div_ceil(CHUNK);
        let partial = |c: usize| {
            let end = ((c + 1) * CHUNK).min(len);
            (c * CHUNK..end).map(&f).sum::<f64>()
        };
        let parts: Vec<f64> = self.map(chunks, partial);
        parts.into_iter().sum()
    }

    /// `max f(i)`; NaN-free inputs assumed.
    pub fn max<F>(self, len: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let chunks = len.div_ceil(CHUNK);
        let partial = |c: usize| {
            let end = ((c + 1) * CHUNK).min(len);
            (c * CHUNK..end).map(&f).fold(0.0_f64, f64::max)
        };
        self.map(chunks, partial).into_iter().fold(0.0, f64::max)
    }

    /// Ordered `map` over `0..len`.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..len).into_par_iter().map(f).collect(),
            _ => (0..len).map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin();
        let n = 3 * CHUNK + 17;
        assert_eq!(
            Exec::Sequential.sum(n, f).to_bits(),
            Exec::Parallel.sum(n, f).to_bits()
        );
        assert_eq!(Exec::Sequential.max(n, f), Exec::Parallel.max(n, f));
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        Exec::Sequential.fill(&mut a, f);
        Exec::Parallel.fill(&mut b, f);
        assert_eq!(a, b);
    }
}
