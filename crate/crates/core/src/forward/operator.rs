use num_complex::Complex64;
use rayon::prelude::*;

use super::VolumeGrid;
use crate::em::WaveContext;
use crate::error::{Error, Result};

/// Finite-difference approximation of `k² J + grad div J` on a volume grid,
/// with zero extension past the grid edge. Fields are stored node-major:
/// entry `node * d + component`.
#[derive(Debug, Clone)]
pub struct POperator {
    grid: VolumeGrid,
    k2: f64,
    inv_h2: f64,
}

/// One nonzero of the operator: `(PJ)[node, out] += weight * J[source, input]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilEntry {
    pub out: usize,
    pub source: usize,
    pub input: usize,
    pub weight: f64,
}

pub fn assemble_p_operator(grid: &VolumeGrid, ctx: &WaveContext) -> Result<POperator> {
    ctx.check(grid.dim())?;
    if grid.counts().iter().any(|&n| n < 3) {
        return Err(Error::Stencil(grid.counts().to_vec()));
    }
    let h = grid.mesh_size();
    Ok(POperator {
        grid: grid.clone(),
        k2: ctx.wavenumber().powi(2),
        inv_h2: 1.0 / (h * h),
    })
}

impl POperator {
    pub fn grid(&self) -> &VolumeGrid {
        &self.grid
    }

    fn shifted(&self, idx: [usize; 3], moves: &[(usize, i64)]) -> Option<usize> {
        let counts = self.grid.counts3();
        let mut m = idx;
        for &(axis, step) in moves {
            let v = m[axis] as i64 + step;
            if v < 0 || v >= counts[axis] as i64 {
                return None;
            }
            m[axis] = v as usize;
        }
        Some(self.grid.linear_index(m))
    }

    /// Calls `f` for every stencil nonzero of the row block at `node`.
    pub fn for_each_entry(&self, node: usize, mut f: impl FnMut(StencilEntry)) {
        let d = self.grid.dim();
        let idx = self.grid.multi_index(node);
        let ih2 = self.inv_h2;
        for out in 0..d {
            f(StencilEntry { out, source: node, input: out, weight: self.k2 - 2.0 * ih2 });
            for s in [-1, 1] {
                if let Some(src) = self.shifted(idx, &[(out, s)]) {
                    f(StencilEntry { out, source: src, input: out, weight: ih2 });
                }
            }
            for input in (0..d).filter(|&c| c != out) {
                for s in [-1i64, 1] {
                    for t in [-1i64, 1] {
                        if let Some(src) = self.shifted(idx, &[(out, s), (input, t)]) {
                            let weight = 0.25 * ih2 * (s * t) as f64;
                            f(StencilEntry { out, source: src, input, weight });
                        }
                    }
                }
            }
        }
    }

    pub fn apply(&self, field: &[Complex64]) -> Vec<Complex64> {
        let d = self.grid.dim();
        assert_eq!(field.len(), d * self.grid.len(), "field length");
        let mut out = vec![Complex64::new(0.0, 0.0); field.len()];
        out.par_chunks_mut(d).enumerate().for_each(|(node, row)| {
            self.for_each_entry(node, |e| {
                row[e.out] += field[e.source * d + e.input] * e.weight;
            });
        });
        out
    }
}
