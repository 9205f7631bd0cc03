use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gmres::{gmres, GmresOptions};
use super::operator::{assemble_p_operator, POperator, StencilEntry};
use super::{build_grid, diagonal_self_term, VolumeGrid};
use crate::em::{green_scalar_at, ContrastField, FieldVector, IncidentPlaneWave, WaveContext};
use crate::error::{Error, Result};

/// Largest active system the automatic choice hands to the dense solver.
pub const DENSE_LIMIT: usize = 6000;
const DENSE_RESIDUAL_TOL: f64 = 1e-8;
const CONDITION_LIMIT: f64 = 1e14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Solver {
    /// Dense when the active system has at most [`DENSE_LIMIT`] unknowns,
    /// otherwise GMRES with default options.
    Auto,
    Dense,
    Gmres(GmresOptions),
}

impl Default for Solver {
    fn default() -> Self {
        Solver::Auto
    }
}

/// Discretized current equation
/// `J_k - η_k h^d Σ_j G_kj (PJ)_j = η_k E^i(x_k)` on a volume grid.
#[derive(Debug, Clone)]
pub struct ForwardSystem {
    ctx: WaveContext,
    grid: VolumeGrid,
    eta: Vec<Complex64>,
    active: Vec<usize>,
    p: POperator,
    /// Green's function by absolute node offset per axis.
    table: Vec<Complex64>,
}

/// Induced current at the nodes of a volume grid, node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedCurrentField {
    grid: VolumeGrid,
    values: Vec<Complex64>,
}

impl InducedCurrentField {
    /// Wraps node-major values; entries where the contrast vanishes are the
    /// caller's responsibility.
    pub fn from_values(grid: VolumeGrid, values: Vec<Complex64>) -> Result<Self> {
        let n = grid.dim() * grid.len();
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &VolumeGrid {
        &self.grid
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, node: usize) -> FieldVector {
        let d = self.grid.dim();
        FieldVector::new(&self.values[node * d..(node + 1) * d]).expect("valid dimension")
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.grid.len()).map(|n| self.value(n).norm()).fold(0.0, f64::max)
    }
}

impl ForwardSystem {
    /// Grid of mesh size `h` over the contrast's bounding box, grown by
    /// `halo` empty layers so the stencil of `PJ` is not cut off at the
    /// scatterer boundary.
    pub fn assemble(contrast: &ContrastField, ctx: &WaveContext, h: f64, halo: usize) -> Result<Self> {
        let grid = build_grid(contrast, h)?.padded(halo);
        ctx.check(grid.dim())?;
        let eta: Vec<Complex64> = grid.nodes().map(|x| contrast.eval(&x)).collect();
        Self::from_parts(ctx, grid, eta)
    }

    pub fn from_parts(ctx: &WaveContext, grid: VolumeGrid, eta: Vec<Complex64>) -> Result<Self> {
        if eta.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: eta.len() });
        }
        let p = assemble_p_operator(&grid, ctx)?;
        let active = (0..grid.len()).filter(|&i| eta[i] != ZERO).collect();
        let table = green_table(ctx, &grid);
        Ok(Self { ctx: *ctx, grid, eta, active, p, table })
    }

    pub fn grid(&self) -> &VolumeGrid {
        &self.grid
    }

    pub fn contrast_at_nodes(&self) -> &[Complex64] {
        &self.eta
    }

    pub fn system_dimension(&self) -> usize {
        self.grid.dim() * self.grid.len()
    }

    /// Unknowns left after eliminating the trivial rows `J_k = 0`.
    pub fn active_dimension(&self) -> usize {
        self.grid.dim() * self.active.len()
    }

    fn green(&self, a: usize, b: usize) -> Complex64 {
        let ma = self.grid.multi_index(a);
        let mb = self.grid.multi_index(b);
        let off = [ma[0].abs_diff(mb[0]), ma[1].abs_diff(mb[1]), ma[2].abs_diff(mb[2])];
        self.table[self.grid.linear_index(off)]
    }

    /// Applies the full system operator to a node-major field.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let d = self.grid.dim();
        let pj = self.p.apply(x);
        let sources: Vec<usize> = (0..self.grid.len())
            .filter(|&j| pj[j * d..(j + 1) * d].iter().any(|z| *z != ZERO))
            .collect();
        y.copy_from_slice(x);
        let hd = self.grid.cell_measure();
        let updates: Vec<[Complex64; 3]> = self
            .active
            .par_iter()
            .map(|&k| {
                let mut s = [ZERO; 3];
                for &j in &sources {
                    let g = self.green(k, j);
                    for c in 0..d {
                        s[c] += g * pj[j * d + c];
                    }
                }
                s
            })
            .collect();
        for (&k, s) in self.active.iter().zip(&updates) {
            let f = self.eta[k] * hd;
            for c in 0..d {
                y[k * d + c] -= f * s[c];
            }
        }
    }

    pub fn rhs(&self, wave: &IncidentPlaneWave) -> Result<Vec<Complex64>> {
        if wave.dim() != self.grid.dim() {
            return Err(Error::DimensionMismatch { expected: self.grid.dim(), found: wave.dim() });
        }
        let d = self.grid.dim();
        let k = self.ctx.wavenumber();
        let mut b = vec![ZERO; self.system_dimension()];
        for &n in &self.active {
            let e = wave.field_unchecked(k, self.grid.node(n).raw());
            for c in 0..d {
                b[n * d + c] = self.eta[n] * e[c];
            }
        }
        Ok(b)
    }

    /// Reduced dense matrix on the active unknowns.
    pub fn dense_matrix(&self) -> DMatrix<Complex64> {
        let d = self.grid.dim();
        let na = self.active.len();
        let mut position = vec![usize::MAX; self.grid.len()];
        for (i, &n) in self.active.iter().enumerate() {
            position[n] = i;
        }
        // stencil rows of P restricted to active sources
        let rows: Vec<(usize, Vec<StencilEntry>)> = (0..self.grid.len())
            .filter_map(|j| {
                let mut es = Vec::new();
                self.p.for_each_entry(j, |e| {
                    if position[e.source] != usize::MAX {
                        es.push(StencilEntry { source: position[e.source], ..e });
                    }
                });
                (!es.is_empty()).then_some((j, es))
            })
            .collect();
        let hd = self.grid.cell_measure();
        let m = d * na;
        let blocks: Vec<Vec<Complex64>> = self
            .active
            .par_iter()
            .enumerate()
            .map(|(ka, &k)| {
                let mut block = vec![ZERO; d * m];
                let f = -self.eta[k] * hd;
                for (j, es) in &rows {
                    let g = self.green(k, *j) * f;
                    for e in es {
                        block[e.out * m + e.source * d + e.input] += g * e.weight;
                    }
                }
                for c in 0..d {
                    block[c * m + ka * d + c] += 1.0;
                }
                block
            })
            .collect();
        DMatrix::from_fn(m, m, |r, c| blocks[r / d][(r % d) * m + c])
    }

    fn choose(&self, solver: &Solver) -> Solver {
        match solver {
            Solver::Auto if self.active_dimension() <= DENSE_LIMIT => Solver::Dense,
            Solver::Auto => Solver::Gmres(GmresOptions::default()),
            s => *s,
        }
    }

    pub fn solve(&self, wave: &IncidentPlaneWave, solver: &Solver) -> Result<InducedCurrentField> {
        Ok(self.solve_many(std::slice::from_ref(wave), solver)?.remove(0))
    }

    /// Solves for several incident waves, factoring the dense matrix once.
    pub fn solve_many(&self, waves: &[IncidentPlaneWave], solver: &Solver) -> Result<Vec<InducedCurrentField>> {
        let rhs: Vec<Vec<Complex64>> = waves.iter().map(|w| self.rhs(w)).collect::<Result<_>>()?;
        let d = self.grid.dim();
        let solutions = match self.choose(solver) {
            Solver::Dense => {
                if self.active.is_empty() {
                    rhs.iter().map(|b| vec![ZERO; b.len()]).collect()
                } else {
                    let a = self.dense_matrix();
                    let lu = a.clone().lu();
                    let diag: Vec<f64> = lu.u().diagonal().iter().map(|z| z.norm()).collect();
                    let hi = diag.iter().cloned().fold(0.0, f64::max);
                    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
                    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
                    if !(condition < CONDITION_LIMIT) {
                        return Err(Error::IllConditioned { condition });
                    }
                    let mut out = Vec::with_capacity(rhs.len());
                    for b in &rhs {
                        let br = DVector::from_iterator(
                            a.nrows(),
                            self.active.iter().flat_map(|&n| (0..d).map(move |c| b[n * d + c])),
                        );
                        let xr = lu.solve(&br).ok_or(Error::IllConditioned { condition })?;
                        let res = (&a * &xr - &br).norm() / br.norm().max(f64::MIN_POSITIVE);
                        if res > DENSE_RESIDUAL_TOL {
                            return Err(Error::IllConditioned { condition });
                        }
                        let mut x = vec![ZERO; b.len()];
                        for (i, &n) in self.active.iter().enumerate() {
                            for c in 0..d {
                                x[n * d + c] = xr[i * d + c];
                            }
                        }
                        out.push(x);
                    }
                    out
                }
            }
            Solver::Gmres(opts) => {
                let mut out = Vec::with_capacity(rhs.len());
                for b in &rhs {
                    let mut x = gmres(|v, w| self.apply(v, w), b, &opts)?.solution;
                    // rows with η = 0 read J = 0; clear round-off there
                    for n in 0..self.grid.len() {
                        if self.eta[n] == ZERO {
                            x[n * d..(n + 1) * d].fill(ZERO);
                        }
                    }
                    out.push(x);
                }
                out
            }
            Solver::Auto => unreachable!("resolved above"),
        };
        Ok(solutions
            .into_iter()
            .map(|values| InducedCurrentField { grid: self.grid.clone(), values })
            .collect())
    }
}

fn green_table(ctx: &WaveContext, grid: &VolumeGrid) -> Vec<Complex64> {
    let h = grid.mesh_size();
    let self_term = diagonal_self_term(ctx, h);
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let m = grid.multi_index(i);
            if i == 0 {
                self_term
            } else {
                let r = h * ((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64).sqrt();
                green_scalar_at(ctx, r)
            }
        })
        .collect()
}

/// Default number of empty layers added around the scatterer box.
pub const DEFAULT_HALO: usize = 1;

pub fn solve_current(
    contrast: &ContrastField,
    wave: &IncidentPlaneWave,
    ctx: &WaveContext,
    h: f64,
    solver: &Solver,
) -> Result<InducedCurrentField> {
    ForwardSystem::assemble(contrast, ctx, h, DEFAULT_HALO)?.solve(wave, solver)
}
