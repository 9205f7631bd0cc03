use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{IndexGrid, IndexLabel, SamplingGrid};
use crate::em::{green_tensor_at, FieldVector, Point, WaveContext};
use crate::error::{Error, Result};
use crate::measurement::{inner_on, FieldSamples, MeasurementSurface, Provenance};

/// Scattered-field data paired with the probing polarization `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: FieldSamples,
    polarization: Vec<f64>,
}

impl Dataset {
    pub fn new(samples: FieldSamples, polarization: &[f64]) -> Result<Self> {
        let d = samples.surface().dim();
        if polarization.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: polarization.len() });
        }
        Ok(Self { samples, polarization: polarization.to_vec() })
    }

    pub fn samples(&self) -> &FieldSamples {
        &self.samples
    }

    pub fn polarization(&self) -> &[f64] {
        &self.polarization
    }
}

fn check_inside(surface: &MeasurementSurface, x: &Point) -> Result<()> {
    if surface.encloses(x) {
        Ok(())
    } else {
        Err(Error::Geometry(format!("sampling point {:?} is not inside the measurement surface", x.coords())))
    }
}

/// `Φ(x_m, x_p) q` at every measurement point.
pub fn probe_field(ctx: &WaveContext, surface: &MeasurementSurface, x_p: &Point, q: &[f64]) -> Result<FieldSamples> {
    ctx.check(surface.dim())?;
    check_inside(surface, x_p)?;
    if q.len() != surface.dim() {
        return Err(Error::DimensionMismatch { expected: surface.dim(), found: q.len() });
    }
    let values = surface
        .points()
        .iter()
        .map(|x| green_tensor_at(ctx, &x.sub(x_p)).mul_real(q))
        .collect();
    FieldSamples::new(surface.clone(), values, Provenance::Exact)
}

/// `|<E^s, Φ(·,x_p)q>| / (‖E^s‖ ‖Φ(·,x_p)q‖)`.
pub fn index_psi(ctx: &WaveContext, data: &FieldSamples, x_p: &Point, q: &[f64]) -> Result<f64> {
    let dn = data.l2_norm();
    if dn == 0.0 {
        return Err(Error::DegenerateData("scattered-field data vanish".into()));
    }
    let probe = probe_field(ctx, data.surface(), x_p, q)?;
    let num = inner_on(data.surface().weights(), data.values(), probe.values()).norm();
    Ok((num / (dn * probe.l2_norm())).min(1.0))
}

/// Mean of `index_psi` over the datasets, each with its own `q`.
pub fn index_combined(ctx: &WaveContext, datasets: &[Dataset], x_p: &Point) -> Result<f64> {
    if datasets.is_empty() {
        return Err(Error::Empty("no datasets for the combined index".into()));
    }
    let mut sum = 0.0;
    for ds in datasets {
        sum += index_psi(ctx, &ds.samples, x_p, &ds.polarization)?;
    }
    Ok(sum / datasets.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexMode {
    PerPolarization,
    Combined,
}

/// Every per-polarization index and their mean over one sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSweep {
    pub per_polarization: Vec<IndexGrid>,
    pub combined: IndexGrid,
}

pub(crate) fn check_grid_inside(surface: &MeasurementSurface, grid: &SamplingGrid) -> Result<()> {
    let b = grid.bounds();
    let d = grid.dim();
    for corner in 0..(1usize << d) {
        let c: Vec<f64> = (0..d).map(|a| if corner >> a & 1 == 1 { b.max[a] } else { b.min[a] }).collect();
        check_inside(surface, &Point::new(&c)?)?;
    }
    Ok(())
}

/// Evaluates all indices over the grid in one pass: `Φ(x_m, x_p)` is built
/// once per pair and shared by the datasets.
pub fn sweep_indices(ctx: &WaveContext, datasets: &[Dataset], grid: &SamplingGrid) -> Result<IndexSweep> {
    let first = datasets.first().ok_or_else(|| Error::Empty("no datasets to sweep".into()))?;
    let surface = first.samples.surface();
    if datasets.iter().any(|ds| ds.samples.surface() != surface) {
        return Err(Error::SurfaceMismatch);
    }
    let d = surface.dim();
    ctx.check(d)?;
    if grid.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: grid.dim() });
    }
    check_grid_inside(surface, grid)?;
    let norms: Vec<f64> = datasets.iter().map(|ds| ds.samples.l2_norm()).collect();
    if norms.contains(&0.0) {
        return Err(Error::DegenerateData("scattered-field data vanish".into()));
    }
    // conjugated data, weights folded in
    let weighted: Vec<Vec<FieldVector>> = datasets
        .iter()
        .map(|ds| {
            ds.samples
                .values()
                .iter()
                .zip(surface.weights())
                .map(|(v, w)| v.conj().scale(Complex64::new(*w, 0.0)))
                .collect()
        })
        .collect();
    let l = datasets.len();
    let per_point: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xp = grid.point(i);
            let mut num = vec![Complex64::new(0.0, 0.0); l];
            let mut den = vec![0.0; l];
            for (m, (x, w)) in surface.points().iter().zip(surface.weights()).enumerate() {
                let phi = green_tensor_at(ctx, &x.sub(&xp));
                for (s, ds) in datasets.iter().enumerate() {
                    let v = phi.mul_real(&ds.polarization);
                    num[s] += v.dot(&weighted[s][m]);
                    den[s] += w * v.norm_sqr();
                }
            }
            (0..l).map(|s| (num[s].norm() / (norms[s] * den[s].sqrt())).min(1.0)).collect()
        })
        .collect();
    let per_polarization = (0..l)
        .map(|s| {
            let vals = per_point.iter().map(|v| v[s]).collect();
            IndexGrid::new(
                grid.clone(),
                vals,
                IndexLabel::SinglePolarization { q: datasets[s].polarization.clone() },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let combined_vals = per_point.iter().map(|v| v.iter().sum::<f64>() / l as f64).collect();
    let combined = IndexGrid::new(grid.clone(), combined_vals, IndexLabel::Combined)?;
    Ok(IndexSweep { per_polarization, combined })
}

pub fn compute_index_grid(
    ctx: &WaveContext,
    datasets: &[Dataset],
    grid: &SamplingGrid,
    mode: IndexMode,
) -> Result<Vec<IndexGrid>> {
    let sweep = sweep_indices(ctx, datasets, grid)?;
    Ok(match mode {
        IndexMode::PerPolarization => sweep.per_polarization,
        IndexMode::Combined => vec![sweep.combined],
    })
}
