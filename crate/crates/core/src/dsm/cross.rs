use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{IndexGrid, IndexLabel, SamplingGrid};
use super::index::check_grid_inside;
use crate::em::{green_tensor_at, ComplexMatrix, Point, WaveContext};
use crate::error::{Error, Result};
use crate::measurement::MeasurementSurface;

/// Which correlation `<f(Φ(·,x_p)), f(Φ(·,x_q))>` to map. Component indices
/// are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CrossSelector {
    Component { i: usize, j: usize },
    /// `Σ_i <Φ_ii, Φ_ii>`, summed before the modulus.
    DiagonalSum,
    Polarization { q: Vec<f64> },
    /// `Σ_l <Φ q_l, Φ q_l>`, summed before the modulus.
    PolarizationSum { qs: Vec<Vec<f64>> },
}

impl CrossSelector {
    pub fn name(&self) -> String {
        match self {
            CrossSelector::Component { i, j } => format!("component_{}{}", i + 1, j + 1),
            CrossSelector::DiagonalSum => "diagonal_sum".into(),
            CrossSelector::Polarization { q } => format!("polarization_{q:?}"),
            CrossSelector::PolarizationSum { .. } => "polarization_sum".into(),
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        let bad_q = |q: &Vec<f64>| q.len() != d;
        match self {
            CrossSelector::Component { i, j } if *i >= d || *j >= d => {
                Err(Error::Domain(format!("component ({i},{j}) out of range for dimension {d}")))
            }
            CrossSelector::Polarization { q } if bad_q(q) => {
                Err(Error::DimensionMismatch { expected: d, found: q.len() })
            }
            CrossSelector::PolarizationSum { qs } if qs.is_empty() => Err(Error::Empty("no polarizations".into())),
            CrossSelector::PolarizationSum { qs } if qs.iter().any(bad_q) => {
                Err(Error::Domain("polarization of the wrong dimension".into()))
            }
            _ => Ok(()),
        }
    }

    /// Pointwise `f(A) · conj(f(B))` summed over the selected entries.
    fn pair(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
        let d = a.dim();
        match self {
            CrossSelector::Component { i, j } => a.get(*i, *j) * b.get(*i, *j).conj(),
            CrossSelector::DiagonalSum => (0..d).map(|i| a.get(i, i) * b.get(i, i).conj()).sum(),
            CrossSelector::Polarization { q } => a.mul_real(q).inner(&b.mul_real(q)),
            CrossSelector::PolarizationSum { qs } => qs.iter().map(|q| a.mul_real(q).inner(&b.mul_real(q))).sum(),
        }
    }
}

/// Max-normalized modulus of the selected surface correlation between the
/// probe at each sampling point and the probe at `x_q`.
pub fn cross_product_map(
    ctx: &WaveContext,
    surface: &MeasurementSurface,
    x_q: &Point,
    grid: &SamplingGrid,
    selector: &CrossSelector,
) -> Result<IndexGrid> {
    let d = surface.dim();
    ctx.check(d)?;
    selector.validate(d)?;
    if !surface.encloses(x_q) {
        return Err(Error::Geometry(format!("point {:?} is not inside the surface", x_q.coords())));
    }
    check_grid_inside(surface, grid)?;
    let at_q: Vec<ComplexMatrix> = surface.points().iter().map(|x| green_tensor_at(ctx, &x.sub(x_q))).collect();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xp = grid.point(i);
            surface
                .points()
                .iter()
                .zip(surface.weights())
                .zip(&at_q)
                .map(|((x, w), bq)| selector.pair(&green_tensor_at(ctx, &x.sub(&xp)), bq) * *w)
                .sum::<Complex64>()
                .norm()
        })
        .collect();
    let raw = IndexGrid::new(grid.clone(), values, IndexLabel::Map { name: selector.name() })?;
    Ok(raw.normalized())
}
