use num_complex::Complex64;

use super::{check_dim, FieldVector, Point, WaveContext};
use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// Plane wave `p exp(i k d.x)` with unit direction `d` and unit polarization
/// `p` orthogonal to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentPlaneWave {
    direction: [f64; 3],
    polarization: [f64; 3],
    dim: usize,
}

impl IncidentPlaneWave {
    pub fn new(direction: &[f64], polarization: &[f64]) -> Result<Self> {
        check_dim(direction.len())?;
        if direction.len() != polarization.len() {
            return Err(Error::DimensionMismatch {
                expected: direction.len(),
                found: polarization.len(),
            });
        }
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = direction.iter().zip(polarization).map(|(a, b)| a * b).sum();
        if (norm(direction) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidIncident(format!(
                "direction {direction:?} is not a unit vector"
            )));
        }
        if (norm(polarization) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidIncident(format!(
                "polarization {polarization:?} is not a unit vector"
            )));
        }
        if dot.abs() > UNIT_TOL {
            return Err(Error::InvalidIncident(format!(
                "polarization is not orthogonal to the direction (d.p = {dot})"
            )));
        }
        let mut d = [0.0; 3];
        let mut p = [0.0; 3];
        d[..direction.len()].copy_from_slice(direction);
        p[..polarization.len()].copy_from_slice(polarization);
        Ok(Self {
            direction: d,
            polarization: p,
            dim: direction.len(),
        })
    }

    /// Like [`IncidentPlaneWave::new`] but normalizes both vectors first.
    pub fn normalized(direction: &[f64], polarization: &[f64]) -> Result<Self> {
        let unit = |v: &[f64]| -> Result<Vec<f64>> {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(n > 0.0) {
                return Err(Error::InvalidIncident("zero vector".into()));
            }
            Ok(v.iter().map(|x| x / n).collect())
        };
        Self::new(&unit(direction)?, &unit(polarization)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction[..self.dim]
    }

    pub fn polarization(&self) -> &[f64] {
        &self.polarization[..self.dim]
    }

    pub(crate) fn field_unchecked(&self, k: f64, x: &[f64; 3]) -> FieldVector {
        let phase = k
            * (self.direction[0] * x[0] + self.direction[1] * x[1] + self.direction[2] * x[2]);
        let e = Complex64::from_polar(1.0, phase);
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for i in 0..self.dim {
            v[i] = e * self.polarization[i];
        }
        FieldVector::from_array(v, self.dim)
    }
}

/// Incident electric field `E^i(x) = p exp(i k d.x)`.
pub fn incident_field(
    wave: &IncidentPlaneWave,
    ctx: &WaveContext,
    x: &Point,
) -> Result<FieldVector> {
    ctx.check(wave.dim())?;
    ctx.check(x.dim())?;
    Ok(wave.field_unchecked(ctx.wavenumber(), x.raw()))
}
