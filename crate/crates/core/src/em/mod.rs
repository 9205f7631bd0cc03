//! Wave context, geometry primitives, incident plane waves, scatterer
//! contrast and the scalar/dyadic Green's functions.

mod contrast;
mod green;
mod incident;

pub use contrast::{Aabb, ContrastField, Shape, ShapeKind};
pub use green::{
    green_scalar, green_scalar_at, green_tensor, green_tensor_at, im_green_tensor,
    im_trace_green_tensor,
};
pub use incident::{incident_field, IncidentPlaneWave};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Spatial dimension, wavenumber and wavelength of a time-harmonic problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveContext {
    dim: usize,
    wavenumber: f64,
    wavelength: f64,
}

impl WaveContext {
    pub fn new(dim: usize, wavelength: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::Domain(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self {
            dim,
            wavenumber: TAU / wavelength,
            wavelength,
        })
    }

    pub fn from_wavenumber(dim: usize, wavenumber: f64) -> Result<Self> {
        if !(wavenumber > 0.0 && wavenumber.is_finite()) {
            return Err(Error::Domain(format!(
                "wavenumber must be positive, got {wavenumber}"
            )));
        }
        Self::new(dim, TAU / wavenumber).map(|c| Self { wavenumber, ..c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub(crate) fn check(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Domain(format!("dimension must be 2 or 3, got {dim}")))
    }
}

/// A point in the plane or in space. Unused trailing coordinates are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        check_dim(coords.len())?;
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: c,
            dim: coords.len(),
        })
    }

    pub const fn xy(x: f64, y: f64) -> Self {
        Self {
            coords: [x, y, 0.0],
            dim: 2,
        }
    }

    pub const fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self {
            coords: [x, y, z],
            dim: 3,
        }
    }

    pub(crate) const fn from_array(coords: [f64; 3], dim: usize) -> Self {
        Self { coords, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub(crate) fn raw(&self) -> &[f64; 3] {
        &self.coords
    }

    /// Componentwise difference `self - other`.
    pub fn sub(&self, other: &Point) -> [f64; 3] {
        [
            self.coords[0] - other.coords[0],
            self.coords[1] - other.coords[1],
            self.coords[2] - other.coords[2],
        ]
    }

    pub fn distance(&self, other: &Point) -> f64 {
        norm3(&self.sub(other))
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.coords)
    }
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// A complex d-vector, e.g. an electric field value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    v: [Complex64; 3],
    dim: usize,
}

impl FieldVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            v: [Complex64::new(0.0, 0.0); 3],
            dim,
        }
    }

    pub fn new(values: &[Complex64]) -> Result<Self> {
        check_dim(values.len())?;
        let mut v = Self::zeros(values.len());
        v.v[..values.len()].copy_from_slice(values);
        Ok(v)
    }

    pub(crate) const fn from_array(v: [Complex64; 3], dim: usize) -> Self {
        Self { v, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Complex64] {
        &self.v[..self.dim]
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Complex64] {
        &mut self.v[..self.dim]
    }

    /// Euclidean norm `sqrt(sum |v_i|^2)`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components().iter().map(|c| c.norm_sqr()).sum()
    }

    /// Hermitian product `sum_i self_i * conj(other_i)`.
    pub fn inner(&self, other: &FieldVector) -> Complex64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Bilinear product `sum_i self_i * other_i` (no conjugation).
    pub fn dot(&self, other: &FieldVector) -> Complex64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.components_mut().iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn add(&self, other: &FieldVector) -> Self {
        let mut out = *self;
        for (a, b) in out.components_mut().iter_mut().zip(other.components()) {
            *a += b;
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        out.components_mut().iter_mut().for_each(|c| *c = c.conj());
        out
    }
}

impl std::ops::Index<usize> for FieldVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.components()[i]
    }
}

/// A complex d×d matrix such as the dyadic Green's function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    m: [[Complex64; 3]; 3],
    dim: usize,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            m: [[Complex64::new(0.0, 0.0); 3]; 3],
            dim,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.m[i][i] = Complex64::new(1.0, 0.0);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.m[i][j] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] = self.m[j][i];
            }
        }
        out
    }

    /// Product with a real vector, e.g. a polarization.
    pub fn mul_real(&self, q: &[f64]) -> FieldVector {
        let mut out = FieldVector::zeros(self.dim);
        for i in 0..self.dim {
            out.v[i] = (0..self.dim).map(|j| self.m[i][j] * q[j]).sum();
        }
        out
    }

    pub fn mul_vec(&self, q: &FieldVector) -> FieldVector {
        let mut out = FieldVector::zeros(self.dim);
        for i in 0..self.dim {
            out.v[i] = (0..self.dim).map(|j| self.m[i][j] * q.v[j]).sum();
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] = f(self.m[i][j]);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_relation() {
        for lambda in [0.3, 1.0, 2.5] {
            let ctx = WaveContext::new(2, lambda).unwrap();
            assert!((ctx.wavenumber() * ctx.wavelength() - TAU).abs() < 1e-15);
        }
        let ctx = WaveContext::from_wavenumber(3, TAU).unwrap();
        assert_eq!(ctx.wavelength(), 1.0);
        assert!(WaveContext::new(4, 1.0).is_err());
        assert!(WaveContext::new(2, 0.0).is_err());
    }

    #[test]
    fn point_dimension() {
        assert!(Point::new(&[1.0]).is_err());
        assert_eq!(Point::new(&[1.0, 2.0]).unwrap(), Point::xy(1.0, 2.0));
        assert_eq!(Point::xyz(1.0, 2.0, 2.0).norm(), 3.0);
    }
}
