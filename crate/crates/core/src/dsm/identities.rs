use num_complex::Complex64;
use serde::Serialize;

use crate::em::{green_tensor_at, im_green_tensor, FieldVector, Point, WaveContext};
use crate::error::{Error, Result};
use crate::measurement::{circle_surface, MeasurementSurface, SurfaceDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub radius: f64,
    pub points: usize,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub err: f64,
}

fn distance_to_surface(surface: &MeasurementSurface, x: &Point) -> f64 {
    match *surface.descriptor() {
        SurfaceDescriptor::Circle { radius, .. } => radius - x.norm(),
        SurfaceDescriptor::CubeFaces { edge, .. } => {
            0.5 * edge - x.coords().iter().map(|c| c.abs()).fold(0.0, f64::max)
        }
    }
}

/// `x ↦ Φ(x, y) v` as a 3-slot complex vector.
fn column(ctx: &WaveContext, x: &[f64; 3], y: &Point, v: &[f64]) -> [Complex64; 3] {
    let mut diff = [0.0; 3];
    for a in 0..ctx.dim() {
        diff[a] = x[a] - y.coords()[a];
    }
    let f = green_tensor_at(ctx, &diff).mul_real(v);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    out[..ctx.dim()].copy_from_slice(f.components());
    out
}

/// `∇ × (Φ(·,y) v)` at `x` by fourth-order central differences; in 2D only
/// the third component is nonzero.
fn curl(ctx: &WaveContext, x: &[f64; 3], y: &Point, v: &[f64], step: f64) -> [Complex64; 3] {
    let d = ctx.dim();
    // jac[a][b] = ∂_a F_b
    let mut jac = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (a, row) in jac.iter_mut().enumerate().take(d) {
        let at = |s: f64| {
            let mut z = *x;
            z[a] += s * step;
            column(ctx, &z, y, v)
        };
        let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
        for b in 0..3 {
            row[b] = (8.0 * (p1[b] - m1[b]) - (p2[b] - m2[b])) / (12.0 * step);
        }
    }
    [
        jac[1][2] - jac[2][1],
        jac[2][0] - jac[0][2],
        jac[0][1] - jac[1][0],
    ]
}

fn cross(a: &[Complex64; 3], n: &[f64; 3]) -> [Complex64; 3] {
    [
        a[1] * n[2] - a[2] * n[1],
        a[2] * n[0] - a[0] * n[2],
        a[0] * n[1] - a[1] * n[0],
    ]
}

fn bilinear(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn conj3(a: &[Complex64; 3]) -> [Complex64; 3] {
    a.map(|z| z.conj())
}

/// Real bilinear `(p, Im Φ(x_p, x_q) q)`.
fn im_form(ctx: &WaveContext, x_p: &Point, x_q: &Point, p: &[f64], q: &[f64]) -> Result<f64> {
    let im = im_green_tensor(ctx, x_p, x_q)?;
    let d = ctx.dim();
    Ok((0..d).map(|i| (0..d).map(|j| p[i] * im[i][j] * q[j]).sum::<f64>()).sum())
}

/// Compares the surface integral
/// `∫ (∇×Φ̄(·,x_q)q × n, Φ(·,x_p)p) − (∇×Φ(·,x_p)p × n, Φ̄(·,x_q)q) ds`
/// with `−2i k² (p, Im Φ(x_p,x_q) q)`. With `Φ = k²G I + D²G` the point
/// source carries a factor k², which is why it appears on the right.
pub fn verify_boundary_lemma(
    ctx: &WaveContext,
    surface: &MeasurementSurface,
    x_p: &Point,
    x_q: &Point,
    p: &[f64],
    q: &[f64],
) -> Result<LemmaCheck> {
    let d = surface.dim();
    ctx.check(d)?;
    for v in [p, q] {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
    }
    if x_p.distance(x_q) == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let lambda = ctx.wavelength();
    for x in [x_p, x_q] {
        if !surface.encloses(x) || distance_to_surface(surface, x) < lambda {
            return Err(Error::Geometry(format!(
                "point {:?} must lie inside the surface at least one wavelength from it",
                x.coords()
            )));
        }
    }
    let step = 1e-4 * lambda;
    let mut lhs = Complex64::new(0.0, 0.0);
    for (m, (x, w)) in surface.points().iter().zip(surface.weights()).enumerate() {
        let n = surface.outward_normal(m);
        let xr = x.raw();
        let fp = column(ctx, xr, x_p, p);
        let fq_bar = conj3(&column(ctx, xr, x_q, q));
        let curl_q_bar = conj3(&curl(ctx, xr, x_q, q, step));
        let curl_p = curl(ctx, xr, x_p, p, step);
        lhs += (bilinear(&cross(&curl_q_bar, &n), &fp) - bilinear(&cross(&curl_p, &n), &fq_bar)) * *w;
    }
    let k2 = ctx.wavenumber().powi(2);
    let rhs = Complex64::new(0.0, -2.0 * k2 * im_form(ctx, x_p, x_q, p, q)?);
    let rel_err = (lhs - rhs).norm() / rhs.norm();
    Ok(LemmaCheck { lhs, rhs, rel_err })
}

/// Circle of radius `r` with enough points to resolve the integrand.
fn surface_for_radius(ctx: &WaveContext, r: f64) -> Result<MeasurementSurface> {
    let kr = ctx.wavenumber() * r;
    circle_surface(r, (8.0 * kr).ceil().max(64.0) as usize)
}

/// Tabulates `∫_Γ (Φ(·,x_p)p, conj(Φ(·,x_q)q)) ds` against
/// `k (p, Im Φ(x_p,x_q) q)` over the given radii; `err` is relative to the
/// right side. Circles only: the relation rests on the normal being radial.
pub fn verify_correlation_approx(
    ctx: &WaveContext,
    radii: &[f64],
    x_p: &Point,
    x_q: &Point,
    p: &[f64],
    q: &[f64],
) -> Result<Vec<CorrelationRow>> {
    if ctx.dim() != 2 {
        return Err(Error::Domain("the correlation table is defined on circles (2D)".into()));
    }
    let rhs = Complex64::new(ctx.wavenumber() * im_form(ctx, x_p, x_q, p, q)?, 0.0);
    radii
        .iter()
        .map(|&r| {
            let s = surface_for_radius(ctx, r)?;
            if !s.encloses(x_p) || !s.encloses(x_q) {
                return Err(Error::Geometry(format!("radius {r} does not enclose the points")));
            }
            let lhs = s
                .points()
                .iter()
                .zip(s.weights())
                .map(|(x, w)| {
                    let a: FieldVector = green_tensor_at(ctx, &x.sub(x_p)).mul_real(p);
                    let b: FieldVector = green_tensor_at(ctx, &x.sub(x_q)).mul_real(q);
                    a.inner(&b) * *w
                })
                .sum::<Complex64>();
            Ok(CorrelationRow { radius: r, points: s.len(), lhs, rhs, err: (lhs - rhs).norm() / rhs.norm() })
        })
        .collect()
}
