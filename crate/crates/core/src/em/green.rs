//! Scalar Helmholtz kernel `G` and the dyadic kernel `Phi = k^2 G I + D^2 G`.
//!
//! Both tensors are evaluated from their closed forms: Hankel functions of
//! orders 0..=2 in the plane, the explicit exponential bracket in space.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{norm3, ComplexMatrix, Point, WaveContext};
use crate::error::{Error, Result};
use crate::specfun::{bessel_j012, hankel1_012};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `G` as a function of the separation `r > 0`, no checks.
#[inline]
pub fn green_scalar_at(ctx: &WaveContext, r: f64) -> Complex64 {
    let k = ctx.wavenumber();
    if ctx.dim() == 2 {
        I * 0.25 * hankel1_012(k * r)[0]
    } else {
        Complex64::from_polar(1.0 / (4.0 * PI * r), k * r)
    }
}

fn separation(ctx: &WaveContext, x: &Point, y: &Point) -> Result<[f64; 3]> {
    ctx.check(x.dim())?;
    ctx.check(y.dim())?;
    let d = x.sub(y);
    if norm3(&d) == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(d)
}

/// Scalar fundamental solution of `(-Laplace - k^2) G = delta`.
pub fn green_scalar(ctx: &WaveContext, x: &Point, y: &Point) -> Result<Complex64> {
    let d = separation(ctx, x, y)?;
    Ok(green_scalar_at(ctx, norm3(&d)))
}

/// Dyadic kernel for the separation vector `x - y` (nonzero), no checks.
#[inline]
pub fn green_tensor_at(ctx: &WaveContext, diff: &[f64; 3]) -> ComplexMatrix {
    let dim = ctx.dim();
    let k = ctx.wavenumber();
    let r = norm3(diff);
    let u = [diff[0] / r, diff[1] / r, diff[2] / r];
    let (diag, outer) = if dim == 2 {
        let kr = k * r;
        let [h0, h1, h2] = hankel1_012(kr);
        let c = I * (0.25 * k * k);
        (c * (h0 - h1 / kr), c * h2)
    } else {
        let g = Complex64::from_polar(1.0 / (4.0 * PI * r), k * r);
        let b = Complex64::new(-1.0 / (r * r), k / r);
        (g * (b + k * k), g * (-b * 3.0 - k * k))
    };
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut v = outer * (u[i] * u[j]);
            if i == j {
                v += diag;
            }
            m.set(i, j, v);
        }
    }
    m
}

/// Dyadic fundamental solution `Phi(x, y) = k^2 G(x, y) I + D^2 G(x, y)`.
pub fn green_tensor(ctx: &WaveContext, x: &Point, y: &Point) -> Result<ComplexMatrix> {
    let d = separation(ctx, x, y)?;
    Ok(green_tensor_at(ctx, &d))
}

/// `Im Phi(x, y)`, which stays bounded as `y -> x`. Coincident points return
/// the limit `k^2/8 I` (plane) or `k^3/(6 pi) I` (space).
pub fn im_green_tensor(ctx: &WaveContext, x: &Point, y: &Point) -> Result<[[f64; 3]; 3]> {
    ctx.check(x.dim())?;
    ctx.check(y.dim())?;
    let diff = x.sub(y);
    let dim = ctx.dim();
    let k = ctx.wavenumber();
    let r = norm3(&diff);
    let mut out = [[0.0; 3]; 3];

    if dim == 2 {
        if r == 0.0 {
            for (i, row) in out.iter_mut().enumerate().take(2) {
                row[i] = k * k / 8.0;
            }
            return Ok(out);
        }
        let kr = k * r;
        let [j0, j1, j2] = bessel_j012(kr);
        let c = 0.25 * k * k;
        for i in 0..2 {
            for j in 0..2 {
                let mut v = c * j2 * diff[i] * diff[j] / (r * r);
                if i == j {
                    v += c * (j0 - j1 / kr);
                }
                out[i][j] = v;
            }
        }
        return Ok(out);
    }

    if k * r < 0.5 {
        // Im G = f(s), s = r^2, f(s) = k/(4 pi) sum (-1)^n (k^2 s)^n / (2n+1)!
        // Im Phi = k^2 f I + 2 f' I + 4 f'' x x^T
        let s = r * r;
        let ks = k * k;
        let (mut f, mut f1, mut f2) = (0.0, 0.0, 0.0);
        let mut coef = k / (4.0 * PI); // (-1)^n k^{2n} / (2n+1)! * k/(4 pi)
        for n in 0..30 {
            let nf = n as f64;
            f += coef * s.powi(n);
            if n >= 1 {
                f1 += coef * nf * s.powi(n - 1);
            }
            if n >= 2 {
                f2 += coef * nf * (nf - 1.0) * s.powi(n - 2);
            }
            coef *= -ks / ((2.0 * nf + 2.0) * (2.0 * nf + 3.0));
        }
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 4.0 * f2 * diff[i] * diff[j];
                if i == j {
                    v += ks * f + 2.0 * f1;
                }
                out[i][j] = v;
            }
        }
        return Ok(out);
    }

    let (s, c) = (k * r).sin_cos();
    let pref = 1.0 / (4.0 * PI * r);
    for i in 0..3 {
        for j in 0..3 {
            let uu = diff[i] * diff[j] / (r * r);
            let delta = if i == j { 1.0 } else { 0.0 };
            let a = k * k * (delta - uu) - (delta - 3.0 * uu) / (r * r);
            let b = k * (delta - 3.0 * uu) / r;
            out[i][j] = pref * (s * a + c * b);
        }
    }
    Ok(out)
}

/// `Im tr Phi = (d - 1) k^2 Im G(r)` as a function of the separation.
/// `r = 0` returns the continuous limit.
pub fn im_trace_green_tensor(ctx: &WaveContext, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("separation must be nonnegative, got {r}")));
    }
    let k = ctx.wavenumber();
    Ok(if ctx.dim() == 2 {
        let j0 = if r == 0.0 { 1.0 } else { bessel_j012(k * r)[0] };
        k * k * 0.25 * j0
    } else {
        let sinc_over_r = if r == 0.0 { k } else { (k * r).sin() / r };
        2.0 * k * k * sinc_over_r / (4.0 * PI)
    })
}
