use num_complex::Complex64;

use crate::em::{green_scalar_at, WaveContext};
use crate::quadrature::gauss_legendre_on;

const START_ORDER: usize = 16;
const MAX_ORDER_2D: usize = 4096;
const MAX_ORDER_3D: usize = 512;
const REL_TOL: f64 = 1e-8;

/// Average of the scalar Green's function over the cell of side `h`
/// centered at its singular point.
///
/// By symmetry the cell splits into 2^d congruent orthants with the
/// singularity at a corner; each orthant gets an even-order tensor Gauss
/// rule, so no node ever lands on the singularity. The order doubles from
/// 16 until two consecutive results agree to 1e-8 relative.
pub fn diagonal_self_term(ctx: &WaveContext, h: f64) -> Complex64 {
    assert!(h > 0.0, "cell size must be positive");
    let max_order = if ctx.dim() == 2 { MAX_ORDER_2D } else { MAX_ORDER_3D };
    let mut order = START_ORDER;
    let mut prev = orthant_average(ctx, h, order);
    loop {
        order *= 2;
        let next = orthant_average(ctx, h, order);
        if (next - prev).norm() <= REL_TOL * next.norm() || order >= max_order {
            return next;
        }
        prev = next;
    }
}

fn orthant_average(ctx: &WaveContext, h: f64, n: usize) -> Complex64 {
    let a = 0.5 * h;
    let (x, w) = gauss_legendre_on(n, 0.0, a);
    let mut sum = Complex64::new(0.0, 0.0);
    if ctx.dim() == 2 {
        for (xi, wi) in x.iter().zip(&w) {
            for (yj, wj) in x.iter().zip(&w) {
                sum += green_scalar_at(ctx, xi.hypot(*yj)) * (wi * wj);
            }
        }
        sum / (a * a)
    } else {
        for (xi, wi) in x.iter().zip(&w) {
            for (yj, wj) in x.iter().zip(&w) {
                let rxy2 = xi * xi + yj * yj;
                let wxy = wi * wj;
                for (zl, wl) in x.iter().zip(&w) {
                    sum += green_scalar_at(ctx, (rxy2 + zl * zl).sqrt()) * (wxy * wl);
                }
            }
        }
        sum / (a * a * a)
    }
}
