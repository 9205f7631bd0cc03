use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmresOptions {
    /// Relative residual target.
    pub tol: f64,
    pub restart: usize,
    /// Cap on the total number of inner iterations.
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-8, restart: 50, max_iter: 500 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub solution: Vec<Complex64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Restarted GMRES with modified Gram–Schmidt and complex Givens rotations,
/// started from zero.
pub fn gmres(
    apply: impl Fn(&[Complex64], &mut [Complex64]),
    rhs: &[Complex64],
    opts: &GmresOptions,
) -> Result<GmresOutcome> {
    if !(opts.tol > 0.0) || opts.restart == 0 || opts.max_iter == 0 {
        return Err(Error::Domain(format!("invalid GMRES options {opts:?}")));
    }
    let n = rhs.len();
    let zero = Complex64::new(0.0, 0.0);
    let bnorm = norm(rhs);
    let mut x = vec![zero; n];
    if bnorm == 0.0 {
        return Ok(GmresOutcome { solution: x, iterations: 0, relative_residual: 0.0 });
    }
    let m = opts.restart;
    let mut total = 0;
    let mut r = rhs.to_vec();
    let mut w = vec![zero; n];
    loop {
        let beta = norm(&r);
        if beta <= opts.tol * bnorm {
            return Ok(GmresOutcome { solution: x, iterations: total, relative_residual: beta / bnorm });
        }
        if total >= opts.max_iter {
            return Err(Error::NotConverged { iterations: total, residual: beta / bnorm });
        }
        let mut basis: Vec<Vec<Complex64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut hess: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<Complex64> = Vec::with_capacity(m);
        let mut g = vec![Complex64::new(beta, 0.0)];
        let mut steps = 0;
        while steps < m && total < opts.max_iter {
            let j = steps;
            apply(&basis[j], &mut w);
            let mut col = vec![zero; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(v, &w);
                col[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let hnext = norm(&w);
            col[j + 1] = Complex64::new(hnext, 0.0);
            for i in 0..j {
                let (a, b) = (col[i], col[i + 1]);
                col[i] = a * cs[i] + sn[i] * b;
                col[i + 1] = -sn[i].conj() * a + b * cs[i];
            }
            let (a, b) = (col[j], col[j + 1]);
            let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if a.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                let phase = a / a.norm();
                (a.norm() / rho, phase * b.conj() / rho)
            };
            col[j] = c * a + s * b;
            col[j + 1] = zero;
            cs.push(c);
            sn.push(s);
            let gj = g[j];
            g[j] = gj * c;
            g.push(-s.conj() * gj);
            hess.push(col);
            steps += 1;
            total += 1;
            let estimate = g[j + 1].norm();
            if estimate <= opts.tol * bnorm || hnext == 0.0 {
                break;
            }
            basis.push(w.iter().map(|z| z / hnext).collect());
        }
        // back substitution on the triangular factor
        let mut y = vec![zero; steps];
        for i in (0..steps).rev() {
            let mut acc = g[i];
            for l in i + 1..steps {
                acc -= hess[l][i] * y[l];
            }
            y[i] = acc / hess[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            for (xk, vk) in x.iter_mut().zip(v) {
                *xk += yi * vk;
            }
        }
        apply(&x, &mut w);
        for ((rk, bk), wk) in r.iter_mut().zip(rhs).zip(&w) {
            *rk = bk - wk;
        }
    }
}
