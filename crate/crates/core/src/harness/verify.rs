use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::presets::preset;
use super::run::{diagnostic_selectors, off_peak_ratio};
use crate::dsm::{cross_product_map, verify_boundary_lemma, verify_correlation_approx};
use crate::em::{green_scalar, green_tensor, ContrastField, IncidentPlaneWave, Point, Shape, WaveContext};
use crate::error::{Error, Result};
use crate::forward::{ForwardSystem, GmresOptions, Solver, DEFAULT_HALO};
use crate::measurement::circle_surface;

pub const VERIFY_KINDS: [&str; 6] = ["trace", "lemma", "xpq", "born", "solver_cross", "figs"];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: Vec<f64>,
    pub requirement: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub kind: String,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn check(name: &str, measured: Vec<f64>, requirement: &str, passed: bool) -> CheckResult {
    CheckResult { name: name.into(), measured, requirement: requirement.into(), passed }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn verify(kind: &str) -> Result<VerifyReport> {
    let checks = match kind {
        "trace" => vec![trace_check(2)?, trace_check(3)?],
        "lemma" => lemma_checks()?,
        "xpq" => xpq_checks()?,
        "born" => vec![born_check()?],
        "solver_cross" => vec![solver_cross_check()?],
        "figs" => figs_checks(0.02)?,
        other => {
            return Err(Error::Config(format!("unknown check `{other}`; known: {}", VERIFY_KINDS.join(", "))));
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { kind: kind.into(), checks, passed })
}

/// Max relative deviation of `tr Φ` from `(d-1) k² G` over 500 random pairs.
pub fn trace_deviation(dim: usize) -> Result<f64> {
    let ctx = WaveContext::new(dim, 1.0)?;
    let k2 = ctx.wavenumber().powi(2);
    let mut rng = ChaCha8Rng::seed_from_u64(2024 + dim as u64);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 500 {
        let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        let (x, y) = (Point::new(&a)?, Point::new(&b)?);
        if x.distance(&y) < 1e-3 {
            continue;
        }
        let g = green_scalar(&ctx, &x, &y)?;
        let tr = green_tensor(&ctx, &x, &y)?.trace();
        let expect = g * ((dim - 1) as f64 * k2);
        worst = worst.max((tr - expect).norm() / (g * k2).norm());
        n += 1;
    }
    Ok(worst)
}

fn trace_check(dim: usize) -> Result<CheckResult> {
    let dev = trace_deviation(dim)?;
    Ok(check(&format!("trace identity {dim}D"), vec![dev], "max relative deviation <= 1e-11", dev <= 1e-11))
}

/// Relative lemma error on circles of radius 5 with the given point counts.
pub fn lemma_errors(counts: &[usize]) -> Result<Vec<f64>> {
    let ctx = WaveContext::new(2, 1.0)?;
    let (xp, xq) = (Point::xy(-0.25, 0.0), Point::xy(0.4, 0.1));
    counts
        .iter()
        .map(|&n| Ok(verify_boundary_lemma(&ctx, &circle_surface(5.0, n)?, &xp, &xq, &[S2, -S2], &[S2, S2])?.rel_err))
        .collect()
}

fn lemma_checks() -> Result<Vec<CheckResult>> {
    let errs = lemma_errors(&[128, 256, 512])?;
    Ok(vec![
        check("boundary lemma at 512 points", vec![errs[2]], "relative error <= 1e-3", errs[2] <= 1e-3),
        check(
            "boundary lemma refinement 128/256/512",
            errs.clone(),
            "strictly decreasing",
            strictly_decreasing(&errs),
        ),
    ])
}

pub const XPQ_RADII: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

fn xpq_checks() -> Result<Vec<CheckResult>> {
    let ctx = WaveContext::new(2, 1.0)?;
    let (xp, xq) = (Point::xy(-0.25, 0.0), Point::xy(0.4, 0.1));
    let table = verify_correlation_approx(&ctx, &XPQ_RADII, &xp, &xq, &[S2, -S2], &[S2, S2])?;
    let errs: Vec<f64> = table.iter().map(|r| r.err).collect();
    let same = verify_correlation_approx(&ctx, &[5.0], &xp, &xp, &[S2, -S2], &[S2, -S2])?[0].err;
    Ok(vec![
        check("correlation error over radii 5/10/20/40", errs.clone(), "strictly decreasing", strictly_decreasing(&errs)),
        check("coincident points at R = 5", vec![same], "relative error <= 0.15", same <= 0.15),
    ])
}

fn example1_with(eta: f64) -> Result<ContrastField> {
    ContrastField::new(vec![Shape::square(Point::xy(-0.25, 0.0), 0.3, Complex64::new(eta, 0.0))?])
}

fn example1_wave() -> Result<IncidentPlaneWave> {
    IncidentPlaneWave::normalized(&[1.0, 1.0], &[1.0, -1.0])
}

/// `max_k |J_k - η E^i(x_k)| / max_k |η E^i(x_k)|` for each contrast level.
pub fn born_deviations(etas: &[f64], h: f64) -> Result<Vec<f64>> {
    let ctx = WaveContext::new(2, 1.0)?;
    let wave = example1_wave()?;
    etas.iter()
        .map(|&eta| {
            let sys = ForwardSystem::assemble(&example1_with(eta)?, &ctx, h, DEFAULT_HALO)?;
            let j = sys.solve(&wave, &Solver::Auto)?;
            let b = sys.rhs(&wave)?;
            let dev = j.raw().iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            Ok(dev / b.iter().map(|z| z.norm()).fold(0.0, f64::max))
        })
        .collect()
}

fn born_check() -> Result<CheckResult> {
    let devs = born_deviations(&[1e-4, 1e-3, 1e-2], 0.02)?;
    let orders: Vec<f64> = devs.windows(2).map(|w| (w[1] / w[0]).log10()).collect();
    let ok = orders.iter().all(|o| (o - 1.0).abs() <= 0.2);
    Ok(check("Born regime observed order", orders, "each order within 1 +/- 0.2", ok))
}

/// Relative 2-norm difference of dense and GMRES(1e-10) currents at mesh `h`.
pub fn solver_difference(h: f64) -> Result<f64> {
    let ctx = WaveContext::new(2, 1.0)?;
    let sys = ForwardSystem::assemble(&example1_with(1.0)?, &ctx, h, DEFAULT_HALO)?;
    let wave = example1_wave()?;
    let dense = sys.solve(&wave, &Solver::Dense)?;
    let it = sys.solve(&wave, &Solver::Gmres(GmresOptions { tol: 1e-10, restart: 50, max_iter: 500 }))?;
    let diff: f64 = dense.raw().iter().zip(it.raw()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let scale: f64 = dense.raw().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok(diff / scale)
}

fn solver_cross_check() -> Result<CheckResult> {
    let d = solver_difference(0.03)?;
    Ok(check("dense vs GMRES at h = 0.03", vec![d], "relative difference <= 1e-8", d <= 1e-8))
}

/// Off-peak ratios for the maps of a diagnostic preset, in selector order.
pub fn diagnostic_ratios(name: &str, spacing: f64) -> Result<Vec<(String, f64)>> {
    let mut cfg = preset(name)?;
    cfg.sampling.spacing = Some(spacing);
    let ctx = cfg.context()?;
    let xq = Point::new(&cfg.diagnostic.as_ref().expect("diagnostic preset").point)?;
    let surface = cfg.surface.build()?;
    let grid = cfg.sampling_grid()?;
    diagnostic_selectors(&cfg)?
        .iter()
        .map(|sel| {
            let map = cross_product_map(&ctx, &surface, &xq, &grid, sel)?;
            Ok((sel.name(), off_peak_ratio(&map, &xq, 0.5 * ctx.wavelength())))
        })
        .collect()
}

fn figs_checks(spacing: f64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (name, label) in [("fig1", "diagonal sum"), ("fig2", "polarization combination")] {
        let r = diagnostic_ratios(name, spacing)?;
        let (last, singles) = r.split_last().expect("several maps");
        let ok = singles.iter().all(|(_, v)| last.1 < *v);
        out.push(check(
            &format!("{label} off-peak ratio"),
            r.iter().map(|(_, v)| *v).collect(),
            "last ratio strictly below every other",
            ok,
        ));
    }
    Ok(out)
}
