use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::em::{Aabb, ContrastField, FieldVector, IncidentPlaneWave, Point, Shape, WaveContext};
use crate::error::Error;
use crate::forward::{ForwardSystem, Solver};
use crate::measurement::{
    circle_surface, cube_surface, synthesize_scattered_field, FieldSamples, MeasurementSurface, Provenance,
};

const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn ctx2() -> WaveContext {
    WaveContext::new(2, 1.0).unwrap()
}

fn square_grid(half: f64, spacing: f64) -> SamplingGrid {
    SamplingGrid::new(Aabb::new(&[-half, -half], &[half, half]).unwrap(), spacing).unwrap()
}

/// Single-square data for both incident waves at a coarse forward mesh.
fn example_datasets() -> Vec<Dataset> {
    let ctx = ctx2();
    let f = ContrastField::new(vec![Shape::square(Point::xy(-0.25, 0.0), 0.3, Complex64::new(1.0, 0.0)).unwrap()])
        .unwrap();
    let sys = ForwardSystem::assemble(&f, &ctx, 0.05, 1).unwrap();
    let surface = circle_surface(5.0, 30).unwrap();
    [([S2, S2], [S2, -S2]), ([-S2, S2], [S2, S2])]
        .iter()
        .map(|(d, p)| {
            let w = IncidentPlaneWave::new(d, p).unwrap();
            let j = sys.solve(&w, &Solver::Dense).unwrap();
            Dataset::new(synthesize_scattered_field(&j, &surface, &ctx).unwrap(), p).unwrap()
        })
        .collect()
}

#[test]
fn probe_on_axis_in_3d() {
    let ctx = WaveContext::new(3, 1.0).unwrap();
    let s = cube_surface(10.0, 3).unwrap();
    let probe = probe_field(&ctx, &s, &Point::xyz(0.0, 0.0, 0.0), &[1.0, 0.0, 0.0]).unwrap();
    for (x, v) in s.points().iter().zip(probe.values()) {
        assert!(v.norm() > 0.0);
        let c = x.coords();
        if c[1].abs() < 1e-12 && c[2].abs() < 1e-12 {
            assert!(v[1].norm() < 1e-15 * v.norm() && v[2].norm() < 1e-15 * v.norm());
        }
    }
    // the face centers (±5, 0, 0) are on axis 1
    assert!(s.points().iter().filter(|x| x.coords()[1].abs() < 1e-12 && x.coords()[2].abs() < 1e-12).count() == 2);
    assert!(probe_field(&ctx, &s, &Point::xyz(6.0, 0.0, 0.0), &[1.0, 0.0, 0.0]).is_err());
}

#[test]
fn probe_far_field_decay() {
    let ctx = ctx2();
    let xp = Point::xy(0.3, -0.2);
    let rms = |r: f64| {
        let p = probe_field(&ctx, &circle_surface(r, 60).unwrap(), &xp, &[S2, -S2]).unwrap();
        (p.values().iter().map(FieldVector::norm_sqr).sum::<f64>() / 60.0).sqrt()
    };
    let ratio = rms(10.0) / rms(5.0);
    assert!((ratio / 0.5f64.sqrt() - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn psi_of_a_probe_is_one_and_scale_invariant() {
    let ctx = ctx2();
    let s = circle_surface(5.0, 30).unwrap();
    let xp = Point::xy(0.7, -1.1);
    let probe = probe_field(&ctx, &s, &xp, &[S2, S2]).unwrap();
    assert!((index_psi(&ctx, &probe, &xp, &[S2, S2]).unwrap() - 1.0).abs() < 1e-14);
    let scaled: Vec<FieldVector> = probe.values().iter().map(|v| v.scale(Complex64::new(0.0, 3.0))).collect();
    let scaled = FieldSamples::new(s.clone(), scaled, Provenance::Exact).unwrap();
    let other = Point::xy(-1.0, 0.4);
    let a = index_psi(&ctx, &probe, &other, &[1.0, 0.0]).unwrap();
    let b = index_psi(&ctx, &scaled, &other, &[1.0, 0.0]).unwrap();
    assert!((a - b).abs() < 1e-14);
    let zero = FieldSamples::new(s, vec![FieldVector::zeros(2); 30], Provenance::Exact).unwrap();
    assert!(matches!(index_psi(&ctx, &zero, &xp, &[1.0, 0.0]), Err(Error::DegenerateData(_))));
}

fn arbitrary_samples(surface: &MeasurementSurface, seed: u64) -> FieldSamples {
    let vals = (0..surface.len())
        .map(|m| {
            let t = (seed as f64 + 1.0) * (m as f64 + 0.3);
            FieldVector::new(&[Complex64::new(t.sin(), (1.7 * t).cos()), Complex64::new((0.3 * t).cos(), t.sin() * 0.5)])
                .unwrap()
        })
        .collect();
    FieldSamples::new(surface.clone(), vals, Provenance::Exact).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn psi_is_bounded(seed in 0u64..1000, x in -3.0f64..3.0, y in -3.0f64..3.0, a in 0.0f64..6.3) {
        let s = circle_surface(5.0, 30).unwrap();
        let data = arbitrary_samples(&s, seed);
        let v = index_psi(&ctx2(), &data, &Point::xy(x, y), &[a.cos(), a.sin()]).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn combined_index_properties() {
    let ctx = ctx2();
    let ds = example_datasets();
    let x = Point::xy(0.2, 0.3);
    let single = index_psi(&ctx, ds[0].samples(), &x, ds[0].polarization()).unwrap();
    assert_eq!(index_combined(&ctx, &ds[..1], &x).unwrap(), single);
    let twice = [ds[0].clone(), ds[0].clone()];
    assert!((index_combined(&ctx, &twice, &x).unwrap() - single).abs() < 1e-15);
    let fwd = index_combined(&ctx, &ds, &x).unwrap();
    let rev: Vec<Dataset> = ds.iter().rev().cloned().collect();
    assert!((index_combined(&ctx, &rev, &x).unwrap() - fwd).abs() < 1e-15);
    assert!(matches!(index_combined(&ctx, &[], &x), Err(Error::Empty(_))));
}

#[test]
fn sweep_matches_pointwise_and_locates() {
    let ctx = ctx2();
    let ds = example_datasets();
    let g = square_grid(2.0, 0.1);
    let sweep = sweep_indices(&ctx, &ds, &g).unwrap();
    assert_eq!(sweep.combined.values().len(), 41 * 41);
    for i in (0..g.len()).step_by(97) {
        let x = g.point(i);
        for (l, grid) in sweep.per_polarization.iter().enumerate() {
            let v = index_psi(&ctx, ds[l].samples(), &x, ds[l].polarization()).unwrap();
            assert!((grid.values()[i] - v).abs() < 1e-12);
        }
        assert!((sweep.combined.values()[i] - index_combined(&ctx, &ds, &x).unwrap()).abs() < 1e-12);
    }
    assert!(sweep.combined.values().iter().all(|v| (0.0..=1.0).contains(v)));
    let (arg, peak) = sweep.combined.argmax();
    assert!(arg.distance(&Point::xy(-0.25, 0.0)) <= 0.1, "{:?}", arg.coords());
    // far from the scatterer the index is small on average
    let far: Vec<f64> = (0..g.len())
        .filter(|&i| g.point(i).distance(&Point::xy(-0.25, 0.0)) > 1.5)
        .map(|i| sweep.combined.values()[i])
        .collect();
    assert!(far.iter().sum::<f64>() / (far.len() as f64) < peak / 3.0);
    let at = index_psi(&ctx, ds[0].samples(), &Point::xy(-0.25, 0.0), &[S2, -S2]).unwrap();
    let away = index_psi(&ctx, ds[0].samples(), &Point::xy(1.5, 1.5), &[S2, -S2]).unwrap();
    assert!(at > away);
    let only = compute_index_grid(&ctx, &ds, &g, IndexMode::Combined).unwrap();
    assert_eq!(only, vec![sweep.combined.clone()]);
    assert_eq!(compute_index_grid(&ctx, &ds, &g, IndexMode::PerPolarization).unwrap().len(), 2);
}

#[test]
fn sweep_rejects_grid_outside_surface() {
    let ctx = ctx2();
    let ds = example_datasets();
    assert!(matches!(sweep_indices(&ctx, &ds, &square_grid(4.0, 0.5)), Err(Error::Geometry(_))));
}

fn off_peak_ratio(map: &IndexGrid, xq: &Point, radius: f64) -> f64 {
    let peak = map.max();
    map.local_maxima(0.0)
        .iter()
        .filter(|m| Point::new(&m.location[..2]).unwrap().distance(xq) > radius)
        .map(|m| m.value)
        .fold(0.0, f64::max)
        / peak
}

#[test]
fn cross_maps_of_a_point_source() {
    let ctx = ctx2();
    let s = circle_surface(5.0, 30).unwrap();
    let xq = Point::xy(-0.25, 0.0);
    let g = square_grid(2.0, 0.05);
    let map = |sel: CrossSelector| cross_product_map(&ctx, &s, &xq, &g, &sel).unwrap();
    let diag = map(CrossSelector::DiagonalSum);
    let (arg, v) = diag.argmax();
    assert!((v - 1.0).abs() < 1e-15);
    assert!(arg.distance(&xq) <= 0.05 * S2 + 1e-12, "{:?}", arg.coords());
    let c11 = map(CrossSelector::Component { i: 0, j: 0 });
    let c22 = map(CrossSelector::Component { i: 1, j: 1 });
    assert!(off_peak_ratio(&c11, &xq, 0.5) >= 0.5);
    let r_diag = off_peak_ratio(&diag, &xq, 0.5);
    assert!(r_diag < off_peak_ratio(&c11, &xq, 0.5) && r_diag < off_peak_ratio(&c22, &xq, 0.5));
    let p1 = map(CrossSelector::Polarization { q: vec![S2, -S2] });
    let p2 = map(CrossSelector::Polarization { q: vec![S2, S2] });
    let both = map(CrossSelector::PolarizationSum { qs: vec![vec![S2, -S2], vec![S2, S2]] });
    let r_both = off_peak_ratio(&both, &xq, 0.5);
    assert!(r_both < off_peak_ratio(&p1, &xq, 0.5) && r_both < off_peak_ratio(&p2, &xq, 0.5));
    assert!(cross_product_map(&ctx, &s, &xq, &g, &CrossSelector::Component { i: 0, j: 2 }).is_err());
}

#[test]
fn polarization_sum_is_frobenius_correlation() {
    // Σ over an orthonormal pair of <Φq, Φq> equals Σ_ij <Φ_ij, Φ_ij>
    let ctx = ctx2();
    let s = circle_surface(5.0, 30).unwrap();
    let xq = Point::xy(-0.25, 0.0);
    let g = square_grid(1.0, 0.25);
    let both = cross_product_map(&ctx, &s, &xq, &g, &CrossSelector::PolarizationSum { qs: vec![vec![S2, -S2], vec![S2, S2]] }).unwrap();
    let axes = cross_product_map(&ctx, &s, &xq, &g, &CrossSelector::PolarizationSum { qs: vec![vec![1.0, 0.0], vec![0.0, 1.0]] }).unwrap();
    for (a, b) in both.values().iter().zip(axes.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn boundary_lemma_holds() {
    let ctx = ctx2();
    let (xp, xq) = (Point::xy(-0.25, 0.0), Point::xy(0.4, 0.1));
    let check = verify_boundary_lemma(&ctx, &circle_surface(5.0, 512).unwrap(), &xp, &xq, &[S2, -S2], &[S2, S2]).unwrap();
    assert!(check.rel_err <= 1e-3, "{check:?}");
    let p = [0.6, 0.8];
    let q = [1.0, 0.0];
    let s = circle_surface(5.0, 256).unwrap();
    let a = verify_boundary_lemma(&ctx, &s, &xp, &xq, &p, &q).unwrap();
    let b = verify_boundary_lemma(&ctx, &s, &xq, &xp, &q, &p).unwrap();
    assert!((a.lhs + b.lhs.conj()).norm() < 1e-9 * a.lhs.norm());
    assert!(matches!(verify_boundary_lemma(&ctx, &s, &xp, &xp, &p, &q), Err(Error::CoincidentPoints)));
    assert!(matches!(
        verify_boundary_lemma(&ctx, &s, &xp, &Point::xy(4.5, 0.0), &p, &q),
        Err(Error::Geometry(_))
    ));
}

#[test]
fn boundary_lemma_in_3d() {
    let ctx = WaveContext::new(3, 1.0).unwrap();
    let s = cube_surface(6.0, 40).unwrap();
    let check = verify_boundary_lemma(
        &ctx,
        &s,
        &Point::xyz(-0.25, 0.0, 0.1),
        &Point::xyz(0.4, 0.1, 0.0),
        &[1.0, 0.0, 0.0],
        &[0.0, 0.6, 0.8],
    )
    .unwrap();
    assert!(check.rel_err < 1e-2, "{check:?}");
}

#[test]
fn correlation_approximation_improves_with_radius() {
    let ctx = ctx2();
    let radii = [5.0, 10.0, 20.0, 40.0];
    let (xp, xq) = (Point::xy(-0.25, 0.0), Point::xy(0.4, 0.1));
    let table = verify_correlation_approx(&ctx, &radii, &xp, &xq, &[S2, -S2], &[S2, S2]).unwrap();
    for w in table.windows(2) {
        assert!(w[1].err < w[0].err, "{table:?}");
    }
    let same = verify_correlation_approx(&ctx, &[5.0], &xp, &xp, &[S2, -S2], &[S2, -S2]).unwrap();
    assert!(same[0].err <= 0.15 && same[0].lhs.re > 0.0 && same[0].rhs.re > 0.0);
    let swapped = verify_correlation_approx(&ctx, &radii[..1], &xp, &xq, &[S2, S2], &[S2, -S2]).unwrap();
    assert!((swapped[0].rhs - table[0].rhs).norm() < 1e-12);
    let wrong = verify_correlation_approx(&WaveContext::new(3, 1.0).unwrap(), &radii, &Point::xyz(0.0, 0.0, 0.0), &Point::xyz(0.1, 0.0, 0.0), &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]);
    assert!(wrong.is_err());
}
