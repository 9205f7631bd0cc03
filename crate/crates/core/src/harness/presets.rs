use std::f64::consts::FRAC_1_SQRT_2 as S2;

use super::config::*;
use crate::error::{Error, Result};
use crate::measurement::SurfaceDescriptor;

pub const PRESET_NAMES: [&str; 8] =
    ["example1", "example2a", "example2b", "example3", "example4", "example3d", "fig1", "fig2"];

fn square(x: f64, y: f64, side: f64) -> ShapeSpec {
    ShapeSpec::Square { center: vec![x, y], side, eta: ContrastValue::Real(1.0) }
}

fn planar(name: &str, contrast: Vec<ShapeSpec>) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        wave: WaveSpec { dimension: 2, wavelength: 1.0 },
        incidents: vec![
            IncidentSpec { direction: vec![S2, S2], polarization: vec![S2, -S2] },
            IncidentSpec { direction: vec![-S2, S2], polarization: vec![S2, S2] },
        ],
        contrast,
        surface: SurfaceDescriptor::Circle { radius: 5.0, count: 30 },
        forward: ForwardSpec::default(),
        sampling: SamplingSpec { min: vec![-2.0, -2.0], max: vec![2.0, 2.0], spacing: Some(0.01) },
        noise: NoiseSpec::default(),
        outputs: OutputSpec::default(),
        diagnostic: None,
    }
}

/// Configuration of a named experiment, defaults applied.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "example1" => planar(name, vec![square(-0.25, 0.0, 0.3)]),
        "example2a" => planar(name, vec![square(-0.8, -0.7, 0.2), square(0.3, 0.8, 0.2)]),
        "example2b" => planar(name, vec![square(-0.45, -0.35, 0.3), square(0.05, 0.15, 0.3)]),
        "example3" => planar(
            name,
            vec![square(-5.0 / 8.0, -5.0 / 8.0, 0.15), square(-17.0 / 40.0, -17.0 / 40.0, 0.15), square(-21.0 / 40.0, 1.0 / 8.0, 0.15)],
        ),
        "example4" => planar(
            name,
            vec![ShapeSpec::Ring { center: vec![0.0, 0.0], outer_side: 0.6, inner_side: 0.4, eta: ContrastValue::Real(1.0) }],
        ),
        "fig1" | "fig2" => {
            let mut cfg = planar(name, vec![]);
            let kind = if name == "fig1" { DiagnosticKind::Components } else { DiagnosticKind::Polarizations };
            cfg.diagnostic = Some(DiagnosticSpec { kind, point: vec![-0.25, 0.0] });
            cfg
        }
        "example3d" => {
            let s3 = 1.0 / 3f64.sqrt();
            let s6 = 1.0 / 6f64.sqrt();
            let cube = |x: f64| ShapeSpec::Cube { center: vec![x, 0.3, 0.3], side: 0.2, eta: ContrastValue::Real(1.0) };
            ExperimentConfig {
                name: name.into(),
                wave: WaveSpec { dimension: 3, wavelength: 1.0 },
                incidents: vec![
                    IncidentSpec { direction: vec![s3, s3, s3], polarization: vec![s6, -2.0 * s6, s6] },
                    IncidentSpec { direction: vec![s3, s3, s3], polarization: vec![s6, s6, -2.0 * s6] },
                ],
                contrast: vec![cube(-0.4), cube(0.4)],
                surface: SurfaceDescriptor::CubeFaces { edge: 10.0, per_face: 10 },
                forward: ForwardSpec::default(),
                sampling: SamplingSpec { min: vec![-2.0; 3], max: vec![2.0; 3], spacing: Some(0.05) },
                noise: NoiseSpec::default(),
                outputs: OutputSpec::default(),
                diagnostic: None,
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}`; known presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    cfg.validated()
}
