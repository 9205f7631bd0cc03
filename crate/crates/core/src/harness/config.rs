use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsm::SamplingGrid;
use crate::em::{Aabb, ContrastField, IncidentPlaneWave, Point, Shape, WaveContext};
use crate::error::{Error, Result};
use crate::forward::{GmresOptions, Solver, DEFAULT_HALO};
use crate::measurement::SurfaceDescriptor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub dimension: usize,
    #[serde(default = "one")]
    pub wavelength: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentSpec {
    pub direction: Vec<f64>,
    pub polarization: Vec<f64>,
}

/// A contrast value: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContrastValue {
    Real(f64),
    Complex([f64; 2]),
}

impl ContrastValue {
    pub fn value(&self) -> Complex64 {
        match *self {
            ContrastValue::Real(v) => Complex64::new(v, 0.0),
            ContrastValue::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl Default for ContrastValue {
    fn default() -> Self {
        ContrastValue::Real(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ShapeSpec {
    Square {
        center: Vec<f64>,
        side: f64,
        #[serde(default)]
        eta: ContrastValue,
    },
    Ring {
        center: Vec<f64>,
        outer_side: f64,
        inner_side: f64,
        #[serde(default)]
        eta: ContrastValue,
    },
    Cube {
        center: Vec<f64>,
        side: f64,
        #[serde(default)]
        eta: ContrastValue,
    },
}

impl ShapeSpec {
    pub fn to_shape(&self) -> Result<Shape> {
        match self {
            ShapeSpec::Square { center, side, eta } => Shape::square(Point::new(center)?, *side, eta.value()),
            ShapeSpec::Ring { center, outer_side, inner_side, eta } => {
                Shape::ring(Point::new(center)?, *outer_side, *inner_side, eta.value())
            }
            ShapeSpec::Cube { center, side, eta } => Shape::cube(Point::new(center)?, *side, eta.value()),
        }
    }

    pub fn center(&self) -> &[f64] {
        match self {
            ShapeSpec::Square { center, .. } | ShapeSpec::Ring { center, .. } | ShapeSpec::Cube { center, .. } => center,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Auto,
    Dense,
    Gmres,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardSpec {
    /// Mesh size; 0.02 in 2D and 0.04 in 3D when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default)]
    pub solver: SolverKind,
    /// GMRES relative residual target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Empty cell layers around the scatterer box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halo: Option<usize>,
}

impl ForwardSpec {
    pub fn solver(&self) -> Solver {
        let base = GmresOptions::default();
        let opts = GmresOptions {
            tol: self.tol.unwrap_or(base.tol),
            restart: self.restart.unwrap_or(base.restart),
            max_iter: self.max_iter.unwrap_or(base.max_iter),
        };
        match self.solver {
            SolverKind::Auto => Solver::Auto,
            SolverKind::Dense => Solver::Dense,
            SolverKind::Gmres => Solver::Gmres(opts),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    /// 0.01 in 2D and 0.05 in 3D when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Pgm,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "all_formats")]
    pub formats: Vec<OutputFormat>,
}

fn all_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Pgm, OutputFormat::Report]
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { directory: None, formats: all_formats() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// Component correlations Φ11, Φ22, Φ12 and the diagonal sum.
    Components,
    /// Correlations for each incident polarization and their direct sum.
    Polarizations,
}

/// Point-source diagnostic that maps probe correlations instead of
/// inverting data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticSpec {
    pub kind: DiagnosticKind,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub wave: WaveSpec,
    pub incidents: Vec<IncidentSpec>,
    #[serde(default)]
    pub contrast: Vec<ShapeSpec>,
    pub surface: SurfaceDescriptor,
    #[serde(default)]
    pub forward: ForwardSpec,
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<DiagnosticSpec>,
}

fn default_name() -> String {
    "experiment".into()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("schema violation: {e}")))?;
        cfg.validated()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks invariants and fills in defaults.
    pub fn validated(mut self) -> Result<Self> {
        let d = self.wave.dimension;
        let ctx = self.context()?;
        if self.incidents.is_empty() {
            return Err(Error::Config("`incidents` must list at least one wave".into()));
        }
        self.waves()?;
        if self.surface.dim() != d {
            return Err(Error::Config(format!("`surface` is {}D but `wave.dimension` is {d}", self.surface.dim())));
        }
        let surface = self.surface.build().map_err(|e| Error::Config(format!("`surface`: {e}")))?;
        for (i, s) in self.contrast.iter().enumerate() {
            let shape = s.to_shape().map_err(|e| Error::Config(format!("`contrast[{i}]`: {e}")))?;
            if shape.center().dim() != d {
                return Err(Error::Config(format!("`contrast[{i}]` has the wrong dimension")));
            }
        }
        if self.contrast.is_empty() && self.diagnostic.is_none() {
            return Err(Error::Config("`contrast` is empty and no `diagnostic` is given".into()));
        }
        if let Some(diag) = &self.diagnostic {
            let x = Point::new(&diag.point).map_err(|e| Error::Config(format!("`diagnostic.point`: {e}")))?;
            if x.dim() != d || !surface.encloses(&x) {
                return Err(Error::Config("`diagnostic.point` must lie inside the surface".into()));
            }
            if diag.kind == DiagnosticKind::Components && d != 2 {
                return Err(Error::Config("component diagnostics are two-dimensional".into()));
            }
        }
        let default_h = if d == 2 { 0.02 } else { 0.04 };
        let h = *self.forward.h.get_or_insert(default_h);
        if !(h > 0.0) {
            return Err(Error::Config(format!("`forward.h` must be positive, got {h}")));
        }
        self.forward.halo.get_or_insert(DEFAULT_HALO);
        if let Some(tol) = self.forward.tol {
            if !(tol > 0.0) {
                return Err(Error::Config(format!("`forward.tol` must be positive, got {tol}")));
            }
        }
        let default_spacing = if d == 2 { 0.01 } else { 0.05 };
        self.sampling.spacing.get_or_insert(default_spacing);
        let grid = self.sampling_grid().map_err(|e| Error::Config(format!("`sampling`: {e}")))?;
        let b = grid.bounds();
        for corner in 0..(1usize << d) {
            let c: Vec<f64> = (0..d).map(|a| if corner >> a & 1 == 1 { b.max[a] } else { b.min[a] }).collect();
            if !surface.encloses(&Point::new(&c)?) {
                return Err(Error::Config("`sampling` box must lie inside the measurement surface".into()));
            }
        }
        if !(self.noise.epsilon >= 0.0 && self.noise.epsilon.is_finite()) {
            return Err(Error::Config(format!("`noise.epsilon` must be nonnegative, got {}", self.noise.epsilon)));
        }
        let _ = ctx;
        Ok(self)
    }

    pub fn context(&self) -> Result<WaveContext> {
        WaveContext::new(self.wave.dimension, self.wave.wavelength).map_err(|e| Error::Config(format!("`wave`: {e}")))
    }

    pub fn waves(&self) -> Result<Vec<IncidentPlaneWave>> {
        self.incidents
            .iter()
            .enumerate()
            .map(|(i, inc)| {
                if inc.direction.len() != self.wave.dimension || inc.polarization.len() != self.wave.dimension {
                    return Err(Error::Config(format!("`incidents[{i}]` has the wrong dimension")));
                }
                IncidentPlaneWave::normalized(&inc.direction, &inc.polarization)
                    .map_err(|e| Error::Config(format!("`incidents[{i}]`: {e}")))
            })
            .collect()
    }

    pub fn contrast_field(&self) -> Result<ContrastField> {
        ContrastField::new(self.contrast.iter().map(ShapeSpec::to_shape).collect::<Result<_>>()?)
    }

    pub fn sampling_grid(&self) -> Result<SamplingGrid> {
        let spacing = self.sampling.spacing.unwrap_or(if self.wave.dimension == 2 { 0.01 } else { 0.05 });
        SamplingGrid::new(Aabb::new(&self.sampling.min, &self.sampling.max)?, spacing)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path.as_ref())?;
    ExperimentConfig::from_json(&text)
}
