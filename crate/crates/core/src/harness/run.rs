use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::config::{DiagnosticKind, ExperimentConfig, OutputFormat};
use crate::dsm::{cross_product_map, sweep_indices, CrossSelector, Dataset, IndexGrid, IndexSweep, LocalMax};
use crate::em::Point;
use crate::error::{Error, Result};
use crate::forward::{ForwardSystem, Solver};
use crate::measurement::{add_noise, synthesize_scattered_field, FieldSamples};

/// Fraction of the global maximum below which local maxima are ignored.
pub const MAXIMA_FLOOR: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct IndexSummary {
    pub label: String,
    pub argmax: Vec<f64>,
    pub max: f64,
    /// Local maxima above the floor, largest first.
    pub maxima: Vec<LocalMax>,
    /// Largest local maximum farther than half a wavelength from `reference`,
    /// relative to the global maximum (diagnostics only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub off_peak_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForwardSummary {
    pub grid_counts: Vec<usize>,
    pub system_dimension: usize,
    pub active_dimension: usize,
    pub solver: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizationReport {
    pub name: String,
    pub indices: Vec<IndexSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forward: Option<ForwardSummary>,
    pub timings: Vec<StageTiming>,
    pub config: ExperimentConfig,
}

impl LocalizationReport {
    /// Summary of the combined index (or of the diagnostic's combination map).
    pub fn primary(&self) -> &IndexSummary {
        self.indices.last().expect("a run produces at least one index")
    }
}

/// Everything a run computes, kept in memory for callers that inspect it.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: LocalizationReport,
    pub data: Vec<FieldSamples>,
    pub maps: Vec<(String, IndexGrid)>,
}

fn summarize(label: String, grid: &IndexGrid, reference: Option<&Point>) -> IndexSummary {
    let (arg, max) = grid.argmax();
    let off_peak_ratio = reference.map(|xq| off_peak_ratio(grid, xq, 0.5));
    IndexSummary { label, argmax: arg.coords().to_vec(), max, maxima: grid.local_maxima(MAXIMA_FLOOR), off_peak_ratio }
}

/// Largest local maximum farther than `radius` from `center`, over the
/// global maximum.
pub fn off_peak_ratio(grid: &IndexGrid, center: &Point, radius: f64) -> f64 {
    let d = center.dim();
    let peak = grid.max();
    grid.local_maxima(0.0)
        .iter()
        .filter(|m| Point::new(&m.location[..d]).map(|p| p.distance(center) > radius).unwrap_or(false))
        .map(|m| m.value)
        .fold(0.0, f64::max)
        / peak
}

/// Seed of the noise drawn for the `l`-th incident wave.
pub fn dataset_seed(seed: u64, l: usize) -> u64 {
    seed ^ ((l as u64) << 32)
}

fn timed<T>(timings: &mut Vec<StageTiming>, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| e.at_stage(stage))?;
    timings.push(StageTiming { stage, seconds: start.elapsed().as_secs_f64() });
    Ok(out)
}

/// Runs the configured experiment and writes the requested outputs when an
/// output directory is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let config = config.clone().validated()?;
    let out = if config.diagnostic.is_some() { run_diagnostic(&config)? } else { run_inversion(&config)? };
    if let Some(dir) = &config.outputs.directory {
        write_outputs(&out, dir, &config.outputs.formats)?;
    }
    Ok(out)
}

fn run_inversion(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let ctx = config.context()?;
    let waves = config.waves()?;
    let mut timings = Vec::new();
    let h = config.forward.h.expect("validated");
    let halo = config.forward.halo.expect("validated");
    let solver = config.forward.solver();
    let (system, currents) = timed(&mut timings, "forward", || {
        let system = ForwardSystem::assemble(&config.contrast_field()?, &ctx, h, halo)?;
        let currents = system.solve_many(&waves, &solver)?;
        Ok((system, currents))
    })?;
    let surface = config.surface.build()?;
    let data = timed(&mut timings, "synthesis", || {
        currents
            .iter()
            .enumerate()
            .map(|(l, j)| {
                let exact = synthesize_scattered_field(j, &surface, &ctx)?;
                add_noise(&exact, config.noise.epsilon, dataset_seed(config.noise.seed, l))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let grid = config.sampling_grid()?;
    let sweep: IndexSweep = timed(&mut timings, "sweep", || {
        let datasets = data
            .iter()
            .zip(&waves)
            .map(|(s, w)| Dataset::new(s.clone(), w.polarization()))
            .collect::<Result<Vec<_>>>()?;
        sweep_indices(&ctx, &datasets, &grid)
    })?;
    let mut maps: Vec<(String, IndexGrid)> = sweep
        .per_polarization
        .into_iter()
        .enumerate()
        .map(|(l, g)| (format!("psi_{}", l + 1), g))
        .collect();
    maps.push(("psi_combined".into(), sweep.combined));
    let indices = maps.iter().map(|(n, g)| summarize(n.clone(), g, None)).collect();
    let solver_used = match (solver, system.active_dimension() <= crate::forward::DENSE_LIMIT) {
        (Solver::Auto, true) | (Solver::Dense, _) => "dense".to_string(),
        _ => "gmres".to_string(),
    };
    let forward = ForwardSummary {
        grid_counts: system.grid().counts().to_vec(),
        system_dimension: system.system_dimension(),
        active_dimension: system.active_dimension(),
        solver: solver_used,
    };
    Ok(ExperimentOutput {
        report: LocalizationReport { name: config.name.clone(), indices, forward: Some(forward), timings, config: config.clone() },
        data,
        maps,
    })
}

/// Selectors mapped by a diagnostic run; the last one is the combination.
pub fn diagnostic_selectors(config: &ExperimentConfig) -> Result<Vec<CrossSelector>> {
    let diag = config.diagnostic.as_ref().ok_or_else(|| Error::Config("no `diagnostic` block".into()))?;
    Ok(match diag.kind {
        DiagnosticKind::Components => vec![
            CrossSelector::Component { i: 0, j: 0 },
            CrossSelector::Component { i: 1, j: 1 },
            CrossSelector::Component { i: 0, j: 1 },
            CrossSelector::DiagonalSum,
        ],
        DiagnosticKind::Polarizations => {
            let qs: Vec<Vec<f64>> = config.waves()?.iter().map(|w| w.polarization().to_vec()).collect();
            qs.iter()
                .map(|q| CrossSelector::Polarization { q: q.clone() })
                .chain([CrossSelector::PolarizationSum { qs: qs.clone() }])
                .collect()
        }
    })
}

fn run_diagnostic(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let ctx = config.context()?;
    let diag = config.diagnostic.as_ref().expect("dispatched on diagnostic");
    let xq = Point::new(&diag.point)?;
    let surface = config.surface.build()?;
    let grid = config.sampling_grid()?;
    let mut timings = Vec::new();
    let selectors = diagnostic_selectors(config)?;
    let maps: Vec<(String, IndexGrid)> = timed(&mut timings, "sweep", || {
        selectors
            .iter()
            .map(|sel| Ok((sel.name(), cross_product_map(&ctx, &surface, &xq, &grid, sel)?)))
            .collect::<Result<Vec<_>>>()
    })?;
    let half_wave = 0.5 * ctx.wavelength();
    let indices = maps
        .iter()
        .map(|(n, g)| {
            let mut s = summarize(n.clone(), g, None);
            s.off_peak_ratio = Some(off_peak_ratio(g, &xq, half_wave));
            s
        })
        .collect();
    Ok(ExperimentOutput {
        report: LocalizationReport { name: config.name.clone(), indices, forward: None, timings, config: config.clone() },
        data: Vec::new(),
        maps,
    })
}

fn write_outputs(out: &ExperimentOutput, dir: &Path, formats: &[OutputFormat]) -> Result<()> {
    fs::create_dir_all(dir)?;
    if formats.contains(&OutputFormat::Csv) {
        for (l, d) in out.data.iter().enumerate() {
            d.write_csv(BufWriter::new(File::create(dir.join(format!("field_{}.csv", l + 1)))?))?;
        }
        for (name, g) in &out.maps {
            g.write_csv(BufWriter::new(File::create(dir.join(format!("{name}.csv")))?))?;
        }
    }
    if formats.contains(&OutputFormat::Pgm) {
        for (name, g) in &out.maps {
            g.write_pgm(BufWriter::new(File::create(dir.join(format!("{name}.pgm")))?))?;
        }
    }
    if formats.contains(&OutputFormat::Report) {
        serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join("report.json"))?), &out.report)?;
    }
    Ok(())
}
