//! Experiment configuration, presets, the end-to-end pipeline and the
//! verification checks behind the command-line tool.

mod config;
mod presets;
mod run;
mod verify;

pub use config::{
    load_config, ContrastValue, DiagnosticKind, DiagnosticSpec, ExperimentConfig, ForwardSpec, IncidentSpec,
    NoiseSpec, OutputFormat, OutputSpec, SamplingSpec, ShapeSpec, SolverKind, WaveSpec,
};
pub use presets::{preset, PRESET_NAMES};
pub use run::{
    dataset_seed, diagnostic_selectors, off_peak_ratio, run_experiment, ExperimentOutput, ForwardSummary,
    IndexSummary, LocalizationReport, StageTiming, MAXIMA_FLOOR,
};
pub use verify::{
    born_deviations, diagnostic_ratios, lemma_errors, solver_difference, trace_deviation, verify, CheckResult,
    VerifyReport, VERIFY_KINDS, XPQ_RADII,
};
