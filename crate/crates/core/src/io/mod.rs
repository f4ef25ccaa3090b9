//! Run configuration, persistence formats and the command entry points.

mod commands;
mod config;
mod diagnostics;
mod manifest;
mod particles_cmd;
mod particles_csv;
mod series_csv;
mod simulate;
mod svg;

pub use commands::{
    cmd_diagnose, cmd_synthetic, diagnose_series, synthetic_svg, to_json, DiagnoseArgs,
    DiagnoseOutcome, SyntheticArgs, EXIT_ERROR, EXIT_OK, EXIT_VIOLATION,
};
pub use config::{RunConfig, OUTPUT_ROOT_ENV};
pub use diagnostics::{sample_flow, vorticity_and_stretching_sup, vorticity_grid, FlowSample};
pub use manifest::{
    sha256_file, temp_path, unix_now, write_atomic, FileEntry, RunManifest, RunStatus,
    MANIFEST_FILE,
};
pub use particles_cmd::{
    cmd_particles, KindSummary, ParticlesOutcome, ResidualSummary, ACCELERATION_TABLE,
    CAUCHY_TABLE, RESIDUAL_SUMMARY, SECOND_DERIVATIVE_TABLE,
};
pub use particles_csv::{particle_header, ParticleWriter};
pub use series_csv::{header, read_series, series_to_string, write_series, SeriesWriter, BASE_COLUMNS};
pub use simulate::{
    checkpoint_name, cmd_simulate, cmd_simulate_file, particle_labels, GronwallSummary,
    ParticleSummary, RunSummary, SimulateOutcome, CHECKPOINT_DIR, CONFIG_FILE, PARTICLES_FILE,
    SERIES_FILE, SUMMARY_FILE,
};
pub use svg::{loglog_chart, Line};

#[cfg(test)]
mod tests;
