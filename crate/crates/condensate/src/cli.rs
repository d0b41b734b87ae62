//! Command-line front end: one structured TOML configuration, subcommands
//! for each analysis, deterministic CSV/JSON artifacts.
//!
//! Precedence is defaults < config file < command-line flags; flags use long
//! names mirroring the config keys. The worker pool is sized by `--workers`
//! or the `CONDENSATE_WORKERS` environment variable (the variable wins).
//! Exit codes: 0 success, 1 validation error, 2 computational failure,
//! 3 acceptance failure.
//!
//! Output files are byte-identical for identical configurations except for
//! the `generated` timestamp line, which determinism checks must ignore.

use crate::asymptotics;
use crate::floquet;
use crate::gpe::{self, Geometry, GpeConfig, GpeError};
use crate::integrate::{integrate_sampled, IntegratorConfig, Trajectory};
use crate::model::{
    energy, equilibrium_width_of, equilibrium_widths_3d, Channel, DynamicalState, ModelError,
    ModelKind, ModelParams, TrapModulation,
};
use crate::sweep::{self, ClassifyCriteria, PointVerdict, SweepContext};
use crate::verify;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    /// Bad configuration or arguments: exit 1, nothing computed.
    Validation(String),
    /// A computation failed after validation: exit 2. Partial output may
    /// already have been written.
    Computation(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Computation(_) => 2,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Computation(m) => m,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "condensate",
    version,
    about = "Parametric resonance toolkit for trapped-condensate width dynamics"
)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output path; "-" or absent writes to stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<String>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker thread count (CONDENSATE_WORKERS overrides; default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one trajectory and write the sampled time series.
    Simulate(SimulateArgs),
    /// Classify a (ω, ε) grid into stability verdicts (resumable).
    Sweep(SweepArgs),
    /// Trace instability-wedge boundaries by Floquet analysis.
    Floquet(FloquetArgs),
    /// Evaluate the closed-form resonance formulas on an amplitude grid.
    Asymptote(AsymptoteArgs),
    /// Evolve the mean-field PDE and write observable series.
    Gpe(GpeArgs),
    /// Run the acceptance suite and write a machine-readable report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Model kind: variational3d | radial | radial_cubic | radial_quartic |
    /// impact | mathieu | center_of_mass.
    #[arg(long)]
    model: Option<String>,
    /// Dimensionless interaction strength P.
    #[arg(long)]
    interaction: Option<f64>,
    /// Static trap strength λ₀ (all axes).
    #[arg(long)]
    lambda0: Option<f64>,
    /// Drive amplitude ε.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Drive frequency ω.
    #[arg(long)]
    omega: Option<f64>,
    /// Damping coefficient γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// End time of the run.
    #[arg(long)]
    tau_end: Option<f64>,
    /// Sampling interval for the output series.
    #[arg(long)]
    output_interval: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    interaction: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    omega_start: Option<f64>,
    #[arg(long)]
    omega_stop: Option<f64>,
    #[arg(long)]
    omega_steps: Option<usize>,
    #[arg(long)]
    epsilon_start: Option<f64>,
    #[arg(long)]
    epsilon_stop: Option<f64>,
    #[arg(long)]
    epsilon_steps: Option<usize>,
    /// Continue an interrupted sweep from its sidecar manifest.
    #[arg(long)]
    resume: bool,
}

#[derive(Debug, Args)]
struct FloquetArgs {
    /// Wedge orders to trace, e.g. --orders 1,2,3.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon_start: Option<f64>,
    #[arg(long)]
    epsilon_stop: Option<f64>,
    #[arg(long)]
    epsilon_steps: Option<usize>,
}

#[derive(Debug, Args)]
struct AsymptoteArgs {
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon_start: Option<f64>,
    #[arg(long)]
    epsilon_stop: Option<f64>,
    #[arg(long)]
    epsilon_steps: Option<usize>,
}

#[derive(Debug, Args)]
struct GpeArgs {
    /// What to run: evolve | com.
    #[arg(long)]
    run: Option<String>,
    /// Geometry: radial3d | cartesian1d.
    #[arg(long)]
    geometry: Option<String>,
    /// Mean-field coupling g; default (2π)^{3/2}·P radial, 0 cartesian.
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long)]
    tau_end: Option<f64>,
    #[arg(long)]
    output_interval: Option<f64>,
    /// Start from a Gaussian of this width instead of the ground state.
    #[arg(long)]
    initial_width: Option<f64>,
    /// Initial center-of-mass displacement (run = com).
    #[arg(long)]
    displacement: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    interaction: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Include the long PDE cross-validation criterion.
    #[arg(long)]
    full: bool,
    /// Run a single criterion by number (1..=11).
    #[arg(long)]
    criterion: Option<usize>,
}

// ---------------------------------------------------------------------------
// Run configuration (TOML)
// ---------------------------------------------------------------------------

/// Complete run configuration. Every section is optional in the file;
/// unknown keys anywhere abort before any computation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub output: OutputSection,
    pub model: ModelSection,
    pub trap: TrapSection,
    pub integrator: IntegratorConfig,
    pub initial: Option<InitialSection>,
    pub simulate: SimulateSection,
    pub sweep: SweepSection,
    pub floquet: FloquetSection,
    pub asymptote: AsymptoteSection,
    pub gpe: GpeSection,
    pub verify: VerifySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output path; None or "-" writes to stdout.
    pub path: Option<String>,
    /// "csv" or "json".
    pub format: String,
    /// Reserved for future stochastic extensions; the current pipeline is
    /// fully deterministic and ignores it.
    pub seed: u64,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: None,
            format: "csv".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    /// variational3d | radial | radial_cubic | radial_quartic | impact |
    /// mathieu | center_of_mass.
    pub kind: String,
    /// Dimensionless interaction strength P. Ignored when the physical
    /// triple below is given.
    pub interaction: f64,
    /// Optional physical triple (N, a, a₀); overrides `interaction`.
    pub particle_count: Option<f64>,
    pub scattering_length: Option<f64>,
    pub oscillator_length: Option<f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            kind: "radial".into(),
            interaction: 9.2,
            particle_count: None,
            scattering_length: None,
            oscillator_length: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    /// Isotropic static strength λ₀ (used when `lambda0_axes` is absent).
    pub lambda0: f64,
    /// Optional per-axis static strengths (x, y, z).
    pub lambda0_axes: Option<[f64; 3]>,
    /// Isotropic drive amplitude ε.
    pub epsilon: f64,
    /// Optional per-axis drive amplitudes.
    pub epsilon_axes: Option<[f64; 3]>,
    /// Drive frequency ω (0 with ε = 0 means a static trap).
    pub omega: f64,
    /// Damping coefficient γ.
    pub gamma: f64,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            lambda0: 1.0,
            lambda0_axes: None,
            epsilon: 0.0,
            epsilon_axes: None,
            omega: 0.0,
            gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub coordinates: Vec<f64>,
    #[serde(default)]
    pub velocities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub tau_end: f64,
    pub output_interval: f64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            tau_end: 100.0,
            output_interval: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub omega_start: f64,
    pub omega_stop: f64,
    pub omega_steps: usize,
    pub epsilon_start: f64,
    pub epsilon_stop: f64,
    pub epsilon_steps: usize,
    pub resume: bool,
    pub criteria: ClassifyCriteria,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            omega_start: 1.8,
            omega_stop: 2.2,
            omega_steps: 21,
            epsilon_start: 0.0,
            epsilon_stop: 0.2,
            epsilon_steps: 11,
            resume: false,
            criteria: ClassifyCriteria::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FloquetSection {
    pub orders: Vec<usize>,
    pub epsilon_start: f64,
    pub epsilon_stop: f64,
    pub epsilon_steps: usize,
}

impl Default for FloquetSection {
    fn default() -> Self {
        Self {
            orders: vec![1, 2, 3],
            epsilon_start: 0.01,
            epsilon_stop: 0.2,
            epsilon_steps: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymptoteSection {
    pub epsilon_start: f64,
    pub epsilon_stop: f64,
    pub epsilon_steps: usize,
}

impl Default for AsymptoteSection {
    fn default() -> Self {
        Self {
            epsilon_start: 0.01,
            epsilon_stop: 0.3,
            epsilon_steps: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GpeSection {
    /// radial3d | cartesian1d.
    pub geometry: String,
    /// evolve: ground state (or Gaussian) under the configured drive.
    /// com: displaced ground state vs the center-of-mass reduction.
    pub run: String,
    /// Half-width of the domain; None picks the geometry default.
    pub extent: Option<f64>,
    pub grid_points: usize,
    pub time_step: f64,
    /// Mean-field coupling; None maps the model interaction ((2π)^{3/2}·P)
    /// in radial geometry and 0 in cartesian.
    pub coupling: Option<f64>,
    pub tau_end: f64,
    pub output_interval: f64,
    /// Start `evolve` from a Gaussian of this width instead of the ground
    /// state.
    pub initial_width: Option<f64>,
    /// Initial displacement for `run = "com"`.
    pub displacement: f64,
}

impl Default for GpeSection {
    fn default() -> Self {
        Self {
            geometry: "radial3d".into(),
            run: "evolve".into(),
            extent: None,
            grid_points: 2048,
            time_step: 1e-3,
            coupling: None,
            tau_end: 50.0,
            output_interval: 0.1,
            initial_width: None,
            displacement: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub full: bool,
    pub criterion: Option<usize>,
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Top-level entry: parses `std::env::args`, runs, returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Same as [`run`] but over explicit arguments (for tests).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version land here too and must exit 0.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(path) = &cli.output {
        config.output.path = Some(path.clone());
    }
    if let Some(format) = cli.format {
        config.output.format = match format {
            FormatArg::Csv => "csv".into(),
            FormatArg::Json => "json".into(),
        };
    }
    let format = parse_format(&config.output.format)?;
    configure_workers(cli.workers)?;

    match &cli.command {
        Command::Simulate(args) => cmd_simulate(&mut config, args, format),
        Command::Sweep(args) => cmd_sweep(&mut config, args, format),
        Command::Floquet(args) => cmd_floquet(&mut config, args, format),
        Command::Asymptote(args) => cmd_asymptote(&mut config, args, format),
        Command::Gpe(args) => cmd_gpe(&mut config, args, format),
        Command::Verify(args) => cmd_verify(&mut config, args),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read config {}: {e}", path.display()))
    })?;
    toml::from_str(&text).map_err(|e| {
        // The TOML error already carries line/column and field context.
        CliError::Validation(format!("config {}: {e}", path.display()))
    })
}

fn parse_format(name: &str) -> Result<Format, CliError> {
    match name {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::Validation(format!(
            "output.format must be \"csv\" or \"json\", got \"{other}\""
        ))),
    }
}

/// Builds the global worker pool once. The environment variable wins over
/// the flag; absent both, rayon's default (machine parallelism) stands.
fn configure_workers(flag: Option<usize>) -> Result<(), CliError> {
    let from_env = match std::env::var("CONDENSATE_WORKERS") {
        Ok(text) => Some(text.parse::<usize>().map_err(|_| {
            CliError::Validation(format!(
                "CONDENSATE_WORKERS must be a positive integer, got \"{text}\""
            ))
        })?),
        Err(_) => None,
    };
    let workers = match from_env.or(flag) {
        Some(0) => {
            return Err(CliError::Validation(
                "worker count must be at least 1".into(),
            ))
        }
        Some(n) => n,
        None => return Ok(()),
    };
    // A second configuration attempt in-process (tests) is harmless: the
    // pool is already built, so the existing size stays.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global();
    Ok(())
}

// ---------------------------------------------------------------------------
// Table output
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
enum Cell {
    F(f64),
    I(u64),
    S(String),
    Empty,
}

/// One observable block: metadata, column names, rows. The single writer
/// at the end of every subcommand; all computation happens before it runs.
#[derive(Debug, Clone, Default)]
struct Table {
    metadata: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    fn to_csv(&self, timestamp: u64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# generated: {timestamp}");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let text: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(out, "{}", text.join(","));
        }
        out
    }

    fn to_json(&self, timestamp: u64) -> String {
        let mut meta = serde_json::Map::new();
        meta.insert("generated".into(), serde_json::json!(timestamp));
        for (k, v) in &self.metadata {
            meta.insert(k.clone(), serde_json::json!(v));
        }
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| serde_json::Value::Array(row.iter().map(json_cell).collect()))
            .collect();
        let doc = serde_json::json!({
            "metadata": serde_json::Value::Object(meta),
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("tables always serialize");
        text.push('\n');
        text
    }

    fn render(&self, format: Format) -> String {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        match format {
            Format::Csv => self.to_csv(timestamp),
            Format::Json => self.to_json(timestamp),
        }
    }
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        // f64 Display is the shortest representation that round-trips.
        Cell::F(x) if x.is_finite() => format!("{x}"),
        Cell::F(_) | Cell::Empty => String::new(),
        Cell::I(n) => format!("{n}"),
        Cell::S(s) => {
            if s.contains(',') || s.contains('"') || s.contains('\n') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

fn json_cell(cell: &Cell) -> serde_json::Value {
    match cell {
        Cell::F(x) => serde_json::Number::from_f64(*x)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null),
        Cell::I(n) => serde_json::json!(n),
        Cell::S(s) => serde_json::json!(s),
        Cell::Empty => serde_json::Value::Null,
    }
}

/// The single writer: everything is rendered in memory first, then written
/// in one call to the output path or stdout.
fn write_output(config: &RunConfig, table: &Table, format: Format) -> Result<(), CliError> {
    let text = table.render(format);
    match output_path(config) {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Computation(format!("cannot write {path}: {e}"))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .map_err(|e| CliError::Computation(format!("cannot write stdout: {e}")))
        }
    }
}

fn output_path(config: &RunConfig) -> Option<&str> {
    match config.output.path.as_deref() {
        None | Some("-") => None,
        Some(path) => Some(path),
    }
}

// ---------------------------------------------------------------------------
// Shared builders
// ---------------------------------------------------------------------------

fn build_params(section: &ModelSection) -> Result<ModelParams, CliError> {
    match (
        section.particle_count,
        section.scattering_length,
        section.oscillator_length,
    ) {
        (Some(n), Some(a), Some(a0)) => Ok(ModelParams::from_physical(n, a, a0)?),
        (None, None, None) => Ok(ModelParams::from_interaction(section.interaction)?),
        _ => Err(CliError::Validation(
            "model: give all three of particle_count, scattering_length, \
             oscillator_length, or none of them"
                .into(),
        )),
    }
}

fn build_kind(section: &ModelSection) -> Result<ModelKind, CliError> {
    ModelKind::from_name(&section.kind).ok_or_else(|| {
        CliError::Validation(format!(
            "model.kind \"{}\" is not one of variational3d, radial, radial_cubic, \
             radial_quartic, impact, mathieu, center_of_mass",
            section.kind
        ))
    })
}

fn build_trap(section: &TrapSection) -> Result<TrapModulation, CliError> {
    let base = section.lambda0_axes.unwrap_or([section.lambda0; 3]);
    let amplitude = section.epsilon_axes.unwrap_or([section.epsilon; 3]);
    let driven = amplitude.iter().any(|&a| a != 0.0);
    let omega = if section.omega == 0.0 && !driven {
        // TrapModulation wants ω > 0 only when driven; pick the harmless
        // placeholder for static traps.
        1.0
    } else {
        section.omega
    };
    Ok(TrapModulation::new(base, amplitude, omega, section.gamma)?)
}

fn build_initial(
    config: &RunConfig,
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
) -> Result<DynamicalState, CliError> {
    let dim = kind.dimension();
    if let Some(section) = &config.initial {
        let mut velocities = section.velocities.clone();
        if velocities.is_empty() {
            velocities = vec![0.0; section.coordinates.len()];
        }
        if section.coordinates.len() != dim || velocities.len() != dim {
            return Err(CliError::Validation(format!(
                "initial: {} needs exactly {dim} coordinate(s) and velocity(ies)",
                kind.name()
            )));
        }
        return Ok(DynamicalState {
            coordinates: section.coordinates.clone(),
            velocities,
            time: 0.0,
        });
    }
    // Defaults: width models start at their static equilibrium, linear
    // models at (1, 0).
    let state = match kind {
        ModelKind::Variational3D => {
            let v = equilibrium_widths_3d(params, trap.base_strengths())?;
            DynamicalState::triple(v, [0.0; 3])
        }
        ModelKind::Radial(_) => {
            let v = equilibrium_width_of(kind, params, trap.base_strengths()[0])?;
            DynamicalState::single(v, 0.0)
        }
        ModelKind::ImpactOscillator | ModelKind::Mathieu | ModelKind::CenterOfMass => {
            DynamicalState::single(1.0, 0.0)
        }
    };
    Ok(state)
}

fn float_grid(start: f64, stop: f64, steps: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::Validation(format!("{what}: steps must be ≥ 1")));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Validation(format!(
            "{what}: grid endpoints must be finite"
        )));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    if !(stop > start) {
        return Err(CliError::Validation(format!(
            "{what}: stop must exceed start for more than one step"
        )));
    }
    let h = (stop - start) / (steps - 1) as f64;
    Ok((0..steps).map(|i| start + h * i as f64).collect())
}

fn common_metadata(table: &mut Table) {
    table.meta("code_version", env!("CARGO_PKG_VERSION"));
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(
    config: &mut RunConfig,
    args: &SimulateArgs,
    format: Format,
) -> Result<i32, CliError> {
    if let Some(kind) = &args.model {
        config.model.kind = kind.clone();
    }
    if let Some(p) = args.interaction {
        config.model.interaction = p;
    }
    if let Some(l) = args.lambda0 {
        config.trap.lambda0 = l;
    }
    if let Some(e) = args.epsilon {
        config.trap.epsilon = e;
    }
    if let Some(w) = args.omega {
        config.trap.omega = w;
    }
    if let Some(g) = args.gamma {
        config.trap.gamma = g;
    }
    if let Some(t) = args.tau_end {
        config.simulate.tau_end = t;
    }
    if let Some(dt) = args.output_interval {
        config.simulate.output_interval = dt;
    }

    let kind = build_kind(&config.model)?;
    let params = build_params(&config.model)?;
    let trap = build_trap(&config.trap)?;
    let state0 = build_initial(config, kind, &params, &trap)?;
    config.integrator.validate().map_err(CliError::from)?;
    if !(config.simulate.tau_end > 0.0) || !(config.simulate.output_interval > 0.0) {
        return Err(CliError::Validation(
            "simulate: tau_end and output_interval must be positive".into(),
        ));
    }

    let result = integrate_sampled(
        kind,
        &params,
        &trap,
        &state0,
        config.simulate.tau_end,
        &config.integrator,
        config.simulate.output_interval,
    );
    let (trajectory, failure): (Trajectory, Option<String>) = match result {
        Ok(t) => (t, None),
        // Keep whatever was computed: partial output with a nonzero exit.
        Err(e) => (e.partial.clone(), Some(e.failure.to_string())),
    };

    let mut table = Table::default();
    common_metadata(&mut table);
    table.meta("model", kind.name());
    table.meta("interaction", params.interaction());
    table.meta("lambda0", trap.base_strengths()[0]);
    table.meta("epsilon", trap.amplitudes()[0]);
    table.meta("omega", trap.omega());
    table.meta("gamma", trap.damping());
    table.meta("rel_tol", config.integrator.rel_tol);
    table.meta("abs_tol", config.integrator.abs_tol);
    table.meta(
        "initial",
        format!(
            "{:?} {:?}",
            state0.coordinates.as_slice(),
            state0.velocities.as_slice()
        ),
    );
    if let Some(reason) = &failure {
        table.meta("incomplete", reason);
    }
    if !trajectory.event_times.is_empty() {
        table.meta("bounce_events", trajectory.event_times.len());
    }

    let dim = kind.dimension();
    table.columns = match dim {
        1 => vec!["tau", "v", "vdot", "energy"],
        _ => vec![
            "tau", "v_x", "v_y", "v_z", "vdot_x", "vdot_y", "vdot_z", "energy",
        ],
    };
    for (t, s) in &trajectory.samples {
        let mut row = vec![Cell::F(*t)];
        for i in 0..dim {
            row.push(Cell::F(s.coordinates[i]));
        }
        for i in 0..dim {
            row.push(Cell::F(s.velocities[i]));
        }
        row.push(energy_cell(kind, &params, &trap, s, *t));
        table.rows.push(row);
    }

    write_output(config, &table, format)?;
    match failure {
        None => Ok(0),
        Some(reason) => Err(CliError::Computation(format!(
            "integration stopped early: {reason} (partial series written)"
        ))),
    }
}

/// Energy column: width models and the impact oscillator have a defined
/// energy; for the purely linear models the instantaneous quadratic energy
/// ½(v̇² + λ²(τ)v²) is reported instead.
fn energy_cell(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state: &DynamicalState,
    tau: f64,
) -> Cell {
    match energy(kind, params, trap, state, tau) {
        Ok(e) => Cell::F(e),
        Err(_) => {
            let v = state.coordinates[0];
            let vdot = state.velocities[0];
            let lam2 = trap.channel_squared(Channel::X, tau);
            Cell::F(0.5 * (vdot * vdot + lam2 * v * v))
        }
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Sidecar manifest for resumable sweeps: a fingerprint of everything that
/// determines the verdicts, plus every completed row, rewritten after each
/// row.
#[derive(Debug, Serialize, Deserialize)]
struct SweepManifest {
    config: String,
    rows: Vec<Vec<PointVerdict>>,
}

fn manifest_path(output: &str) -> PathBuf {
    PathBuf::from(format!("{output}.manifest.json"))
}

/// Canonical text of the sweep-determining configuration. Output plumbing
/// and the `resume` flag itself stay out: changing where or how the table
/// is written does not invalidate computed rows.
fn sweep_fingerprint(config: &RunConfig) -> Result<String, CliError> {
    let mut identity = RunConfig {
        model: config.model.clone(),
        trap: config.trap.clone(),
        integrator: config.integrator,
        sweep: config.sweep.clone(),
        ..RunConfig::default()
    };
    identity.sweep.resume = false;
    toml::to_string(&identity)
        .map_err(|e| CliError::Computation(format!("cannot canonicalize config: {e}")))
}

fn cmd_sweep(config: &mut RunConfig, args: &SweepArgs, format: Format) -> Result<i32, CliError> {
    if let Some(p) = args.interaction {
        config.model.interaction = p;
    }
    if let Some(g) = args.gamma {
        config.trap.gamma = g;
    }
    let s = &mut config.sweep;
    if let Some(x) = args.omega_start {
        s.omega_start = x;
    }
    if let Some(x) = args.omega_stop {
        s.omega_stop = x;
    }
    if let Some(n) = args.omega_steps {
        s.omega_steps = n;
    }
    if let Some(x) = args.epsilon_start {
        s.epsilon_start = x;
    }
    if let Some(x) = args.epsilon_stop {
        s.epsilon_stop = x;
    }
    if let Some(n) = args.epsilon_steps {
        s.epsilon_steps = n;
    }
    if args.resume {
        s.resume = true;
    }

    let kind = build_kind(&config.model)?;
    let params = build_params(&config.model)?;
    let omegas = float_grid(
        config.sweep.omega_start,
        config.sweep.omega_stop,
        config.sweep.omega_steps,
        "sweep omega",
    )?;
    let epsilons = float_grid(
        config.sweep.epsilon_start,
        config.sweep.epsilon_stop,
        config.sweep.epsilon_steps,
        "sweep epsilon",
    )?;
    for &e in &epsilons {
        if !(e >= 0.0) || !(e < 1.0) {
            return Err(CliError::Validation(format!(
                "sweep: drive amplitude must satisfy 0 ≤ ε < 1, got {e}"
            )));
        }
    }
    let ctx = SweepContext::new(kind, params, config.trap.lambda0)
        .with_damping(config.trap.gamma)
        .with_criteria(config.sweep.criteria)
        .with_integrator(config.integrator);

    // Resume bookkeeping: only meaningful with a real output file.
    let manifest_file = output_path(config).map(manifest_path);
    let config_echo = sweep_fingerprint(config)?;
    let mut completed: Vec<Vec<PointVerdict>> = Vec::new();
    if config.sweep.resume {
        if let Some(path) = &manifest_file {
            if let Ok(text) = std::fs::read_to_string(path) {
                let manifest: SweepManifest = serde_json::from_str(&text).map_err(|e| {
                    CliError::Validation(format!(
                        "manifest {} is unreadable: {e}",
                        path.display()
                    ))
                })?;
                if manifest.config != config_echo {
                    return Err(CliError::Validation(format!(
                        "manifest {} belongs to a different configuration; \
                         delete it or match the original settings",
                        path.display()
                    )));
                }
                completed = manifest.rows;
                completed.truncate(epsilons.len());
            }
        }
    }

    // ε rows run sequentially (resumable unit); the cells of a row run in
    // parallel. Collecting into a Vec keeps deterministic ordering no
    // matter the worker count.
    for (i, &epsilon) in epsilons.iter().enumerate() {
        if i < completed.len() {
            continue;
        }
        let row: Vec<PointVerdict> = omegas
            .par_iter()
            .map(|&omega| match sweep::classify_point(&ctx, omega, epsilon) {
                Ok(verdict) => verdict,
                Err(e) => PointVerdict::inconclusive(
                    omega,
                    epsilon,
                    format!("classification failed: {e}"),
                ),
            })
            .collect();
        completed.push(row);
        if let Some(path) = &manifest_file {
            let manifest = SweepManifest {
                config: config_echo.clone(),
                rows: completed.clone(),
            };
            let text = serde_json::to_string(&manifest)
                .map_err(|e| CliError::Computation(format!("manifest serialization: {e}")))?;
            std::fs::write(path, text).map_err(|e| {
                CliError::Computation(format!("cannot write {}: {e}", path.display()))
            })?;
        }
    }

    let mut table = Table::default();
    common_metadata(&mut table);
    table.meta("model", kind.name());
    table.meta("interaction", ctx.params.interaction());
    table.meta("lambda0", ctx.lambda0);
    table.meta("gamma", ctx.gamma);
    table.meta("tau_max", ctx.criteria.tau_max);
    table.meta("q_threshold", ctx.criteria.q_threshold);
    table.columns = vec![
        "omega",
        "epsilon",
        "verdict",
        "q_hat",
        "r_squared",
        "max_amplitude",
        "periods",
        "note",
    ];
    for row in &completed {
        for v in row {
            let (q_hat, r2) = match &v.fitted_exponent {
                Some(fit) => (Cell::F(fit.slope), Cell::F(fit.r_squared)),
                None => (Cell::Empty, Cell::Empty),
            };
            table.rows.push(vec![
                Cell::F(v.omega),
                Cell::F(v.epsilon),
                Cell::S(v.verdict.name().into()),
                q_hat,
                r2,
                Cell::F(v.max_amplitude),
                Cell::I(v.periods as u64),
                match &v.note {
                    Some(n) => Cell::S(n.clone()),
                    None => Cell::Empty,
                },
            ]);
        }
    }

    write_output(config, &table, format)?;
    // The sweep completed: the sidecar has served its purpose.
    if let Some(path) = &manifest_file {
        let _ = std::fs::remove_file(path);
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// floquet
// ---------------------------------------------------------------------------

fn cmd_floquet(
    config: &mut RunConfig,
    args: &FloquetArgs,
    format: Format,
) -> Result<i32, CliError> {
    if let Some(orders) = &args.orders {
        config.floquet.orders = orders.clone();
    }
    if let Some(l) = args.lambda0 {
        config.trap.lambda0 = l;
    }
    if let Some(g) = args.gamma {
        config.trap.gamma = g;
    }
    let f = &mut config.floquet;
    if let Some(x) = args.epsilon_start {
        f.epsilon_start = x;
    }
    if let Some(x) = args.epsilon_stop {
        f.epsilon_stop = x;
    }
    if let Some(n) = args.epsilon_steps {
        f.epsilon_steps = n;
    }

    let epsilons = float_grid(
        config.floquet.epsilon_start,
        config.floquet.epsilon_stop,
        config.floquet.epsilon_steps,
        "floquet epsilon",
    )?;
    if config.floquet.orders.is_empty() {
        return Err(CliError::Validation("floquet: orders must not be empty".into()));
    }
    let lambda0 = config.trap.lambda0;
    let gamma = config.trap.gamma;

    let mut table = Table::default();
    common_metadata(&mut table);
    table.meta("lambda0", lambda0);
    table.meta("gamma", gamma);
    table.columns = vec![
        "order",
        "epsilon",
        "omega_lower",
        "omega_upper",
        "band_lower",
        "band_upper",
    ];

    for &order in &config.floquet.orders {
        let wedge = floquet::trace_wedge(order, &epsilons, gamma, lambda0, &config.integrator)
            .map_err(|e| CliError::Computation(format!("wedge {order}: {e}")))?;
        table.meta(
            &format!("tip_{order}"),
            format!("{} {}", wedge.tip.0, wedge.tip.1),
        );
        for (i, &eps) in epsilons.iter().enumerate() {
            let mut row = vec![Cell::I(order as u64), Cell::F(eps)];
            match wedge.interval(i) {
                Some((lo, hi)) => {
                    row.push(Cell::F(lo));
                    row.push(Cell::F(hi));
                }
                None => {
                    row.push(Cell::Empty);
                    row.push(Cell::Empty);
                }
            }
            // Asymptotic overlay exists for the principal wedge only; its
            // formulas are λ₀-scale-invariant, so scale frequencies by λ₀.
            if order == 1 && gamma == 0.0 {
                let (lo, hi) = asymptotics::resonance_band(eps);
                row.push(Cell::F(lambda0 * lo));
                row.push(Cell::F(lambda0 * hi));
            } else {
                row.push(Cell::Empty);
                row.push(Cell::Empty);
            }
            table.rows.push(row);
        }
    }

    write_output(config, &table, format)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// asymptote
// ---------------------------------------------------------------------------

fn cmd_asymptote(
    config: &mut RunConfig,
    args: &AsymptoteArgs,
    format: Format,
) -> Result<i32, CliError> {
    if let Some(l) = args.lambda0 {
        config.trap.lambda0 = l;
    }
    if let Some(g) = args.gamma {
        config.trap.gamma = g;
    }
    let a = &mut config.asymptote;
    if let Some(x) = args.epsilon_start {
        a.epsilon_start = x;
    }
    if let Some(x) = args.epsilon_stop {
        a.epsilon_stop = x;
    }
    if let Some(n) = args.epsilon_steps {
        a.epsilon_steps = n;
    }

    let epsilons = float_grid(
        config.asymptote.epsilon_start,
        config.asymptote.epsilon_stop,
        config.asymptote.epsilon_steps,
        "asymptote epsilon",
    )?;
    let lambda0 = config.trap.lambda0;
    if !(lambda0 > 0.0) {
        return Err(CliError::Validation(format!(
            "trap.lambda0 must be positive, got {lambda0}"
        )));
    }
    let gamma = config.trap.gamma;

    let mut table = Table::default();
    common_metadata(&mut table);
    table.meta("lambda0", lambda0);
    table.meta("gamma", gamma);
    table.columns = vec![
        "epsilon",
        "omega_peak",
        "band_lower",
        "band_upper",
        "growth_at_peak",
        "damped_growth",
    ];
    // The asymptotic module is normalized to λ₀ = 1; frequencies and rates
    // both scale linearly with λ₀, damping enters as γ/λ₀.
    for &eps in &epsilons {
        let prediction =
            asymptotics::predict(asymptotics::optimal_frequency(eps), eps, gamma / lambda0);
        let (lo, hi) = prediction.band;
        table.rows.push(vec![
            Cell::F(eps),
            Cell::F(lambda0 * prediction.omega_max),
            Cell::F(lambda0 * lo),
            Cell::F(lambda0 * hi),
            match prediction.q {
                Some(q) => Cell::F(lambda0 * q),
                None => Cell::Empty,
            },
            match prediction.damped_exponent {
                Some(q) => Cell::F(lambda0 * q),
                None => Cell::Empty,
            },
        ]);
    }

    write_output(config, &table, format)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// gpe
// ---------------------------------------------------------------------------

fn build_gpe_config(
    config: &RunConfig,
    params: &ModelParams,
    trap: &TrapModulation,
) -> Result<GpeConfig, CliError> {
    let geometry = match config.gpe.geometry.as_str() {
        "radial3d" => Geometry::Radial3d,
        "cartesian1d" => Geometry::Cartesian1d,
        other => {
            return Err(CliError::Validation(format!(
                "gpe.geometry must be \"radial3d\" or \"cartesian1d\", got \"{other}\""
            )))
        }
    };
    let mut built = match geometry {
        Geometry::Radial3d => GpeConfig::radial(params, *trap)?,
        Geometry::Cartesian1d => GpeConfig::cartesian(0.0, *trap),
    };
    if let Some(extent) = config.gpe.extent {
        built.extent = extent;
    }
    built.grid_points = config.gpe.grid_points;
    built.time_step = config.gpe.time_step;
    if let Some(coupling) = config.gpe.coupling {
        built.coupling = coupling;
    }
    built.validate().map_err(CliError::from)?;
    Ok(built)
}

fn cmd_gpe(config: &mut RunConfig, args: &GpeArgs, format: Format) -> Result<i32, CliError> {
    if let Some(run) = &args.run {
        config.gpe.run = run.clone();
    }
    if let Some(geometry) = &args.geometry {
        config.gpe.geometry = geometry.clone();
    }
    if let Some(g) = args.coupling {
        config.gpe.coupling = Some(g);
    }
    if let Some(t) = args.tau_end {
        config.gpe.tau_end = t;
    }
    if let Some(dt) = args.output_interval {
        config.gpe.output_interval = dt;
    }
    if let Some(w) = args.initial_width {
        config.gpe.initial_width = Some(w);
    }
    if let Some(d) = args.displacement {
        config.gpe.displacement = d;
    }
    if let Some(e) = args.epsilon {
        config.trap.epsilon = e;
    }
    if let Some(w) = args.omega {
        config.trap.omega = w;
    }
    if let Some(p) = args.interaction {
        config.model.interaction = p;
    }

    let params = build_params(&config.model)?;
    let trap = build_trap(&config.trap)?;
    let gpe_config = build_gpe_config(config, &params, &trap)?;
    if !(config.gpe.tau_end > 0.0) || !(config.gpe.output_interval > 0.0) {
        return Err(CliError::Validation(
            "gpe: tau_end and output_interval must be positive".into(),
        ));
    }

    match config.gpe.run.as_str() {
        "evolve" => gpe_evolve(config, &params, &trap, &gpe_config, format),
        "com" => gpe_com(config, &trap, &gpe_config, format),
        other => Err(CliError::Validation(format!(
            "gpe.run must be \"evolve\" or \"com\", got \"{other}\""
        ))),
    }
}

fn gpe_table_header(table: &mut Table, gpe_config: &GpeConfig) {
    common_metadata(table);
    table.meta(
        "geometry",
        match gpe_config.geometry {
            Geometry::Radial3d => "radial3d",
            Geometry::Cartesian1d => "cartesian1d",
        },
    );
    table.meta("extent", gpe_config.extent);
    table.meta("grid_points", gpe_config.grid_points);
    table.meta("time_step", gpe_config.time_step);
    table.meta("coupling", gpe_config.coupling);
    table.meta("lambda0", gpe_config.trap.base_strengths()[0]);
    table.meta("epsilon", gpe_config.trap.amplitudes()[0]);
    table.meta("omega", gpe_config.trap.omega());
}

fn gpe_evolve(
    config: &RunConfig,
    params: &ModelParams,
    trap: &TrapModulation,
    gpe_config: &GpeConfig,
    format: Format,
) -> Result<i32, CliError> {
    // Starting field: relaxed ground state of the undriven trap, or a
    // Gaussian of the requested width.
    let start = match config.gpe.initial_width {
        Some(width) => gpe::WaveField::gaussian(gpe_config, width)
            .map_err(|e| CliError::Validation(e.to_string()))?,
        None => {
            let static_trap = TrapModulation::new(
                trap.base_strengths(),
                [0.0; 3],
                1.0,
                0.0,
            )?;
            let ground_config = GpeConfig {
                trap: static_trap,
                ..*gpe_config
            };
            let ground = gpe::ground_state(&ground_config)
                .map_err(|e| CliError::Computation(format!("ground state: {e}")))?;
            ground.field
        }
    };
    let _ = params; // coupling already folded into gpe_config

    let result = gpe::evolve(&start, gpe_config, config.gpe.tau_end, config.gpe.output_interval);
    let (evolution, failure) = match result {
        Ok(run) => (run, None),
        Err(GpeError::DomainEscape { time, evolution }) => (
            *evolution,
            Some(format!("density reached the boundary at τ = {time:.3}")),
        ),
        Err(e) => return Err(CliError::Computation(e.to_string())),
    };

    let mut table = Table::default();
    gpe_table_header(&mut table, gpe_config);
    if let Some(reason) = &failure {
        table.meta("incomplete", reason);
    }
    let cartesian = matches!(gpe_config.geometry, Geometry::Cartesian1d);
    table.columns = if cartesian {
        vec!["tau", "norm", "energy", "width", "x_mean"]
    } else {
        vec!["tau", "norm", "energy", "width"]
    };
    for rec in &evolution.records {
        let mut row = vec![
            Cell::F(rec.time),
            Cell::F(rec.norm),
            Cell::F(rec.energy),
            Cell::F(rec.width),
        ];
        if cartesian {
            row.push(match rec.first_moment {
                Some(x) => Cell::F(x),
                None => Cell::Empty,
            });
        }
        table.rows.push(row);
    }

    write_output(config, &table, format)?;
    match failure {
        None => Ok(0),
        Some(reason) => Err(CliError::Computation(format!(
            "evolution stopped early: {reason} (partial series written)"
        ))),
    }
}

fn gpe_com(
    config: &RunConfig,
    _trap: &TrapModulation,
    gpe_config: &GpeConfig,
    format: Format,
) -> Result<i32, CliError> {
    let check = gpe::center_of_mass_check(gpe_config, config.gpe.displacement, config.gpe.tau_end)
        .map_err(|e| CliError::Computation(e.to_string()))?;

    let mut table = Table::default();
    gpe_table_header(&mut table, gpe_config);
    table.meta("displacement", check.displacement);
    table.meta("max_deviation", check.max_deviation);
    if check.escaped {
        // Escape is the expected outcome for resonant drives: the
        // comparison covers the records up to that point.
        table.meta("escaped", "true");
    }
    table.columns = vec!["tau", "x_pde", "x_ode", "deviation"];
    for i in 0..check.times.len() {
        table.rows.push(vec![
            Cell::F(check.times[i]),
            Cell::F(check.pde_mean[i]),
            Cell::F(check.ode_reference[i]),
            Cell::F((check.pde_mean[i] - check.ode_reference[i]).abs()),
        ]);
    }

    write_output(config, &table, format)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(config: &mut RunConfig, args: &VerifyArgs) -> Result<i32, CliError> {
    if args.full {
        config.verify.full = true;
    }
    if let Some(id) = args.criterion {
        config.verify.criterion = Some(id);
    }
    if let Some(id) = config.verify.criterion {
        if !(1..=verify::CRITERION_COUNT).contains(&id) {
            return Err(CliError::Validation(format!(
                "verify.criterion must be in 1..={}, got {id}",
                verify::CRITERION_COUNT
            )));
        }
    }

    let progress = |outcome: &verify::CriterionOutcome| {
        // Human-readable progress to stderr; the report itself goes to the
        // output path (or stdout) as JSON.
        eprintln!(
            "[{}] criterion {:>2} — {} ({:.1}s): {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.id,
            outcome.name,
            outcome.seconds,
            outcome.details
        );
    };
    let outcomes = match config.verify.criterion {
        Some(id) => {
            let outcome = verify::run_criterion(id);
            progress(&outcome);
            vec![outcome]
        }
        None => verify::run_suite(config.verify.full, progress),
    };

    let passed = outcomes.iter().filter(|o| o.passed).count();
    let report = serde_json::json!({
        "code_version": env!("CARGO_PKG_VERSION"),
        "full": config.verify.full,
        "passed": passed,
        "failed": outcomes.len() - passed,
        "criteria": outcomes,
    });
    let mut text =
        serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
    text.push('\n');
    match output_path(config) {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Computation(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }

    // Acceptance failure is its own exit code, distinct from computational
    // failure inside a criterion (those surface as failed criteria too).
    if passed == outcomes.len() {
        Ok(0)
    } else {
        Ok(3)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips_through_toml() {
        let config = RunConfig::default();
        let text = toml::to_string(&config).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = toml::from_str::<RunConfig>("[model]\nknid = \"radial\"\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("knid"), "{text}");
    }

    #[test]
    fn out_of_section_unknown_key_rejected() {
        assert!(toml::from_str::<RunConfig>("[nonsense]\nx = 1\n").is_err());
    }

    #[test]
    fn criteria_section_parses() {
        let config: RunConfig = toml::from_str(
            "[sweep]\nomega_steps = 5\n[sweep.criteria]\ntau_max = 200.0\n",
        )
        .unwrap();
        assert_eq!(config.sweep.omega_steps, 5);
        assert_eq!(config.sweep.criteria.tau_max, 200.0);
        assert_eq!(
            config.sweep.criteria.q_threshold,
            ClassifyCriteria::default().q_threshold
        );
    }

    #[test]
    fn float_grid_endpoints_and_counts() {
        let grid = float_grid(1.0, 2.0, 5, "test").unwrap();
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], 1.0);
        assert_eq!(grid[4], 2.0);
        assert_eq!(float_grid(3.0, 3.0, 1, "test").unwrap(), vec![3.0]);
        assert!(float_grid(2.0, 1.0, 5, "test").is_err());
        assert!(float_grid(1.0, 2.0, 0, "test").is_err());
    }

    #[test]
    fn csv_cells_render_cleanly() {
        assert_eq!(csv_cell(&Cell::F(0.1)), "0.1");
        assert_eq!(csv_cell(&Cell::F(f64::NAN)), "");
        assert_eq!(csv_cell(&Cell::I(42)), "42");
        assert_eq!(csv_cell(&Cell::S("plain".into())), "plain");
        assert_eq!(csv_cell(&Cell::S("a,b".into())), "\"a,b\"");
        assert_eq!(csv_cell(&Cell::Empty), "");
    }

    #[test]
    fn json_nan_becomes_null() {
        assert_eq!(json_cell(&Cell::F(f64::NAN)), serde_json::Value::Null);
        assert_eq!(json_cell(&Cell::F(1.5)), serde_json::json!(1.5));
    }

    #[test]
    fn table_renders_metadata_before_header() {
        let mut table = Table::default();
        table.meta("alpha", 1);
        table.columns = vec!["a", "b"];
        table.rows.push(vec![Cell::F(1.0), Cell::Empty]);
        let csv = table.to_csv(123);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# generated: 123");
        assert_eq!(lines[1], "# alpha: 1");
        assert_eq!(lines[2], "a,b");
        assert_eq!(lines[3], "1,");
        let json = table.to_json(123);
        assert!(json.contains("\"generated\": 123"));
    }

    #[test]
    fn build_trap_accepts_anisotropic_axes() {
        let section = TrapSection {
            lambda0_axes: Some([1.0, 1.0, 8.0_f64.sqrt()]),
            epsilon_axes: Some([0.1, 0.1, 0.0]),
            omega: 2.0,
            ..TrapSection::default()
        };
        let trap = build_trap(&section).unwrap();
        assert_eq!(trap.base_strengths()[2], 8.0_f64.sqrt());
        assert_eq!(trap.amplitudes()[2], 0.0);
    }

    #[test]
    fn build_initial_defaults_to_equilibrium() {
        let config = RunConfig::default();
        let params = ModelParams::from_interaction(9.2).unwrap();
        let trap = TrapModulation::static_trap(1.0).unwrap();
        let kind = ModelKind::Radial(crate::model::SingularKind::Full);
        let state = build_initial(&config, kind, &params, &trap).unwrap();
        assert!((state.coordinates[0] - 1.6098).abs() < 1e-3);
        assert_eq!(state.velocities[0], 0.0);
    }

    #[test]
    fn build_initial_rejects_wrong_dimension() {
        let config = RunConfig {
            initial: Some(InitialSection {
                coordinates: vec![1.0, 2.0],
                velocities: vec![],
            }),
            ..RunConfig::default()
        };
        let params = ModelParams::from_interaction(9.2).unwrap();
        let trap = TrapModulation::static_trap(1.0).unwrap();
        let kind = ModelKind::Radial(crate::model::SingularKind::Full);
        assert!(build_initial(&config, kind, &params, &trap).is_err());
    }

    #[test]
    fn model_section_requires_full_physical_triple() {
        let section = ModelSection {
            particle_count: Some(1.5e5),
            ..ModelSection::default()
        };
        assert!(build_params(&section).is_err());
    }

    #[test]
    fn physical_triple_reproduces_reference_interaction() {
        // √(2/π)·N·a/a₀ with the quoted reference numbers lands near 9.2.
        let section = ModelSection {
            particle_count: Some(1.5e5),
            scattering_length: Some(5.4e-4),
            oscillator_length: Some(7.0),
            ..ModelSection::default()
        };
        let params = build_params(&section).unwrap();
        assert!((params.interaction() - 9.2).abs() < 0.1, "{}", params.interaction());
    }
}
