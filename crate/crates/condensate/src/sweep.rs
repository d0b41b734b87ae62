//! Parameter-space exploration: long-horizon classification of driven width
//! dynamics into stable / resonant / limit-cycle verdicts, resonance maps
//! over (ω, ε) grids, instability-threshold scans, wedge-tip location from
//! barrier-dominated orbits, and damped limit-cycle search.
//!
//! Everything here works on the *nonlinear* trajectories themselves (the
//! linear one-period analysis lives in [`crate::floquet`]); the two views are
//! cross-checked in the test suites. The impact oscillator is classified
//! through its exact conjugacy with the linear oscillator: a bounce orbit is
//! the coordinate-wise fold v = |u| of a signed solution, so envelopes and
//! verdicts coincide and the fold is applied only when reporting states.

use crate::integrate::{
    drive_observed, AcceptedStep, IntegrationFailure, IntegratorConfig, StepObserver, StepOutcome,
    StroboscopicObserver, MAX_DIM,
};
use crate::model::{
    equilibrium_width_of, equilibrium_widths_3d, DynamicalState, ModelError, ModelKind,
    ModelParams, TrapModulation,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Anything that can go wrong while sweeping.
///
/// Dynamical failures *inside* a grid cell (step underflow during collapse,
/// too many bounce events, …) are folded into the cell's verdict as
/// [`Verdict::Inconclusive`] with a note, so sweeps over rough parameter
/// regions still complete; this error type covers misconfiguration and
/// failures of auxiliary runs instead.
#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{0}")]
    Invalid(#[from] ModelError),
    #[error("integration failed: {0}")]
    Integration(IntegrationFailure),
}

// ---------------------------------------------------------------------------
// Criteria and context
// ---------------------------------------------------------------------------

/// Thresholds for trajectory classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyCriteria {
    /// Integration horizon per point (dimensionless time).
    pub tau_max: f64,
    /// Minimum log-envelope slope that counts as exponential growth.
    pub q_threshold: f64,
    /// Minimum R² for the envelope fit before growth is trusted.
    pub r_squared_min: f64,
    /// Escape when the deviation exceeds this multiple of the reference
    /// scale (the equilibrium width, or 1 for the linear models).
    pub escape_factor: f64,
    /// Successive stroboscopic states closer than this count as a converged
    /// cycle (damped runs only).
    pub cycle_tolerance: f64,
    /// Relative offset of the default initial condition from equilibrium.
    pub seed_offset: f64,
}

impl Default for ClassifyCriteria {
    fn default() -> Self {
        Self {
            tau_max: 400.0,
            q_threshold: 0.005,
            r_squared_min: 0.9,
            escape_factor: 50.0,
            cycle_tolerance: 1e-6,
            seed_offset: 0.01,
        }
    }
}

impl ClassifyCriteria {
    pub fn validate(&self) -> Result<(), ModelError> {
        let checks: [(&str, bool); 6] = [
            ("tau_max must be positive and finite", self.tau_max > 0.0 && self.tau_max.is_finite()),
            ("q_threshold must be positive", self.q_threshold > 0.0),
            (
                "r_squared_min must lie in (0, 1)",
                self.r_squared_min > 0.0 && self.r_squared_min < 1.0,
            ),
            ("escape_factor must exceed 1", self.escape_factor > 1.0),
            ("cycle_tolerance must be positive", self.cycle_tolerance > 0.0),
            (
                "seed_offset must lie in (0, 0.5)",
                self.seed_offset > 0.0 && self.seed_offset < 0.5,
            ),
        ];
        for (msg, ok) in checks {
            if !ok {
                return Err(ModelError::InvalidParameter(msg.into()));
            }
        }
        Ok(())
    }
}

/// Everything held fixed while (ω, ε) vary: the model, its interaction
/// strength, the static trap, damping, classification thresholds, the
/// integrator configuration, and an optional explicit initial state (the
/// default seeds sit `seed_offset` away from equilibrium).
#[derive(Debug, Clone)]
pub struct SweepContext {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub lambda0: f64,
    pub gamma: f64,
    pub criteria: ClassifyCriteria,
    pub integrator: IntegratorConfig,
    pub initial: Option<DynamicalState>,
}

impl SweepContext {
    pub fn new(kind: ModelKind, params: ModelParams, lambda0: f64) -> Self {
        Self {
            kind,
            params,
            lambda0,
            gamma: 0.0,
            criteria: ClassifyCriteria::default(),
            integrator: IntegratorConfig::default(),
            initial: None,
        }
    }

    pub fn with_damping(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_criteria(mut self, criteria: ClassifyCriteria) -> Self {
        self.criteria = criteria;
        self
    }

    pub fn with_integrator(mut self, config: IntegratorConfig) -> Self {
        self.integrator = config;
        self
    }

    pub fn with_initial(mut self, state: DynamicalState) -> Self {
        self.initial = Some(state);
        self
    }

    fn validate(&self) -> Result<(), ModelError> {
        self.criteria.validate()?;
        self.integrator.validate()?;
        if !(self.lambda0 > 0.0) || !self.lambda0.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "static trap strength λ₀ must be positive, got {}",
                self.lambda0
            )));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "damping γ must be ≥ 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

/// Long-horizon fate of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Bounded with no sustained envelope growth.
    Stable,
    /// Exponential envelope growth or escape past the amplitude bound.
    Resonant,
    /// Damped run whose stroboscopic states converged to a fixed point of
    /// the period map (a periodic orbit of the flow; degenerate when ε = 0).
    LimitCycle,
    /// Not classifiable: integration ended too early, or the envelope slope
    /// is positive but the fit is poor (typically near a stability
    /// boundary).
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Resonant => "resonant",
            Verdict::LimitCycle => "limit_cycle",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Least-squares line through (τ, ln envelope).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Growth exponent estimate (slope of the log-envelope).
    pub slope: f64,
    /// Standard error of the slope.
    pub std_error: f64,
    /// Coefficient of determination of the fit.
    pub r_squared: f64,
    /// Number of envelope points used.
    pub points: usize,
}

/// Classification of a single (ω, ε) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVerdict {
    pub omega: f64,
    pub epsilon: f64,
    pub verdict: Verdict,
    /// Envelope growth fit over the second half of the run, when available.
    pub fitted_exponent: Option<GrowthFit>,
    /// Largest deviation from the reference seen anywhere in the run.
    pub max_amplitude: f64,
    /// Complete drive periods actually integrated.
    pub periods: usize,
    /// Stroboscopic fixed point, for limit-cycle verdicts.
    pub cycle_state: Option<DynamicalState>,
    /// Diagnostic context (early integrator exit, poor fit, …).
    pub note: Option<String>,
}

impl PointVerdict {
    pub(crate) fn inconclusive(omega: f64, epsilon: f64, note: String) -> Self {
        Self {
            omega,
            epsilon,
            verdict: Verdict::Inconclusive,
            fitted_exponent: None,
            max_amplitude: 0.0,
            periods: 0,
            cycle_state: None,
            note: Some(note),
        }
    }
}

// ---------------------------------------------------------------------------
// Grids and maps
// ---------------------------------------------------------------------------

/// Inclusive linearly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(start: f64, stop: f64, steps: usize) -> Self {
        Self { start, stop, steps }
    }

    pub fn validate(&self, name: &str) -> Result<(), ModelError> {
        if self.steps == 0 {
            return Err(ModelError::InvalidParameter(format!(
                "{name} axis needs at least one point"
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "{name} axis bounds must be finite"
            )));
        }
        if self.steps == 1 {
            if self.stop < self.start {
                return Err(ModelError::InvalidParameter(format!(
                    "{name} axis must have stop ≥ start"
                )));
            }
        } else if !(self.stop > self.start) {
            return Err(ModelError::InvalidParameter(format!(
                "{name} axis with {} points must have stop > start",
                self.steps
            )));
        }
        Ok(())
    }

    /// The axis points; endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + k as f64 * h
                }
            })
            .collect()
    }
}

/// Provenance recorded with every map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapMetadata {
    pub model: String,
    pub interaction: f64,
    pub lambda0: f64,
    pub gamma: f64,
    pub criteria: ClassifyCriteria,
    pub code_version: String,
}

/// Verdict grid over drive frequency and amplitude.
///
/// Cells are stored row-major with ε as the outer (row) index and ω as the
/// inner (column) index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceMap {
    pub metadata: MapMetadata,
    pub omega_values: Vec<f64>,
    pub epsilon_values: Vec<f64>,
    pub cells: Vec<PointVerdict>,
}

impl ResonanceMap {
    /// Cell at row `i_eps`, column `j_omega`.
    pub fn cell(&self, i_eps: usize, j_omega: usize) -> &PointVerdict {
        &self.cells[i_eps * self.omega_values.len() + j_omega]
    }

    /// Number of cells carrying the given verdict.
    pub fn count(&self, verdict: Verdict) -> usize {
        self.cells.iter().filter(|c| c.verdict == verdict).count()
    }
}

/// Smallest drive amplitude that destabilizes the system, and the frequency
/// at which it was detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceThreshold {
    pub epsilon: f64,
    pub omega: f64,
}

/// Wedge-tip location measured from barrier-dominated orbits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipEstimate {
    /// Center of the contiguous unstable frequency run.
    pub omega: f64,
    /// Largest growth metric observed inside that run.
    pub growth: f64,
    /// First and last unstable scan frequencies of the run.
    pub interval: (f64, f64),
    /// Number of scan points in the run.
    pub unstable_points: usize,
}

/// A converged stroboscopic fixed point and the periodic orbit through it.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCycle {
    /// State at a drive-phase-zero instant on the cycle (folded to widths
    /// for the impact oscillator).
    pub state: DynamicalState,
    /// Peak-to-trough excursion of the first coordinate over one period.
    pub amplitude: f64,
    /// Drive periods needed to converge.
    pub periods: usize,
}

/// Outcome of a damped limit-cycle search.
#[derive(Debug, Clone, PartialEq)]
pub enum CycleOutcome {
    Converged(LimitCycle),
    /// Ran out of periods before successive stroboscopic states settled.
    NotConverged { last_delta: f64, periods: usize },
    /// Both seeds settled, but onto states further apart than the match
    /// tolerance — either coexisting attractors or marginal convergence.
    SeedDependent { difference: f64 },
    /// The deviation grew past the escape bound instead of settling.
    Escaped { max_amplitude: f64 },
}

/// Per-period envelope record of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    /// Bucket centers (one complete drive period each).
    pub times: Vec<f64>,
    /// Per-period maxima of the deviation from the reference.
    pub maxima: Vec<f64>,
    /// Deviation magnitude exactly at the stroboscopic instants.
    pub strobe_amplitudes: Vec<f64>,
    /// Log-envelope fit over the second half of the run.
    pub fit: Option<GrowthFit>,
    pub escaped: bool,
    pub max_amplitude: f64,
    /// Complete drive periods integrated.
    pub periods: usize,
    pub note: Option<String>,
}

// ---------------------------------------------------------------------------
// Internal envelope machinery
// ---------------------------------------------------------------------------

/// The model actually integrated: bounce orbits are the fold v = |u| of the
/// signed linear oscillator, so the impact model runs as the linear one and
/// reported states are folded afterwards.
fn effective_kind(kind: ModelKind) -> ModelKind {
    match kind {
        ModelKind::ImpactOscillator => ModelKind::Mathieu,
        other => other,
    }
}

fn fold_state(kind: ModelKind, mut state: DynamicalState) -> DynamicalState {
    if kind == ModelKind::ImpactOscillator {
        for i in 0..state.coordinates.len() {
            if state.coordinates[i] < 0.0 {
                state.coordinates[i] = -state.coordinates[i];
                state.velocities[i] = -state.velocities[i];
            }
        }
    }
    state
}

/// Deviation reference and amplitude scale for a model: the equilibrium
/// width for width models with a singular core, the origin (scale 1) for the
/// linear models and the impact oscillator.
fn reference_and_scale(ctx: &SweepContext) -> Result<(f64, f64), ModelError> {
    let v_ref = equilibrium_width_of(ctx.kind, &ctx.params, ctx.lambda0)?;
    let scale = if v_ref > 0.0 { v_ref } else { 1.0 };
    Ok((v_ref, scale))
}

/// Default seed: equilibrium nudged by `seed_offset` for singular-core
/// models, unit amplitude for the linear ones.
fn default_initial(ctx: &SweepContext, v_ref: f64) -> Result<DynamicalState, ModelError> {
    let offset = ctx.criteria.seed_offset;
    Ok(match ctx.kind {
        ModelKind::Variational3D => {
            let ws = equilibrium_widths_3d(&ctx.params, [ctx.lambda0; 3])?;
            DynamicalState::triple(
                [ws[0] * (1.0 + offset), ws[1] * (1.0 + offset), ws[2] * (1.0 + offset)],
                [0.0; 3],
            )
        }
        ModelKind::Radial(_) => DynamicalState::single(v_ref * (1.0 + offset), 0.0),
        ModelKind::ImpactOscillator | ModelKind::Mathieu | ModelKind::CenterOfMass => {
            DynamicalState::single(1.0, 0.0)
        }
    })
}

struct EnvelopeData {
    strobe: Vec<DynamicalState>,
    bucket_times: Vec<f64>,
    bucket_maxima: Vec<f64>,
    global_max: f64,
    escaped: bool,
    periods_done: usize,
    failure: Option<IntegrationFailure>,
}

/// Integrate `n_periods` drive periods recording stroboscopic states and
/// per-period deviation maxima. Dynamical failures are returned as data
/// (with whatever was collected before them); configuration errors abort.
#[allow(clippy::too_many_arguments)]
fn run_envelope(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    initial: &DynamicalState,
    n_periods: usize,
    reference: f64,
    escape_above: Option<f64>,
    config: &IntegratorConfig,
) -> Result<EnvelopeData, ModelError> {
    initial.validate_for(kind)?;
    config.validate()?;
    let period = trap.drive_period()?;
    let mut obs = StroboscopicObserver::new(kind.dimension(), initial.time, period, n_periods);
    obs.reference = reference;
    obs.escape_above = escape_above;
    let tau_end = initial.time + (n_periods as f64 + 0.5) * period;

    let failure = match drive_observed(kind, params, trap, initial, tau_end, config, &mut obs) {
        Ok(_) => None,
        Err((_, IntegrationFailure::InvalidInput(e)))
        | Err((_, IntegrationFailure::BadInitialState(e))) => return Err(e),
        Err((_, other)) => Some(other),
    };

    // Keep only complete period buckets: the final bucket is partial by
    // construction (the run extends half a period past the last strobe, or
    // was truncated by escape/failure).
    let mut maxima = obs.period_max;
    maxima.pop();
    let mut bucket_times = Vec::with_capacity(maxima.len());
    let mut bucket_maxima = Vec::with_capacity(maxima.len());
    for (k, &m) in maxima.iter().enumerate() {
        if m.is_finite() {
            bucket_times.push(initial.time + (k as f64 + 0.5) * period);
            bucket_maxima.push(m);
        }
    }

    let periods_done = obs.samples.len().saturating_sub(1);
    Ok(EnvelopeData {
        strobe: obs.samples,
        bucket_times,
        bucket_maxima,
        global_max: if obs.global_max.is_finite() {
            obs.global_max
        } else {
            0.0
        },
        escaped: obs.escaped,
        periods_done,
        failure,
    })
}

/// Ordinary least squares for y against x; `None` below 3 points or for a
/// degenerate abscissa.
fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<GrowthFit> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let x_mean = xs[..n].iter().sum::<f64>() / nf;
    let y_mean = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = xs[i] - x_mean;
        let dy = ys[i] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let sse = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let std_error = (sse / ((nf - 2.0) * sxx)).sqrt();
    Some(GrowthFit {
        slope,
        std_error,
        r_squared,
        points: n,
    })
}

/// Fit the log-envelope over the second half of the complete periods.
fn fit_last_half(data: &EnvelopeData) -> Option<GrowthFit> {
    let m = data.bucket_maxima.len();
    if m < 4 {
        return None;
    }
    let start = m / 2;
    let xs = &data.bucket_times[start..];
    let ys: Vec<f64> = data.bucket_maxima[start..]
        .iter()
        .map(|&v| v.max(1e-300).ln())
        .collect();
    linear_fit(xs, &ys)
}

fn last_strobe_delta(strobe: &[DynamicalState]) -> Option<f64> {
    if strobe.len() < 2 {
        return None;
    }
    let a = &strobe[strobe.len() - 2];
    let b = &strobe[strobe.len() - 1];
    let mut d: f64 = 0.0;
    for i in 0..a.coordinates.len() {
        d = d.max((a.coordinates[i] - b.coordinates[i]).abs());
        d = d.max((a.velocities[i] - b.velocities[i]).abs());
    }
    Some(d)
}

fn period_count(tau_max: f64, omega: f64) -> Result<usize, ModelError> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(ModelError::InvalidParameter(format!(
            "drive frequency must be positive and finite, got {omega}"
        )));
    }
    let n = (tau_max * omega / TAU).floor() as usize;
    if n < 10 {
        return Err(ModelError::InvalidParameter(format!(
            "horizon τ_max = {tau_max} spans only {n} drive periods at ω = {omega}; \
             at least 10 are needed for classification"
        )));
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Classify the long-horizon fate of the driven system at one (ω, ε) point.
///
/// The trajectory is integrated for `floor(τ_max / T)` drive periods from
/// the context's initial state (or the default near-equilibrium seed) and
/// judged in precedence order:
///
/// 1. **resonant** — the deviation escaped past `escape_factor · scale`, or
///    the log-envelope slope over the second half exceeds `q_threshold`
///    with fit quality above `r_squared_min`;
/// 2. **limit_cycle** — damped runs whose final successive stroboscopic
///    states differ by less than `cycle_tolerance`;
/// 3. **stable** — bounded with envelope slope at or below `q_threshold`;
/// 4. **inconclusive** — everything else (early integrator exit with fewer
///    than 10 complete periods, or a positive slope the fit cannot back).
///
/// Integrator failures after ≥ 10 complete periods classify on the partial
/// data and carry a note; earlier failures are inconclusive.
pub fn classify_point(
    ctx: &SweepContext,
    omega: f64,
    epsilon: f64,
) -> Result<PointVerdict, SweepError> {
    ctx.validate()?;
    let n_periods = period_count(ctx.criteria.tau_max, omega)?;
    let trap = TrapModulation::isotropic(ctx.lambda0, epsilon, omega)?
        .with_damping(ctx.gamma)?;
    let run_kind = effective_kind(ctx.kind);
    let (v_ref, scale) = reference_and_scale(ctx)?;
    let ic_default;
    let ic = match &ctx.initial {
        Some(s) => s,
        None => {
            ic_default = default_initial(ctx, v_ref)?;
            &ic_default
        }
    };

    let c = &ctx.criteria;
    let data = run_envelope(
        run_kind,
        &ctx.params,
        &trap,
        ic,
        n_periods,
        v_ref,
        Some(c.escape_factor * scale),
        &ctx.integrator,
    )?;

    let fit = fit_last_half(&data);
    let mut note = data.failure.as_ref().map(|f| {
        format!(
            "integration ended after {} of {} drive periods: {f}",
            data.periods_done, n_periods
        )
    });

    let resonant_by_fit = fit
        .as_ref()
        .map_or(false, |f| f.slope > c.q_threshold && f.r_squared > c.r_squared_min);
    let slope_small = fit.as_ref().map_or(true, |f| f.slope <= c.q_threshold);
    let converged = ctx.gamma > 0.0
        && last_strobe_delta(&data.strobe).map_or(false, |d| d < c.cycle_tolerance);

    let verdict = if data.failure.is_some() && data.periods_done < 10 {
        Verdict::Inconclusive
    } else if data.escaped || resonant_by_fit {
        Verdict::Resonant
    } else if converged {
        Verdict::LimitCycle
    } else if slope_small {
        Verdict::Stable
    } else {
        if note.is_none() {
            note = Some(
                "positive envelope slope with poor fit quality; \
                 likely near a stability boundary"
                    .into(),
            );
        }
        Verdict::Inconclusive
    };

    let cycle_state = if verdict == Verdict::LimitCycle {
        data.strobe
            .last()
            .cloned()
            .map(|s| fold_state(ctx.kind, s))
    } else {
        None
    };

    Ok(PointVerdict {
        omega,
        epsilon,
        verdict,
        fitted_exponent: fit,
        max_amplitude: data.global_max,
        periods: data.periods_done,
        cycle_state,
        note,
    })
}

// ---------------------------------------------------------------------------
// Resonance map
// ---------------------------------------------------------------------------

/// Classify every cell of an (ω, ε) grid.
///
/// Rows (ε) are the outer index, columns (ω) the inner one. Cells are
/// classified in parallel but collected in deterministic row-major order,
/// so repeated runs produce identical maps. Per-cell failures become
/// inconclusive cells with a note; only misconfiguration aborts the map.
pub fn resonance_map(
    ctx: &SweepContext,
    omega_axis: &AxisRange,
    epsilon_axis: &AxisRange,
) -> Result<ResonanceMap, SweepError> {
    ctx.validate()?;
    omega_axis.validate("omega")?;
    epsilon_axis.validate("epsilon")?;
    let omegas = omega_axis.values();
    let epsilons = epsilon_axis.values();
    // Fail fast if the horizon cannot cover the slowest drive on the grid.
    period_count(ctx.criteria.tau_max, omegas[0])?;

    let n_omega = omegas.len();
    let cells: Vec<PointVerdict> = (0..epsilons.len() * n_omega)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n_omega, idx % n_omega);
            classify_point(ctx, omegas[j], epsilons[i]).unwrap_or_else(|e| {
                PointVerdict::inconclusive(omegas[j], epsilons[i], e.to_string())
            })
        })
        .collect();

    Ok(ResonanceMap {
        metadata: MapMetadata {
            model: ctx.kind.name().to_string(),
            interaction: ctx.params.interaction(),
            lambda0: ctx.lambda0,
            gamma: ctx.gamma,
            criteria: ctx.criteria,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        omega_values: omegas,
        epsilon_values: epsilons,
        cells,
    })
}

// ---------------------------------------------------------------------------
// Threshold scan
// ---------------------------------------------------------------------------

/// Frequencies probed when asking "does any drive near the principal
/// resonance destabilize the system at this amplitude?" — a fixed window
/// around ω = 2λ₀.
fn principal_window(lambda0: f64) -> Vec<f64> {
    AxisRange::new(1.8 * lambda0, 2.2 * lambda0, 17).values()
}

/// Smallest drive amplitude on `epsilon_grid` (refined by bisection to
/// Δε ≤ 0.005) for which some frequency in the principal-resonance window
/// [1.8 λ₀, 2.2 λ₀] is classified resonant. `None` when every grid
/// amplitude leaves the whole window stable.
///
/// The grid must be strictly increasing with 0 ≤ ε < 1.
pub fn threshold_scan(
    ctx: &SweepContext,
    epsilon_grid: &[f64],
) -> Result<Option<ResonanceThreshold>, SweepError> {
    ctx.validate()?;
    if epsilon_grid.is_empty() {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(
            "threshold scan needs at least one amplitude".into(),
        )));
    }
    for w in epsilon_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(SweepError::Invalid(ModelError::InvalidParameter(
                "threshold amplitudes must be strictly increasing".into(),
            )));
        }
    }
    if !(epsilon_grid[0] >= 0.0) || !(epsilon_grid[epsilon_grid.len() - 1] < 1.0) {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(
            "threshold amplitudes must satisfy 0 ≤ ε < 1".into(),
        )));
    }

    let window = principal_window(ctx.lambda0);
    let probe = |eps: f64| -> Result<Option<f64>, SweepError> {
        let verdicts: Result<Vec<(f64, Verdict)>, SweepError> = window
            .par_iter()
            .map(|&w| classify_point(ctx, w, eps).map(|pv| (w, pv.verdict)))
            .collect();
        Ok(verdicts?
            .into_iter()
            .find(|(_, v)| *v == Verdict::Resonant)
            .map(|(w, _)| w))
    };

    let mut last_stable: Option<f64> = None;
    for &eps in epsilon_grid {
        if let Some(omega_hit) = probe(eps)? {
            let mut lo = last_stable.unwrap_or(0.0);
            let mut hi = eps;
            let mut omega_at = omega_hit;
            while hi - lo > 0.005 {
                let mid = 0.5 * (lo + hi);
                match probe(mid)? {
                    Some(w) => {
                        hi = mid;
                        omega_at = w;
                    }
                    None => lo = mid,
                }
            }
            return Ok(Some(ResonanceThreshold {
                epsilon: hi,
                omega: omega_at,
            }));
        }
        last_stable = Some(eps);
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Wedge tip from barrier-dominated orbits
// ---------------------------------------------------------------------------

/// Slope threshold separating secular envelope growth from bounded beating
/// over the scan horizon, and the fit quality required to trust it.
const TIP_SLOPE_MIN: f64 = 0.002;
const TIP_R_SQUARED_MIN: f64 = 0.8;

/// Locate the principal instability wedge tip by scanning drive frequencies
/// with a *large*-amplitude orbit, `amplitude_factor` times the reference
/// scale (far outside the harmonic neighborhood of the equilibrium, where
/// the singular core acts as a hard barrier and the effective oscillation
/// is amplitude-dominated rather than stiffness-dominated).
///
/// A scan frequency is unstable when its per-period envelope either exceeds
/// 4× the starting amplitude or grows with a trustworthy positive log-slope.
/// The tip is the center of the contiguous unstable run containing the
/// strongest growth; `None` when the whole window is stable.
pub fn wedge_tip(
    ctx: &SweepContext,
    epsilon: f64,
    window: (f64, f64),
    scan_points: usize,
    amplitude_factor: f64,
) -> Result<Option<TipEstimate>, SweepError> {
    ctx.validate()?;
    if !(window.0 > 0.0) || !(window.1 > window.0) || !window.1.is_finite() {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(format!(
            "frequency window must satisfy 0 < lo < hi, got ({}, {})",
            window.0, window.1
        ))));
    }
    if scan_points < 3 {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(
            "wedge scan needs at least 3 frequencies".into(),
        )));
    }
    if !(amplitude_factor > 1.0) || !amplitude_factor.is_finite() {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(format!(
            "amplitude factor must exceed 1, got {amplitude_factor}"
        ))));
    }

    let run_kind = effective_kind(ctx.kind);
    let (_, scale) = reference_and_scale(ctx)?;
    let start_amp = amplitude_factor * scale;
    let omegas = AxisRange::new(window.0, window.1, scan_points).values();

    struct ScanRow {
        unstable: bool,
        growth: f64,
    }

    let rows: Result<Vec<ScanRow>, SweepError> = omegas
        .par_iter()
        .map(|&omega| {
            let n_periods = period_count(ctx.criteria.tau_max, omega)?;
            let trap = TrapModulation::isotropic(ctx.lambda0, epsilon, omega)?
                .with_damping(ctx.gamma)?;
            let dim = run_kind.dimension();
            let ic = if dim == 3 {
                DynamicalState::triple([start_amp; 3], [0.0; 3])
            } else {
                DynamicalState::single(start_amp, 0.0)
            };
            // Envelope of the coordinate itself: amplitude-dominated orbits
            // swing between the barrier and turning points near |v| ≈ A.
            let data = run_envelope(
                run_kind,
                &ctx.params,
                &trap,
                &ic,
                n_periods,
                0.0,
                Some(4.0 * start_amp),
                &ctx.integrator,
            )?;
            let fit = fit_last_half(&data);
            let slope = fit.map(|f| f.slope);
            let grew_by_fit = fit
                .map_or(false, |f| f.slope > TIP_SLOPE_MIN && f.r_squared > TIP_R_SQUARED_MIN);
            let unstable = data.escaped || grew_by_fit;
            let growth = if data.escaped {
                slope.unwrap_or(f64::INFINITY)
            } else {
                slope.unwrap_or(f64::NEG_INFINITY)
            };
            Ok(ScanRow { unstable, growth })
        })
        .collect();
    let rows = rows?;

    // Strongest-growth unstable point, then its contiguous unstable run.
    let best = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.unstable)
        .max_by(|a, b| a.1.growth.total_cmp(&b.1.growth))
        .map(|(i, _)| i);
    let Some(best) = best else {
        return Ok(None);
    };
    let mut lo = best;
    while lo > 0 && rows[lo - 1].unstable {
        lo -= 1;
    }
    let mut hi = best;
    while hi + 1 < rows.len() && rows[hi + 1].unstable {
        hi += 1;
    }

    Ok(Some(TipEstimate {
        omega: 0.5 * (omegas[lo] + omegas[hi]),
        growth: rows[best].growth,
        interval: (omegas[lo], omegas[hi]),
        unstable_points: hi - lo + 1,
    }))
}

// ---------------------------------------------------------------------------
// Limit-cycle search
// ---------------------------------------------------------------------------

const CYCLE_MAX_PERIODS: usize = 5000;
const CYCLE_CONVERGENCE: f64 = 1e-8;
const CYCLE_SEED_MATCH: f64 = 1e-6;

/// Observer that watches successive stroboscopic states until they settle.
struct CycleObserver {
    dim: usize,
    period: f64,
    t_start: f64,
    next_index: usize,
    max_periods: usize,
    prev: Option<[f64; MAX_DIM]>,
    latest: Option<DynamicalState>,
    last_delta: f64,
    converged: bool,
    count: usize,
    reference: f64,
    escape_above: f64,
    escaped: bool,
    global_max: f64,
}

impl StepObserver for CycleObserver {
    fn on_step(&mut self, step: &AcceptedStep<'_>) -> StepOutcome {
        let t1 = step.t0 + step.h;
        let mut buf = [0.0_f64; MAX_DIM];
        for theta in [0.25, 0.5, 0.75, 1.0] {
            step.interp.eval(theta, &mut buf[..2 * self.dim]);
            let dev = (buf[0] - self.reference).abs();
            if dev > self.global_max {
                self.global_max = dev;
            }
            if dev > self.escape_above {
                self.escaped = true;
                return StepOutcome::Stop;
            }
        }
        while self.next_index <= self.max_periods {
            let target = self.t_start + self.next_index as f64 * self.period;
            if target > t1 + 1e-12 * t1.abs().max(1.0) {
                break;
            }
            let theta = ((target - step.t0) / step.h).clamp(0.0, 1.0);
            step.interp.eval(theta, &mut buf[..2 * self.dim]);
            let state = crate::integrate::state_from_phase(&buf, self.dim, target);
            if let Some(prev) = &self.prev {
                let mut d: f64 = 0.0;
                for i in 0..2 * self.dim {
                    d = d.max((buf[i] - prev[i]).abs());
                }
                self.last_delta = d;
                if d < CYCLE_CONVERGENCE {
                    self.converged = true;
                    self.latest = Some(state);
                    return StepOutcome::Stop;
                }
            }
            self.prev = Some(buf);
            self.latest = Some(state);
            self.count = self.next_index;
            self.next_index += 1;
        }
        if self.next_index > self.max_periods {
            StepOutcome::Stop
        } else {
            StepOutcome::Continue
        }
    }
}

struct CycleProbe {
    state: Option<DynamicalState>,
    converged: bool,
    escaped: bool,
    last_delta: f64,
    periods: usize,
    global_max: f64,
}

/// Search for an attracting periodic orbit of the damped driven system by
/// iterating the stroboscopic map from a near-equilibrium seed until
/// successive states differ by less than 1e-8 (at most 5000 periods), then
/// verifying independence of the seed: a second, distinct seed must settle
/// onto the same state within 1e-6. With ε = 0 the "cycle" degenerates to
/// the equilibrium itself and the reported amplitude is ≈ 0.
pub fn find_limit_cycle(
    ctx: &SweepContext,
    omega: f64,
    epsilon: f64,
) -> Result<CycleOutcome, SweepError> {
    ctx.validate()?;
    if !(ctx.gamma > 0.0) {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(
            "limit-cycle search needs damping γ > 0 (undamped orbits never attract)".into(),
        )));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(format!(
            "drive frequency must be positive and finite, got {omega}"
        ))));
    }
    let trap = TrapModulation::isotropic(ctx.lambda0, epsilon, omega)?
        .with_damping(ctx.gamma)?;
    let period = TAU / omega;
    let run_kind = effective_kind(ctx.kind);
    let (v_ref, scale) = reference_and_scale(ctx)?;

    let seed_a = default_initial(ctx, v_ref)?;
    let mut seed_b = seed_a.clone();
    for i in 0..seed_b.coordinates.len() {
        seed_b.coordinates[i] *= 1.0 + 5.0 * ctx.criteria.seed_offset;
        seed_b.velocities[i] += 0.05 * scale;
    }

    let run = |seed: &DynamicalState| -> Result<CycleProbe, SweepError> {
        seed.validate_for(run_kind)?;
        let mut obs = CycleObserver {
            dim: run_kind.dimension(),
            period,
            t_start: seed.time,
            next_index: 0,
            max_periods: CYCLE_MAX_PERIODS,
            prev: None,
            latest: None,
            last_delta: f64::INFINITY,
            converged: false,
            count: 0,
            reference: v_ref,
            escape_above: ctx.criteria.escape_factor * scale,
            escaped: false,
            global_max: 0.0,
        };
        let tau_end = seed.time + (CYCLE_MAX_PERIODS as f64 + 0.5) * period;
        match drive_observed(
            run_kind,
            &ctx.params,
            &trap,
            seed,
            tau_end,
            &ctx.integrator,
            &mut obs,
        ) {
            Ok(_) => {}
            Err((_, IntegrationFailure::InvalidInput(e)))
            | Err((_, IntegrationFailure::BadInitialState(e))) => {
                return Err(SweepError::Invalid(e))
            }
            Err((_, other)) => return Err(SweepError::Integration(other)),
        }
        Ok(CycleProbe {
            state: obs.latest,
            converged: obs.converged,
            escaped: obs.escaped,
            last_delta: obs.last_delta,
            periods: obs.count,
            global_max: obs.global_max,
        })
    };

    let probe_a = run(&seed_a)?;
    if probe_a.escaped {
        return Ok(CycleOutcome::Escaped {
            max_amplitude: probe_a.global_max,
        });
    }
    if !probe_a.converged {
        return Ok(CycleOutcome::NotConverged {
            last_delta: probe_a.last_delta,
            periods: probe_a.periods,
        });
    }
    let state_a = probe_a.state.expect("converged probe carries a state");

    let probe_b = run(&seed_b)?;
    let difference = match &probe_b.state {
        Some(state_b) if probe_b.converged && !probe_b.escaped => {
            let mut d: f64 = 0.0;
            for i in 0..state_a.coordinates.len() {
                d = d.max((state_a.coordinates[i] - state_b.coordinates[i]).abs());
                d = d.max((state_a.velocities[i] - state_b.velocities[i]).abs());
            }
            d
        }
        _ => f64::INFINITY,
    };
    if difference > CYCLE_SEED_MATCH {
        return Ok(CycleOutcome::SeedDependent { difference });
    }

    // One dense period through the fixed point gives the cycle's excursion.
    let one_period = crate::integrate::integrate_sampled(
        run_kind,
        &ctx.params,
        &trap,
        &state_a,
        state_a.time + period,
        &ctx.integrator,
        period / 512.0,
    )
    .map_err(|e| SweepError::Integration(e.failure))?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, s) in &one_period.samples {
        let v = if ctx.kind == ModelKind::ImpactOscillator {
            s.coordinates[0].abs()
        } else {
            s.coordinates[0]
        };
        lo = lo.min(v);
        hi = hi.max(v);
    }

    Ok(CycleOutcome::Converged(LimitCycle {
        state: fold_state(ctx.kind, state_a),
        amplitude: hi - lo,
        periods: probe_a.periods,
    }))
}

// ---------------------------------------------------------------------------
// Envelope report
// ---------------------------------------------------------------------------

/// Integrate one driven trajectory and report its per-period deviation
/// envelope, stroboscopic amplitudes, and log-envelope growth fit. Uses the
/// context's initial state when `initial` is `None` (falling back to the
/// default near-equilibrium seed), and the context's escape bound.
pub fn envelope_growth(
    ctx: &SweepContext,
    omega: f64,
    epsilon: f64,
    initial: Option<&DynamicalState>,
    tau_max: f64,
) -> Result<EnvelopeReport, SweepError> {
    ctx.validate()?;
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(format!(
            "drive frequency must be positive and finite, got {omega}"
        ))));
    }
    if !(tau_max > 0.0) || !tau_max.is_finite() {
        return Err(SweepError::Invalid(ModelError::InvalidParameter(format!(
            "horizon must be positive and finite, got {tau_max}"
        ))));
    }
    let n_periods = ((tau_max * omega / TAU).floor() as usize).max(2);
    let trap = TrapModulation::isotropic(ctx.lambda0, epsilon, omega)?
        .with_damping(ctx.gamma)?;
    let run_kind = effective_kind(ctx.kind);
    let (v_ref, scale) = reference_and_scale(ctx)?;
    let ic_default;
    let ic = match (initial, &ctx.initial) {
        (Some(s), _) => s,
        (None, Some(s)) => s,
        (None, None) => {
            ic_default = default_initial(ctx, v_ref)?;
            &ic_default
        }
    };

    let data = run_envelope(
        run_kind,
        &ctx.params,
        &trap,
        ic,
        n_periods,
        v_ref,
        Some(ctx.criteria.escape_factor * scale),
        &ctx.integrator,
    )?;
    let fit = fit_last_half(&data);
    let note = data.failure.as_ref().map(|f| {
        format!(
            "integration ended after {} of {} drive periods: {f}",
            data.periods_done, n_periods
        )
    });
    let strobe_amplitudes = data
        .strobe
        .iter()
        .map(|s| (s.coordinates[0] - v_ref).abs())
        .collect();
    Ok(EnvelopeReport {
        times: data.bucket_times,
        maxima: data.bucket_maxima,
        strobe_amplitudes,
        fit,
        escaped: data.escaped,
        max_amplitude: data.global_max,
        periods: data.periods_done,
        note,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet;
    use crate::model::SingularKind;

    fn radial_ctx(p: f64) -> SweepContext {
        SweepContext::new(
            ModelKind::Radial(SingularKind::Full),
            ModelParams::from_interaction(p).unwrap(),
            1.0,
        )
    }

    /// Strong drive inside the principal wedge blows the width up
    /// (envelope growth plus escape) — the flagship resonant point.
    #[test]
    fn strong_drive_near_twice_trap_frequency_is_resonant() {
        let pv = classify_point(&radial_ctx(9.2), 2.04, 0.15).unwrap();
        assert_eq!(pv.verdict, Verdict::Resonant, "verdict: {pv:?}");
        assert!(pv.max_amplitude > 10.0, "amplitude {}", pv.max_amplitude);
    }

    /// No drive, no instability: the nudged equilibrium just rings.
    #[test]
    fn undriven_point_is_stable() {
        let pv = classify_point(&radial_ctx(9.2), 2.0, 0.0).unwrap();
        assert_eq!(pv.verdict, Verdict::Stable, "verdict: {pv:?}");
        let fit = pv.fitted_exponent.expect("bounded run has a fit");
        assert!(
            fit.slope.abs() < 5e-3,
            "undriven envelope slope {} should vanish",
            fit.slope
        );
        assert!(pv.max_amplitude < 0.1);
    }

    /// Weak drive off resonance stays bounded.
    #[test]
    fn weak_off_resonance_drive_is_stable() {
        let pv = classify_point(&radial_ctx(9.2), 1.5, 0.10).unwrap();
        assert_eq!(pv.verdict, Verdict::Stable, "verdict: {pv:?}");
    }

    /// A damped run below threshold converges to the periodic response and
    /// is reported as a limit cycle (precedence over plain stability).
    #[test]
    fn damped_below_threshold_converges_to_cycle() {
        let ctx = radial_ctx(9.2).with_damping(0.15);
        let pv = classify_point(&ctx, 2.0, 0.10).unwrap();
        assert_eq!(pv.verdict, Verdict::LimitCycle, "verdict: {pv:?}");
        let cycle = pv.cycle_state.expect("limit-cycle verdict carries a state");
        let vstar = equilibrium_width_of(ctx.kind, &ctx.params, 1.0).unwrap();
        assert!(
            (cycle.coordinates[0] - vstar).abs() < 0.5 * vstar,
            "cycle near equilibrium, got {} vs {}",
            cycle.coordinates[0],
            vstar
        );
    }

    /// Horizons under 10 drive periods are rejected up front.
    #[test]
    fn too_short_horizon_is_rejected() {
        let err = classify_point(&radial_ctx(9.2), 0.1, 0.05).unwrap_err();
        assert!(matches!(err, SweepError::Invalid(_)), "got {err:?}");
    }

    /// The isotropic 3D triple collapses onto the radial dynamics, so the
    /// flagship resonant point carries over.
    #[test]
    fn isotropic_3d_matches_radial_verdict() {
        let ctx = SweepContext::new(
            ModelKind::Variational3D,
            ModelParams::from_interaction(9.2).unwrap(),
            1.0,
        );
        let pv = classify_point(&ctx, 2.04, 0.15).unwrap();
        assert_eq!(pv.verdict, Verdict::Resonant, "verdict: {pv:?}");
    }

    /// Bounce orbits are the fold of the signed linear oscillator, so the
    /// impact model and the linear oscillator agree point for point.
    #[test]
    fn impact_oscillator_classifies_like_linear_oscillator() {
        let params = ModelParams::from_interaction(0.0).unwrap();
        for &(omega, eps) in &[(2.0, 0.15), (1.5, 0.10)] {
            let impact = classify_point(
                &SweepContext::new(ModelKind::ImpactOscillator, params, 1.0),
                omega,
                eps,
            )
            .unwrap();
            let linear = classify_point(
                &SweepContext::new(ModelKind::Mathieu, params, 1.0),
                omega,
                eps,
            )
            .unwrap();
            assert_eq!(impact.verdict, linear.verdict, "(ω, ε) = ({omega}, {eps})");
            assert_eq!(
                impact.fitted_exponent.map(|f| f.slope),
                linear.fitted_exponent.map(|f| f.slope),
                "fold must not change the envelope"
            );
        }
    }

    /// Nonlinear verdicts on the linear oscillator agree with the
    /// one-period eigenvalue analysis across a grid avoiding the (genuinely
    /// ambiguous) immediate boundary neighborhoods.
    #[test]
    fn linear_oscillator_map_matches_one_period_analysis() {
        let params = ModelParams::from_interaction(0.0).unwrap();
        let ctx = SweepContext::new(ModelKind::Mathieu, params, 1.0);
        let map = resonance_map(
            &ctx,
            &AxisRange::new(1.6, 2.4, 5),
            &AxisRange::new(0.1, 0.3, 3),
        )
        .unwrap();
        let fcfg = IntegratorConfig::default();
        let mut agree = 0;
        let mut total = 0;
        for (i, &eps) in map.epsilon_values.iter().enumerate() {
            for (j, &omega) in map.omega_values.iter().enumerate() {
                let lin = floquet::classify(omega, eps, 0.0, 1.0, &fcfg).unwrap();
                let cell = map.cell(i, j);
                let matched = match cell.verdict {
                    Verdict::Resonant => lin.is_unstable(),
                    Verdict::Stable | Verdict::LimitCycle => !lin.is_unstable(),
                    Verdict::Inconclusive => false,
                };
                total += 1;
                if matched {
                    agree += 1;
                } else {
                    eprintln!(
                        "disagreement at (ω, ε) = ({omega}, {eps}): sweep {:?}, \
                         one-period unstable = {}",
                        cell.verdict,
                        lin.is_unstable()
                    );
                }
            }
        }
        assert!(
            agree * 100 >= total * 95,
            "only {agree}/{total} cells agree"
        );
    }

    /// The center-of-mass map is the linear-oscillator map, cell for cell —
    /// interactions never touch the mean position.
    #[test]
    fn center_of_mass_map_equals_linear_map() {
        let params = ModelParams::from_interaction(9.2).unwrap();
        let params_free = ModelParams::from_interaction(0.0).unwrap();
        let omega_axis = AxisRange::new(1.9, 2.1, 3);
        let eps_axis = AxisRange::new(0.1, 0.25, 2);
        let com = resonance_map(
            &SweepContext::new(ModelKind::CenterOfMass, params, 1.0),
            &omega_axis,
            &eps_axis,
        )
        .unwrap();
        let lin = resonance_map(
            &SweepContext::new(ModelKind::Mathieu, params_free, 1.0),
            &omega_axis,
            &eps_axis,
        )
        .unwrap();
        for (a, b) in com.cells.iter().zip(&lin.cells) {
            assert_eq!(a.verdict, b.verdict);
            assert_eq!(
                a.fitted_exponent.map(|f| f.slope),
                b.fitted_exponent.map(|f| f.slope)
            );
        }
    }

    /// Same grid, same answers: the parallel map is deterministic.
    #[test]
    fn resonance_map_is_deterministic() {
        let ctx = radial_ctx(9.2);
        let omega_axis = AxisRange::new(1.9, 2.1, 3);
        let eps_axis = AxisRange::new(0.05, 0.15, 2);
        let first = resonance_map(&ctx, &omega_axis, &eps_axis).unwrap();
        let second = resonance_map(&ctx, &omega_axis, &eps_axis).unwrap();
        assert_eq!(first, second);
    }

    /// Threshold scan brackets the instability onset for the undamped
    /// system near its expected window and refines it to Δε ≤ 0.005.
    #[test]
    fn undamped_threshold_sits_in_expected_window() {
        let grid = [0.02, 0.06, 0.10, 0.14, 0.18];
        let found = threshold_scan(&radial_ctx(9.2), &grid)
            .unwrap()
            .expect("an undamped system has a finite threshold");
        assert!(
            found.epsilon > 0.04 && found.epsilon < 0.14,
            "threshold ε = {} outside expected window",
            found.epsilon
        );
        assert!(found.omega >= 1.8 && found.omega <= 2.2);
    }

    /// Barrier-regime frequency scan pins the wedge tip at twice the trap
    /// frequency to a quarter percent.
    #[test]
    fn barrier_orbit_wedge_tip_sits_at_twice_trap_frequency() {
        let tip = wedge_tip(&radial_ctx(9.2), 0.10, (1.92, 2.08), 17, 25.0)
            .unwrap()
            .expect("ε = 0.10 is far above the wedge tip");
        assert!(
            (tip.omega - 2.0).abs() <= 0.01 * 2.0,
            "tip at {} (interval {:?})",
            tip.omega,
            tip.interval
        );
        assert!(tip.unstable_points >= 1);
    }

    /// Damped driven run settles onto a genuine limit cycle, independent of
    /// the seed, with a finite forced amplitude.
    #[test]
    fn damped_drive_settles_onto_limit_cycle() {
        let ctx = radial_ctx(9.2).with_damping(0.15);
        let outcome = find_limit_cycle(&ctx, 1.9, 0.08).unwrap();
        let CycleOutcome::Converged(cycle) = outcome else {
            panic!("expected convergence, got {outcome:?}");
        };
        let vstar = equilibrium_width_of(ctx.kind, &ctx.params, 1.0).unwrap();
        assert!(cycle.periods < CYCLE_MAX_PERIODS);
        assert!(
            cycle.amplitude > 1e-4 * vstar && cycle.amplitude < vstar,
            "forced amplitude {} out of range",
            cycle.amplitude
        );
    }

    /// Without a drive the damped "cycle" is the equilibrium itself.
    #[test]
    fn undriven_damped_cycle_degenerates_to_equilibrium() {
        let ctx = radial_ctx(9.2).with_damping(0.2);
        let outcome = find_limit_cycle(&ctx, 2.0, 0.0).unwrap();
        let CycleOutcome::Converged(cycle) = outcome else {
            panic!("expected convergence, got {outcome:?}");
        };
        let vstar = equilibrium_width_of(ctx.kind, &ctx.params, 1.0).unwrap();
        assert!(cycle.amplitude < 1e-6, "amplitude {}", cycle.amplitude);
        assert!((cycle.state.coordinates[0] - vstar).abs() < 1e-6);
    }

    /// Forced-cycle amplitude grows with drive strength.
    #[test]
    fn cycle_amplitude_increases_with_drive() {
        let ctx = radial_ctx(9.2).with_damping(0.15);
        let mut last = 0.0;
        for &eps in &[0.02, 0.05, 0.08] {
            let outcome = find_limit_cycle(&ctx, 1.9, eps).unwrap();
            let CycleOutcome::Converged(cycle) = outcome else {
                panic!("expected convergence at ε = {eps}, got {outcome:?}");
            };
            assert!(
                cycle.amplitude > last,
                "amplitude {} did not grow past {} at ε = {eps}",
                cycle.amplitude,
                last
            );
            last = cycle.amplitude;
        }
    }

    /// Undamped search is refused outright.
    #[test]
    fn limit_cycle_requires_damping() {
        let err = find_limit_cycle(&radial_ctx(9.2), 1.9, 0.08).unwrap_err();
        assert!(matches!(err, SweepError::Invalid(_)));
    }

    /// The flagship growth curve: strobe maxima climb out of the noise,
    /// pass an order of magnitude, and fit a clean exponential before the
    /// trajectory escapes.
    #[test]
    fn resonant_envelope_grows_exponentially_from_displaced_start() {
        let ctx = radial_ctx(9.2).with_initial(DynamicalState::single(1.6, 0.0));
        let report = envelope_growth(&ctx, 2.04, 0.15, None, 400.0).unwrap();
        assert!(report.escaped, "resonant run must escape: {report:?}");
        let fit = report.fit.expect("growth fit");
        assert!(fit.slope > 0.01, "slope {}", fit.slope);
        assert!(fit.r_squared > 0.9, "r² {}", fit.r_squared);
        let initial_dev = report.maxima.first().copied().unwrap();
        assert!(
            report.max_amplitude > 10.0 * initial_dev,
            "{} vs initial {}",
            report.max_amplitude,
            initial_dev
        );
    }

    /// Axis endpoints are exact and validation rejects empty or reversed
    /// ranges.
    #[test]
    fn axis_ranges_are_inclusive_and_validated() {
        let vals = AxisRange::new(1.0, 2.0, 5).values();
        assert_eq!(vals.len(), 5);
        assert_eq!(vals[0], 1.0);
        assert_eq!(vals[4], 2.0);
        assert_eq!(AxisRange::new(3.0, 3.0, 1).values(), vec![3.0]);
        assert!(AxisRange::new(2.0, 1.0, 5).validate("x").is_err());
        assert!(AxisRange::new(1.0, 2.0, 0).validate("x").is_err());
    }

    /// Straight-line recovery through the least-squares helper.
    #[test]
    fn linear_fit_recovers_a_line() {
        let xs: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 - 0.25 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.25).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert!(fit.std_error < 1e-12);
    }

    /// Criteria validation rejects nonsense thresholds.
    #[test]
    fn criteria_validation_rejects_bad_thresholds() {
        let mut c = ClassifyCriteria::default();
        c.q_threshold = -1.0;
        assert!(c.validate().is_err());
        let mut c = ClassifyCriteria::default();
        c.r_squared_min = 1.5;
        assert!(c.validate().is_err());
        let mut c = ClassifyCriteria::default();
        c.escape_factor = 0.5;
        assert!(c.validate().is_err());
    }
}
