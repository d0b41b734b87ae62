//! Adaptive time integration for every ODE model.
//!
//! The workhorse is an embedded Dormand–Prince 5(4) pair with PI step-size
//! control and a quartic dense-output interpolant. Width models are guarded
//! by a floor: any step that would land a coordinate below it is rejected
//! and retried at half the step, so the singular core is never evaluated
//! past the barrier. A run of consecutive rejections hands the step to an
//! A-stable singly diagonally implicit (SDIRK) method of order 2 with a
//! finite-difference Newton solver; the explicit pair resumes once the step
//! size recovers. The impact oscillator gets event detection: zero
//! crossings are located on the dense output by bisection and the bounce
//! map (v, v̇) → (0⁺, −v̇) is applied exactly.

use crate::model::{
    accelerations, energy, DynamicalState, ModelError, ModelKind, ModelParams, TrapModulation,
};
use thiserror::Error;

/// Largest phase-space dimension (three coordinates + three velocities).
pub(crate) const MAX_DIM: usize = 6;

/// Step-size and tolerance control for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    /// Relative local error tolerance.
    pub rel_tol: f64,
    /// Absolute local error tolerance.
    pub abs_tol: f64,
    /// Initial step size.
    pub h_init: f64,
    /// Smallest admissible step; going below it is an integration failure.
    pub h_min: f64,
    /// Largest admissible step.
    pub h_max: f64,
    /// Smallest admissible width coordinate for singular-core models;
    /// steps landing below it are rejected and retried at half step.
    pub width_floor: f64,
    /// Consecutive rejections that trigger the implicit fallback.
    pub stiff_switch_threshold: u32,
    /// Safety cap on total attempted steps.
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 1.0,
            width_floor: 1e-4,
            stiff_switch_threshold: 8,
            max_steps: 20_000_000,
        }
    }
}

impl IntegratorConfig {
    /// Checks 0 < h_min ≤ h_init ≤ h_max, positive tolerances and floor.
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.h_min > 0.0 && self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return Err(ModelError::InvalidParameter(format!(
                "step bounds must satisfy 0 < h_min ≤ h_init ≤ h_max, got \
                 ({}, {}, {})",
                self.h_min, self.h_init, self.h_max
            )));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(ModelError::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        if !(self.width_floor > 0.0) {
            return Err(ModelError::InvalidParameter(
                "width floor must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Copy with tolerances replaced (convenience for sweeps).
    pub fn with_tolerances(mut self, rel: f64, abs: f64) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }
}

/// Counters describing one integration run.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct Diagnostics {
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    /// Accepted steps taken by the implicit method.
    pub stiff_steps: u64,
    /// Explicit↔implicit regime switches.
    pub regime_switches: u64,
    pub rhs_evaluations: u64,
    pub smallest_step: f64,
    /// Largest relative energy drift seen (undriven, undamped width models
    /// only; `None` when the drift monitor does not apply).
    pub max_energy_drift: Option<f64>,
}

impl Diagnostics {
    /// Fraction of accepted steps taken in the stiff regime.
    pub fn stiff_fraction(&self) -> f64 {
        if self.accepted_steps == 0 {
            0.0
        } else {
            self.stiff_steps as f64 / self.accepted_steps as f64
        }
    }
}

/// Result of an integration: sampled states, bounce events, diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// (τ, state) at every accepted step (or denser, see
    /// [`integrate_sampled`]); τ strictly increasing.
    pub samples: Vec<(f64, DynamicalState)>,
    /// Whether samples came from dense-output interpolation at uniform
    /// intervals rather than raw step endpoints.
    pub dense: bool,
    /// Bounce instants (impact oscillator only).
    pub event_times: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn final_state(&self) -> &DynamicalState {
        &self
            .samples
            .last()
            .expect("a trajectory always holds its initial sample")
            .1
    }

    /// Largest value of one coordinate over all samples.
    pub fn max_coordinate(&self, index: usize) -> f64 {
        self.samples
            .iter()
            .map(|(_, s)| s.coordinates[index])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Why an integration stopped early.
#[derive(Debug, Clone, Error)]
pub enum IntegrationFailure {
    #[error("step size underflow (h < h_min) at τ = {time}")]
    StepUnderflow { time: f64 },
    #[error("exceeded {max_steps} attempted steps at τ = {time}")]
    MaxStepsExceeded { time: f64, max_steps: u64 },
    #[error("more than {limit} bounce events at τ = {time} (chattering)")]
    TooManyEvents { time: f64, limit: u64 },
    #[error("model evaluation failed at start: {0}")]
    BadInitialState(ModelError),
    #[error("{0}")]
    InvalidInput(ModelError),
}

/// An integration failure together with everything computed before it.
#[derive(Debug, Error)]
#[error("{failure}")]
pub struct IntegrationError {
    pub failure: IntegrationFailure,
    pub partial: Trajectory,
}

// ---------------------------------------------------------------------------
// Systems: first-order form of the models
// ---------------------------------------------------------------------------

/// First-order autonomous-in-form system y' = f(t, y), y ∈ R^{phase_dim}.
pub(crate) trait OdeSystem {
    fn phase_dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<(), ModelError>;
    /// Number of leading entries of `y` that are singular-core widths and
    /// must stay above the configured floor.
    fn floored_coords(&self) -> usize {
        0
    }
}

/// Phase-space form of a model: y = [q₁.., q̇₁..].
pub(crate) struct ModelSystem<'a> {
    pub kind: ModelKind,
    pub params: &'a ModelParams,
    pub trap: &'a TrapModulation,
}

impl OdeSystem for ModelSystem<'_> {
    fn phase_dim(&self) -> usize {
        2 * self.kind.dimension()
    }

    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<(), ModelError> {
        let d = self.kind.dimension();
        let (coords, vels) = y.split_at(d);
        let (dq, dv) = dydt.split_at_mut(d);
        dq.copy_from_slice(vels);
        accelerations(self.kind, self.params, self.trap, t, coords, vels, dv)
    }

    fn floored_coords(&self) -> usize {
        if self.kind.has_singular_core() {
            self.kind.dimension()
        } else {
            0
        }
    }
}

// ---------------------------------------------------------------------------
// Dense output
// ---------------------------------------------------------------------------

/// Interpolant over one accepted step, evaluable at θ ∈ [0, 1].
pub(crate) enum Interpolant {
    /// Quartic collocation polynomial of the 5(4) pair.
    Quartic { rcont: [[f64; MAX_DIM]; 5], n: usize },
    /// Cubic Hermite from endpoint values and slopes (implicit steps).
    Hermite {
        y0: [f64; MAX_DIM],
        y1: [f64; MAX_DIM],
        f0: [f64; MAX_DIM],
        f1: [f64; MAX_DIM],
        h: f64,
        n: usize,
    },
}

impl Interpolant {
    pub fn eval(&self, theta: f64, out: &mut [f64]) {
        match self {
            Interpolant::Quartic { rcont, n } => {
                let th1 = 1.0 - theta;
                for i in 0..*n {
                    out[i] = rcont[0][i]
                        + theta
                            * (rcont[1][i]
                                + th1
                                    * (rcont[2][i]
                                        + theta * (rcont[3][i] + th1 * rcont[4][i])));
                }
            }
            Interpolant::Hermite { y0, y1, f0, f1, h, n } => {
                let t = theta;
                let t2 = t * t;
                let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
                let h10 = t * (1.0 - t) * (1.0 - t);
                let h01 = t2 * (3.0 - 2.0 * t);
                let h11 = t2 * (t - 1.0);
                for i in 0..*n {
                    out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
                }
            }
        }
    }
}

/// One accepted step as shown to observers.
pub(crate) struct AcceptedStep<'a> {
    pub t0: f64,
    pub h: f64,
    pub y1: &'a [f64],
    pub interp: &'a Interpolant,
}

pub(crate) enum StepOutcome {
    Continue,
    Stop,
}

pub(crate) trait StepObserver {
    fn on_step(&mut self, step: &AcceptedStep<'_>) -> StepOutcome;
}

// ---------------------------------------------------------------------------
// Dormand–Prince 5(4) tableau
// ---------------------------------------------------------------------------

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (identical to the last tableau row: FSAL).
const B5: [f64; 7] = A6_ROW;
const A6_ROW: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Error weights b5 − b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Dense-output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Diagonal coefficient of the 2-stage SDIRK method (1 − √2/2): A-stable,
/// stiffly accurate, order 2.
const SDIRK_GAMMA: f64 = 0.292_893_218_813_452_54;

#[derive(Clone, Copy, PartialEq)]
enum Regime {
    Explicit,
    Stiff,
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

pub(crate) struct Driver<'a, S: OdeSystem> {
    sys: &'a S,
    cfg: &'a IntegratorConfig,
    pub diag: Diagnostics,
    n: usize,
}

type StepResult = Result<(), IntegrationFailure>;

impl<'a, S: OdeSystem> Driver<'a, S> {
    pub fn new(sys: &'a S, cfg: &'a IntegratorConfig) -> Self {
        let n = sys.phase_dim();
        assert!(n <= MAX_DIM);
        Self {
            sys,
            cfg,
            diag: Diagnostics {
                smallest_step: f64::INFINITY,
                ..Diagnostics::default()
            },
            n,
        }
    }

    fn eval(&mut self, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), ModelError> {
        self.diag.rhs_evaluations += 1;
        self.sys.eval(t, y, out)
    }

    fn error_norm(&self, err: &[f64], y0: &[f64], y1: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let sc = self.cfg.abs_tol + self.cfg.rel_tol * y0[i].abs().max(y1[i].abs());
            let r = err[i] / sc;
            acc += r * r;
        }
        (acc / self.n as f64).sqrt()
    }

    fn floor_violated(&self, y: &[f64]) -> bool {
        let g = self.sys.floored_coords();
        y[..g].iter().any(|&v| v < self.cfg.width_floor)
    }

    /// Integrates from (t0, y) to t_end, reporting accepted steps to `obs`.
    /// On success `y` holds the final state. Early stop requested by the
    /// observer is a success.
    pub fn propagate(
        &mut self,
        t0: f64,
        y: &mut [f64; MAX_DIM],
        t_end: f64,
        obs: &mut dyn StepObserver,
    ) -> StepResult {
        let n = self.n;
        let mut t = t0;
        let mut h = self.cfg.h_init.min(self.cfg.h_max).min(t_end - t0);
        let mut k = [[0.0_f64; MAX_DIM]; 7];
        let mut y_new = [0.0_f64; MAX_DIM];
        let mut regime = Regime::Explicit;
        let mut consecutive_rejections: u32 = 0;
        let mut facold: f64 = 1e-4;
        let mut last_rejected = false;
        let mut attempts: u64 = 0;

        // PI controller constants (β = 0.04).
        const BETA: f64 = 0.04;
        const EXPO1: f64 = 0.2 - BETA * 0.75;
        const SAFE: f64 = 0.9;
        const FAC_MIN: f64 = 0.2;
        const FAC_MAX: f64 = 10.0;

        if let Err(e) = self.eval(t, &y[..n], &mut k[0][..n]) {
            return Err(IntegrationFailure::BadInitialState(e));
        }
        let mut fsal_valid = true;

        while t < t_end {
            attempts += 1;
            if attempts > self.cfg.max_steps {
                return Err(IntegrationFailure::MaxStepsExceeded {
                    time: t,
                    max_steps: self.cfg.max_steps,
                });
            }
            if h < self.cfg.h_min {
                return Err(IntegrationFailure::StepUnderflow { time: t });
            }
            let last_step = t + h >= t_end;
            let h_eff = if last_step { t_end - t } else { h };

            match regime {
                Regime::Explicit => {
                    if !fsal_valid {
                        if self.eval(t, &y[..n], &mut k[0][..n]).is_err() {
                            // Cannot even evaluate at the current point:
                            // treat as a failed step at half size.
                            h = 0.5 * h_eff;
                            self.diag.rejected_steps += 1;
                            consecutive_rejections += 1;
                            if consecutive_rejections >= self.cfg.stiff_switch_threshold {
                                regime = Regime::Stiff;
                                self.diag.regime_switches += 1;
                            }
                            continue;
                        }
                        fsal_valid = true;
                    }
                    // Stage evaluations.
                    let mut stage_failed = false;
                    for s in 1..7 {
                        let mut ys = [0.0_f64; MAX_DIM];
                        for i in 0..n {
                            let mut acc = 0.0;
                            for (j, kj) in k.iter().enumerate().take(s) {
                                acc += A[s][j] * kj[i];
                            }
                            ys[i] = y[i] + h_eff * acc;
                        }
                        let (head, tail) = k.split_at_mut(s);
                        let _ = head;
                        if self
                            .eval(t + C[s] * h_eff, &ys[..n], &mut tail[0][..n])
                            .is_err()
                        {
                            stage_failed = true;
                            break;
                        }
                    }
                    if !stage_failed {
                        for i in 0..n {
                            let mut acc = 0.0;
                            for (j, kj) in k.iter().enumerate() {
                                acc += B5[j] * kj[i];
                            }
                            y_new[i] = y[i] + h_eff * acc;
                        }
                    }

                    if stage_failed || self.floor_violated(&y_new[..n]) {
                        // Singular-core guard: retry at half step.
                        self.diag.rejected_steps += 1;
                        consecutive_rejections += 1;
                        h = 0.5 * h_eff;
                        last_rejected = true;
                        if consecutive_rejections >= self.cfg.stiff_switch_threshold {
                            regime = Regime::Stiff;
                            self.diag.regime_switches += 1;
                        }
                        continue;
                    }

                    let mut err_vec = [0.0_f64; MAX_DIM];
                    for i in 0..n {
                        let mut acc = 0.0;
                        for (j, kj) in k.iter().enumerate() {
                            acc += E[j] * kj[i];
                        }
                        err_vec[i] = h_eff * acc;
                    }
                    let err = self.error_norm(&err_vec[..n], &y[..n], &y_new[..n]);

                    let fac11 = err.powf(EXPO1);
                    if err <= 1.0 {
                        // Accepted. The PI controller mixes this step's
                        // error with the previous accepted one.
                        let mut fac = fac11 / facold.powf(BETA);
                        fac = (fac / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                        facold = err.max(1e-4);
                        let mut h_next = (h_eff / fac).min(self.cfg.h_max);
                        if last_rejected {
                            h_next = h_next.min(h_eff);
                        }
                        last_rejected = false;
                        consecutive_rejections = 0;

                        // k7 of the accepted step (already computed; FSAL).
                        let interp = self.dense_quartic(h_eff, y, &y_new, &k);
                        self.diag.accepted_steps += 1;
                        self.diag.smallest_step = self.diag.smallest_step.min(h_eff);
                        let t1 = t + h_eff;
                        let outcome = obs.on_step(&AcceptedStep {
                            t0: t,
                            h: h_eff,
                            y1: &y_new[..n],
                            interp: &interp,
                        });
                        y[..n].copy_from_slice(&y_new[..n]);
                        k[0] = k[6];
                        fsal_valid = true;
                        t = t1;
                        h = h_next;
                        if matches!(outcome, StepOutcome::Stop) {
                            return Ok(());
                        }
                    } else {
                        // Error-controlled rejection.
                        self.diag.rejected_steps += 1;
                        consecutive_rejections += 1;
                        let fac = (fac11 / SAFE).min(1.0 / FAC_MIN);
                        h = h_eff / fac;
                        last_rejected = true;
                        if consecutive_rejections >= self.cfg.stiff_switch_threshold {
                            regime = Regime::Stiff;
                            self.diag.regime_switches += 1;
                        }
                    }
                }
                Regime::Stiff => {
                    match self.sdirk_step(t, &y[..n], h_eff, &mut y_new) {
                        Ok((err, f0, f1)) => {
                            if err <= 1.0 && !self.floor_violated(&y_new[..n]) {
                                let mut y0a = [0.0_f64; MAX_DIM];
                                let mut y1a = [0.0_f64; MAX_DIM];
                                y0a[..n].copy_from_slice(&y[..n]);
                                y1a[..n].copy_from_slice(&y_new[..n]);
                                let interp = Interpolant::Hermite {
                                    y0: y0a,
                                    y1: y1a,
                                    f0,
                                    f1,
                                    h: h_eff,
                                    n,
                                };
                                self.diag.accepted_steps += 1;
                                self.diag.stiff_steps += 1;
                                self.diag.smallest_step = self.diag.smallest_step.min(h_eff);
                                consecutive_rejections = 0;
                                last_rejected = false;
                                let t1 = t + h_eff;
                                let outcome = obs.on_step(&AcceptedStep {
                                    t0: t,
                                    h: h_eff,
                                    y1: &y_new[..n],
                                    interp: &interp,
                                });
                                y[..n].copy_from_slice(&y_new[..n]);
                                fsal_valid = false;
                                t = t1;
                                // Order-2 controller.
                                let grow = (SAFE / err.max(1e-10).sqrt()).clamp(FAC_MIN, 5.0);
                                h = (h_eff * grow).min(self.cfg.h_max);
                                if matches!(outcome, StepOutcome::Stop) {
                                    return Ok(());
                                }
                                // Regime recovery once the step has healed.
                                if h > 10.0 * self.cfg.h_min {
                                    regime = Regime::Explicit;
                                    self.diag.regime_switches += 1;
                                }
                            } else {
                                self.diag.rejected_steps += 1;
                                let shrink = if err > 1.0 {
                                    (SAFE / err.sqrt()).clamp(0.1, 0.5)
                                } else {
                                    0.5
                                };
                                h = h_eff * shrink;
                                last_rejected = true;
                            }
                        }
                        Err(()) => {
                            self.diag.rejected_steps += 1;
                            h = 0.5 * h_eff;
                            last_rejected = true;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn dense_quartic(
        &self,
        h: f64,
        y0: &[f64; MAX_DIM],
        y1: &[f64; MAX_DIM],
        k: &[[f64; MAX_DIM]; 7],
    ) -> Interpolant {
        let n = self.n;
        let mut rcont = [[0.0_f64; MAX_DIM]; 5];
        for i in 0..n {
            let ydiff = y1[i] - y0[i];
            let bspl = h * k[0][i] - ydiff;
            rcont[0][i] = y0[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * k[6][i] - bspl;
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += D[j] * kj[i];
            }
            rcont[4][i] = h * acc;
        }
        Interpolant::Quartic { rcont, n }
    }

    /// One SDIRK-2 step. Returns (scaled error, f(t₀,y₀), f(t₁,y₁)) on
    /// success; Err(()) asks the caller to halve the step.
    fn sdirk_step(
        &mut self,
        t: f64,
        y: &[f64],
        h: f64,
        y_new: &mut [f64; MAX_DIM],
    ) -> Result<(f64, [f64; MAX_DIM], [f64; MAX_DIM]), ()> {
        let n = self.n;
        let g = SDIRK_GAMMA;

        let mut f0 = [0.0_f64; MAX_DIM];
        if self.eval(t, y, &mut f0[..n]).is_err() {
            return Err(());
        }

        // Finite-difference Jacobian at (t, y), reused for both stages.
        let mut jac = [[0.0_f64; MAX_DIM]; MAX_DIM];
        {
            let mut yp = [0.0_f64; MAX_DIM];
            yp[..n].copy_from_slice(y);
            let mut fp = [0.0_f64; MAX_DIM];
            for j in 0..n {
                let delta = 1e-8 * yp[j].abs().max(1e-5);
                let saved = yp[j];
                yp[j] = saved + delta;
                if self.eval(t, &yp[..n], &mut fp[..n]).is_err() {
                    yp[j] = saved - delta;
                    if self.eval(t, &yp[..n], &mut fp[..n]).is_err() {
                        return Err(());
                    }
                    for i in 0..n {
                        jac[i][j] = (f0[i] - fp[i]) / delta;
                    }
                } else {
                    for i in 0..n {
                        jac[i][j] = (fp[i] - f0[i]) / delta;
                    }
                }
                yp[j] = saved;
            }
        }

        // LU factorization of (I − hγJ) with partial pivoting.
        let mut m = [[0.0_f64; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = -h * g * jac[i][j];
            }
            m[i][i] += 1.0;
        }
        let mut piv = [0usize; MAX_DIM];
        if lu_factor(&mut m, &mut piv, n).is_err() {
            return Err(());
        }

        let mut k1 = [0.0_f64; MAX_DIM];
        let mut k2 = [0.0_f64; MAX_DIM];
        let stage_times = [t + g * h, t + h];
        for (stage, &ts) in stage_times.iter().enumerate() {
            // Known part s = y + h·Σ_{j<i} a_ij k_j.
            let mut s = [0.0_f64; MAX_DIM];
            for i in 0..n {
                s[i] = y[i]
                    + if stage == 1 {
                        h * (1.0 - g) * k1[i]
                    } else {
                        0.0
                    };
            }
            // Newton on F(z) = z − s − hγ f(ts, z).
            let mut z = [0.0_f64; MAX_DIM];
            z[..n].copy_from_slice(&s[..n]);
            let mut converged = false;
            let mut prev_norm = f64::INFINITY;
            for _ in 0..12 {
                // Keep trial states away from the barrier.
                let guard = self.sys.floored_coords();
                for zi in z.iter_mut().take(guard) {
                    if *zi < 0.5 * self.cfg.width_floor {
                        return Err(());
                    }
                }
                let mut fz = [0.0_f64; MAX_DIM];
                if self.eval(ts, &z[..n], &mut fz[..n]).is_err() {
                    return Err(());
                }
                let mut resid = [0.0_f64; MAX_DIM];
                for i in 0..n {
                    resid[i] = -(z[i] - s[i] - h * g * fz[i]);
                }
                lu_solve(&m, &piv, &mut resid, n);
                let mut norm = 0.0_f64;
                for i in 0..n {
                    z[i] += resid[i];
                    let sc = self.cfg.abs_tol + self.cfg.rel_tol * z[i].abs();
                    norm = norm.max((resid[i] / sc).abs());
                }
                if norm < 1e-3 {
                    converged = true;
                    break;
                }
                if norm > 4.0 * prev_norm {
                    return Err(()); // diverging
                }
                prev_norm = norm;
            }
            if !converged {
                return Err(());
            }
            // Recover the stage slope algebraically: k = (z − s)/(hγ).
            let target = if stage == 0 { &mut k1 } else { &mut k2 };
            for i in 0..n {
                target[i] = (z[i] - s[i]) / (h * g);
            }
        }

        for i in 0..n {
            y_new[i] = y[i] + h * ((1.0 - g) * k1[i] + g * k2[i]);
        }
        // Companion first-order solution ŷ = y + h·k2 (backward-Euler-like);
        // the difference is an order-1 error estimate.
        let mut err_vec = [0.0_f64; MAX_DIM];
        for i in 0..n {
            err_vec[i] = h * (1.0 - g) * (k1[i] - k2[i]);
        }
        let err = self.error_norm(&err_vec[..n], y, &y_new[..n]);
        Ok((err, f0, k2))
    }
}

fn lu_factor(m: &mut [[f64; MAX_DIM]; MAX_DIM], piv: &mut [usize; MAX_DIM], n: usize) -> Result<(), ()> {
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col][col].abs();
        for row in col + 1..n {
            let v = m[row][col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best < 1e-300 {
            return Err(());
        }
        piv[col] = pivot;
        if pivot != col {
            m.swap(pivot, col);
        }
        let d = m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / d;
            m[row][col] = f;
            for c2 in col + 1..n {
                m[row][c2] -= f * m[col][c2];
            }
        }
    }
    Ok(())
}

fn lu_solve(m: &[[f64; MAX_DIM]; MAX_DIM], piv: &[usize; MAX_DIM], b: &mut [f64; MAX_DIM], n: usize) {
    for col in 0..n {
        b.swap(piv[col], col);
        for row in col + 1..n {
            b[row] -= m[row][col] * b[col];
        }
    }
    for col in (0..n).rev() {
        b[col] /= m[col][col];
        for row in 0..col {
            b[row] -= m[row][col] * b[col];
        }
    }
}

// ---------------------------------------------------------------------------
// Observers
// ---------------------------------------------------------------------------

/// Records every accepted step endpoint.
struct EndpointRecorder {
    dim: usize,
    samples: Vec<(f64, DynamicalState)>,
}

impl StepObserver for EndpointRecorder {
    fn on_step(&mut self, step: &AcceptedStep<'_>) -> StepOutcome {
        self.samples.push((
            step.t0 + step.h,
            state_from_phase(step.y1, self.dim, step.t0 + step.h),
        ));
        StepOutcome::Continue
    }
}

/// Records dense-output samples at a fixed interval.
struct UniformRecorder {
    dim: usize,
    interval: f64,
    next: f64,
    samples: Vec<(f64, DynamicalState)>,
}

impl StepObserver for UniformRecorder {
    fn on_step(&mut self, step: &AcceptedStep<'_>) -> StepOutcome {
        let t1 = step.t0 + step.h;
        let mut buf = [0.0_f64; MAX_DIM];
        while self.next <= t1 + 1e-14 * t1.abs().max(1.0) {
            let theta = ((self.next - step.t0) / step.h).clamp(0.0, 1.0);
            step.interp.eval(theta, &mut buf[..2 * self.dim]);
            self.samples
                .push((self.next, state_from_phase(&buf, self.dim, self.next)));
            self.next += self.interval;
        }
        StepOutcome::Continue
    }
}

pub(crate) fn state_from_phase(y: &[f64], dim: usize, time: f64) -> DynamicalState {
    DynamicalState {
        coordinates: y[..dim].to_vec(),
        velocities: y[dim..2 * dim].to_vec(),
        time,
    }
}

pub(crate) fn phase_from_state(state: &DynamicalState) -> [f64; MAX_DIM] {
    let dim = state.coordinates.len();
    let mut y = [0.0_f64; MAX_DIM];
    y[..dim].copy_from_slice(&state.coordinates);
    y[dim..2 * dim].copy_from_slice(&state.velocities);
    y
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

fn run_with_observer<O: StepObserver>(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state0: &DynamicalState,
    tau_end: f64,
    config: &IntegratorConfig,
    observer: &mut O,
) -> Result<Diagnostics, (Diagnostics, IntegrationFailure)> {
    let sys = ModelSystem { kind, params, trap };
    let mut driver = Driver::new(&sys, config);
    let mut y = phase_from_state(state0);
    let result = driver.propagate(state0.time, &mut y, tau_end, observer);
    match result {
        Ok(()) => Ok(driver.diag),
        Err(failure) => Err((driver.diag, failure)),
    }
}

fn validate_common(
    kind: ModelKind,
    state0: &DynamicalState,
    tau_end: f64,
    config: &IntegratorConfig,
) -> Result<(), IntegrationFailure> {
    config.validate().map_err(IntegrationFailure::InvalidInput)?;
    state0
        .validate_for(kind)
        .map_err(IntegrationFailure::InvalidInput)?;
    if !(tau_end > state0.time) {
        return Err(IntegrationFailure::InvalidInput(
            ModelError::InvalidParameter(format!(
                "τ_end = {tau_end} must exceed the initial time {}",
                state0.time
            )),
        ));
    }
    Ok(())
}

/// Tracks relative energy drift for undriven, undamped width models.
struct EnergyMonitor<'a> {
    kind: ModelKind,
    params: &'a ModelParams,
    trap: &'a TrapModulation,
    initial: Option<f64>,
    max_drift: f64,
    active: bool,
}

impl<'a> EnergyMonitor<'a> {
    fn new(
        kind: ModelKind,
        params: &'a ModelParams,
        trap: &'a TrapModulation,
        state0: &DynamicalState,
    ) -> Self {
        let active = kind.is_width_model() && !trap.is_driven() && trap.damping() == 0.0;
        let initial = if active {
            energy(kind, params, trap, state0, state0.time).ok()
        } else {
            None
        };
        Self {
            kind,
            params,
            trap,
            initial,
            max_drift: 0.0,
            active: active && params.interaction() >= 0.0,
        }
    }

    fn observe(&mut self, t: f64, state: &DynamicalState) {
        if !self.active {
            return;
        }
        if let (Some(e0), Ok(e)) = (
            self.initial,
            energy(self.kind, self.params, self.trap, state, t),
        ) {
            let denom = e0.abs().max(1e-300);
            self.max_drift = self.max_drift.max(((e - e0) / denom).abs());
        }
    }

    fn into_result(self) -> Option<f64> {
        if self.active {
            Some(self.max_drift)
        } else {
            None
        }
    }
}

/// Integrates `kind` from `state0` to `tau_end`, recording every accepted
/// step endpoint.
///
/// For undriven, undamped width models the relative energy drift is
/// monitored and reported in the diagnostics. On failure the error carries
/// the partial trajectory computed so far. The impact oscillator routes to
/// [`integrate_with_bounce`] internally, so its bounce events are always
/// honored no matter which entry point is used.
pub fn integrate(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state0: &DynamicalState,
    tau_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    integrate_impl(kind, params, trap, state0, tau_end, config, None)
}

/// Like [`integrate`], but samples the dense output at `output_interval`
/// instead of keeping raw step endpoints.
pub fn integrate_sampled(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state0: &DynamicalState,
    tau_end: f64,
    config: &IntegratorConfig,
    output_interval: f64,
) -> Result<Trajectory, IntegrationError> {
    if !(output_interval > 0.0) {
        return Err(IntegrationError {
            failure: IntegrationFailure::InvalidInput(ModelError::InvalidParameter(
                "output interval must be positive".into(),
            )),
            partial: empty_trajectory(state0),
        });
    }
    integrate_impl(kind, params, trap, state0, tau_end, config, Some(output_interval))
}

fn empty_trajectory(state0: &DynamicalState) -> Trajectory {
    Trajectory {
        samples: vec![(state0.time, state0.clone())],
        dense: false,
        event_times: Vec::new(),
        diagnostics: Diagnostics::default(),
    }
}

fn integrate_impl(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state0: &DynamicalState,
    tau_end: f64,
    config: &IntegratorConfig,
    output_interval: Option<f64>,
) -> Result<Trajectory, IntegrationError> {
    // The impact oscillator is not a plain ODE: its bounce events need the
    // dedicated event loop, so every public entry point routes it there.
    if kind == ModelKind::ImpactOscillator {
        return bounce_impl(params, trap, state0, tau_end, config, output_interval);
    }
    if let Err(failure) = validate_common(kind, state0, tau_end, config) {
        return Err(IntegrationError {
            failure,
            partial: empty_trajectory(state0),
        });
    }
    let dim = kind.dimension();
    let mut monitor = EnergyMonitor::new(kind, params, trap, state0);

    enum AnyRecorder {
        Endpoint(EndpointRecorder),
        Uniform(UniformRecorder),
    }
    impl StepObserver for AnyRecorder {
        fn on_step(&mut self, step: &AcceptedStep<'_>) -> StepOutcome {
            match self {
                AnyRecorder::Endpoint(r) => r.on_step(step),
                AnyRecorder::Uniform(r) => r.on_step(step),
            }
        }
    }

    let initial_sample = (state0.time, state0.clone());
    let mut recorder = match output_interval {
        None => AnyRecorder::Endpoint(EndpointRecorder {
            dim,
            samples: vec![initial_sample],
        }),
        Some(dt) => AnyRecorder::Uniform(UniformRecorder {
            dim,
            interval: dt,
            next: state0.time + dt,
            samples: vec![initial_sample],
        }),
    };

    let outcome = run_with_observer(kind, params, trap, state0, tau_end, config, &mut recorder);
    let (samples, dense) = match recorder {
        AnyRecorder::Endpoint(r) => (r.samples, false),
        AnyRecorder::Uniform(r) => (r.samples, true),
    };
    for (t, s) in &samples {
        monitor.observe(*t, s);
    }

    match outcome {
        Ok(mut diag) => {
            diag.max_energy_drift = monitor.into_result();
            Ok(Trajectory {
                samples,
                dense: output_interval.is_some() && dense,
                event_times: Vec::new(),
                diagnostics: diag,
            })
        }
        Err((mut diag, failure)) => {
            diag.max_energy_drift = monitor.into_result();
            Err(IntegrationError {
                failure,
                partial: Trajectory {
                    samples,
                    dense,
                    event_times: Vec::new(),
                    diagnostics: diag,
                },
            })
        }
    }
}

/// Integrates the impact oscillator with its elastic bounce at the origin.
///
/// Between events the dynamics are the bare linear oscillator; a sign
/// change of v across an accepted step is refined on the dense output by
/// bisection to |v| ≤ 1e-12, the bounce map (v, v̇) → (0⁺, −v̇) is applied,
/// and integration restarts from the event. Every bounce instant is
/// recorded in `event_times`, and the event sample carries coordinate
/// exactly 0 with the post-bounce velocity.
pub fn integrate_with_bounce(
    params: &ModelParams,
    trap: &TrapModulation,
    state0: &DynamicalState,
    tau_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    bounce_impl(params, trap, state0, tau_end, config, None)
}

/// Bounce integration with optional uniform dense-output sampling.
///
/// With `output_interval = Some(dt)` the samples sit exactly on the uniform
/// grid t₀ + k·dt (bounce instants still go to `event_times` but are not
/// injected into the sample stream), which lets callers compare against
/// another uniformly sampled trajectory time-for-time. With `None`, raw step
/// endpoints plus the event samples are kept, as documented above.
fn bounce_impl(
    params: &ModelParams,
    trap: &TrapModulation,
    state0: &DynamicalState,
    tau_end: f64,
    config: &IntegratorConfig,
    output_interval: Option<f64>,
) -> Result<Trajectory, IntegrationError> {
    const EVENT_LIMIT: u64 = 1_000_000;
    let kind = ModelKind::ImpactOscillator;
    if let Some(dt) = output_interval {
        if !(dt > 0.0) {
            return Err(IntegrationError {
                failure: IntegrationFailure::InvalidInput(ModelError::InvalidParameter(
                    format!("output interval must be positive, got {dt}"),
                )),
                partial: empty_trajectory(state0),
            });
        }
    }
    let partial0 = empty_trajectory(state0);
    if let Err(failure) = config.validate().map_err(IntegrationFailure::InvalidInput) {
        return Err(IntegrationError {
            failure,
            partial: partial0,
        });
    }
    let v0 = state0.coordinates[0];
    let vd0 = state0.velocities[0];
    if !(v0 > 0.0 || (v0 == 0.0 && vd0 > 0.0)) {
        return Err(IntegrationError {
            failure: IntegrationFailure::InvalidInput(ModelError::InvalidParameter(format!(
                "impact oscillator needs v(0) > 0 or (v(0) = 0, v̇(0) > 0); got ({v0}, {vd0})"
            ))),
            partial: partial0,
        });
    }
    if !(tau_end > state0.time) {
        return Err(IntegrationError {
            failure: IntegrationFailure::InvalidInput(ModelError::InvalidParameter(
                "τ_end must exceed the initial time".into(),
            )),
            partial: partial0,
        });
    }

    // Zeros of a solution of v̈ + λ²(τ)v = 0 are separated by at least
    // π/max λ (Sturm comparison); capping the step below that guarantees at
    // most one crossing per accepted step, so the endpoint sign test cannot
    // miss events.
    let lam_max = {
        let base = trap.base_strengths();
        let amp = trap.amplitudes();
        let mut m: f64 = 0.0;
        for i in 0..3 {
            m = m.max(base[i] * base[i] * (1.0 + amp[i].abs()));
        }
        m.sqrt()
    };
    let mut cfg = *config;
    cfg.h_max = cfg.h_max.min(0.6 * std::f64::consts::PI / lam_max);
    cfg.h_init = cfg.h_init.min(cfg.h_max);

    struct BounceObserver {
        samples: Vec<(f64, DynamicalState)>,
        event: Option<(f64, f64)>, // (t_c, v̇ at crossing)
        /// `Some((interval, next))` emits dense-output samples on the
        /// uniform grid instead of step endpoints.
        uniform: Option<(f64, f64)>,
    }
    impl BounceObserver {
        /// Emits pending uniform samples with t ≤ `limit` from this step.
        fn emit_uniform(&mut self, step: &AcceptedStep<'_>, limit: f64) {
            let Some((interval, ref mut next)) = self.uniform else {
                return;
            };
            let mut buf = [0.0_f64; MAX_DIM];
            while *next <= limit {
                let theta = ((*next - step.t0) / step.h).clamp(0.0, 1.0);
                step.interp.eval(theta, &mut buf[..2]);
                self.samples.push((*next, state_from_phase(&buf, 1, *next)));
                *next += interval;
            }
        }
    }
    impl StepObserver for BounceObserver {
        fn on_step(&mut self, step: &AcceptedStep<'_>) -> StepOutcome {
            let t1 = step.t0 + step.h;
            let v1 = step.y1[0];
            if v1 < 0.0 {
                // Bisection on the dense output for v(θ) = 0.
                let mut lo = 0.0_f64;
                let mut hi = 1.0_f64;
                let mut buf = [0.0_f64; MAX_DIM];
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    step.interp.eval(mid, &mut buf[..2]);
                    if buf[0].abs() <= 1e-12 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if buf[0] > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let theta = 0.5 * (lo + hi);
                step.interp.eval(theta, &mut buf[..2]);
                let t_c = step.t0 + theta * step.h;
                // The interpolant past the crossing describes the unbounced
                // continuation, so only grid times before the event may be
                // drawn from it; later ones wait for the restarted segment.
                self.emit_uniform(step, t_c - 1e-14 * t_c.abs().max(1.0));
                self.event = Some((t_c, buf[1]));
                StepOutcome::Stop
            } else {
                if self.uniform.is_some() {
                    self.emit_uniform(step, t1 + 1e-14 * t1.abs().max(1.0));
                } else {
                    self.samples.push((t1, state_from_phase(step.y1, 1, t1)));
                }
                StepOutcome::Continue
            }
        }
    }

    let mut samples = vec![(state0.time, state0.clone())];
    let mut event_times = Vec::new();
    let mut diag_total = Diagnostics {
        smallest_step: f64::INFINITY,
        ..Diagnostics::default()
    };
    let mut current = state0.clone();
    // The uniform grid survives bounce restarts: grid times falling past an
    // event are emitted by the next segment.
    let mut next_sample = output_interval.map(|dt| state0.time + dt);

    loop {
        let mut obs = BounceObserver {
            samples: Vec::new(),
            event: None,
            uniform: output_interval.zip(next_sample),
        };
        let sys = ModelSystem {
            kind,
            params,
            trap,
        };
        let mut driver = Driver::new(&sys, &cfg);
        let mut y = phase_from_state(&current);
        let result = driver.propagate(current.time, &mut y, tau_end, &mut obs);
        samples.append(&mut obs.samples);
        if let Some((_, next)) = obs.uniform {
            next_sample = Some(next);
        }
        accumulate(&mut diag_total, &driver.diag);

        if let Err(failure) = result {
            return Err(IntegrationError {
                failure,
                partial: Trajectory {
                    samples,
                    dense: output_interval.is_some(),
                    event_times,
                    diagnostics: diag_total,
                },
            });
        }

        match obs.event {
            Some((t_c, vdot_c)) => {
                event_times.push(t_c);
                if event_times.len() as u64 > EVENT_LIMIT {
                    return Err(IntegrationError {
                        failure: IntegrationFailure::TooManyEvents {
                            time: t_c,
                            limit: EVENT_LIMIT,
                        },
                        partial: Trajectory {
                            samples,
                            dense: output_interval.is_some(),
                            event_times,
                            diagnostics: diag_total,
                        },
                    });
                }
                // Elastic bounce: the coordinate is 0 by construction and
                // the incoming velocity flips sign.
                current = DynamicalState {
                    coordinates: vec![0.0],
                    velocities: vec![-vdot_c],
                    time: t_c,
                };
                if output_interval.is_none() {
                    samples.push((t_c, current.clone()));
                }
                if t_c >= tau_end {
                    break;
                }
            }
            None => break,
        }
    }

    Ok(Trajectory {
        samples,
        dense: output_interval.is_some(),
        event_times,
        diagnostics: diag_total,
    })
}

fn accumulate(total: &mut Diagnostics, part: &Diagnostics) {
    total.accepted_steps += part.accepted_steps;
    total.rejected_steps += part.rejected_steps;
    total.stiff_steps += part.stiff_steps;
    total.regime_switches += part.regime_switches;
    total.rhs_evaluations += part.rhs_evaluations;
    total.smallest_step = total.smallest_step.min(part.smallest_step);
}

/// Observer that captures the state exactly at τ_n = n·2π/ω via dense
/// output, with per-period coordinate-magnitude maxima and an optional
/// escape bound.
pub(crate) struct StroboscopicObserver {
    pub dim: usize,
    pub period: f64,
    pub t_start: f64,
    pub next_index: usize,
    pub max_index: usize,
    pub samples: Vec<DynamicalState>,
    /// Deviations are measured from this coordinate value (an equilibrium
    /// width, or 0 for the linear models).
    pub reference: f64,
    /// Per-period maxima of |coordinate 0 − reference| (envelope),
    /// including partial periods.
    pub period_max: Vec<f64>,
    /// Stop early once |coordinate 0 − reference| exceeds this bound.
    pub escape_above: Option<f64>,
    pub escaped: bool,
    pub global_max: f64,
}

impl StroboscopicObserver {
    pub fn new(dim: usize, t_start: f64, period: f64, n_periods: usize) -> Self {
        Self {
            dim,
            period,
            t_start,
            next_index: 0,
            max_index: n_periods,
            samples: Vec::with_capacity(n_periods + 1),
            reference: 0.0,
            period_max: Vec::new(),
            escape_above: None,
            escaped: false,
            global_max: f64::NEG_INFINITY,
        }
    }

    fn bucket(&mut self, t: f64, value: f64) {
        let idx = ((t - self.t_start) / self.period).floor();
        let idx = if idx < 0.0 { 0 } else { idx as usize };
        while self.period_max.len() <= idx {
            self.period_max.push(f64::NEG_INFINITY);
        }
        let slot = &mut self.period_max[idx];
        if value > *slot {
            *slot = value;
        }
    }
}

impl StepObserver for StroboscopicObserver {
    fn on_step(&mut self, step: &AcceptedStep<'_>) -> StepOutcome {
        let t1 = step.t0 + step.h;
        let mut buf = [0.0_f64; MAX_DIM];

        // Envelope sampling: endpoints plus a few interior dense points.
        for &(theta, t) in &[
            (0.25, step.t0 + 0.25 * step.h),
            (0.5, step.t0 + 0.5 * step.h),
            (0.75, step.t0 + 0.75 * step.h),
            (1.0, t1),
        ] {
            step.interp.eval(theta, &mut buf[..2 * self.dim]);
            let v = (buf[0] - self.reference).abs();
            self.bucket(t, v);
            if v > self.global_max {
                self.global_max = v;
            }
            if let Some(bound) = self.escape_above {
                if v > bound {
                    self.escaped = true;
                }
            }
        }

        // Stroboscopic samples inside this step.
        while self.next_index <= self.max_index {
            let target = self.t_start + self.next_index as f64 * self.period;
            if target > t1 + 1e-12 * t1.abs().max(1.0) {
                break;
            }
            let theta = ((target - step.t0) / step.h).clamp(0.0, 1.0);
            step.interp.eval(theta, &mut buf[..2 * self.dim]);
            self.samples
                .push(state_from_phase(&buf, self.dim, target));
            self.next_index += 1;
        }

        if self.escaped || self.next_index > self.max_index {
            StepOutcome::Stop
        } else {
            StepOutcome::Continue
        }
    }
}

/// States sampled exactly at multiples of the drive period,
/// τ_n = n·2π/ω for n = 0..=n_periods, via dense-output interpolation.
pub fn stroboscopic_map(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state0: &DynamicalState,
    n_periods: usize,
    config: &IntegratorConfig,
) -> Result<Vec<DynamicalState>, IntegrationError> {
    let period = match trap.drive_period() {
        Ok(p) => p,
        Err(e) => {
            return Err(IntegrationError {
                failure: IntegrationFailure::InvalidInput(e),
                partial: empty_trajectory(state0),
            })
        }
    };
    if n_periods == 0 {
        return Ok(vec![state0.clone()]);
    }
    let tau_end = state0.time + n_periods as f64 * period;
    if let Err(failure) = validate_common(kind, state0, tau_end, config) {
        return Err(IntegrationError {
            failure,
            partial: empty_trajectory(state0),
        });
    }
    let dim = kind.dimension();
    let mut obs = StroboscopicObserver::new(dim, state0.time, period, n_periods);
    obs.samples.push(state0.clone());
    obs.next_index = 1;

    match run_with_observer(kind, params, trap, state0, tau_end + 0.5 * period, config, &mut obs) {
        Ok(_) | Err(_) if obs.samples.len() == n_periods + 1 => Ok(obs.samples),
        Ok(diag) => Err(IntegrationError {
            failure: IntegrationFailure::StepUnderflow { time: tau_end },
            partial: Trajectory {
                samples: obs
                    .samples
                    .iter()
                    .map(|s| (s.time, s.clone()))
                    .collect(),
                dense: true,
                event_times: Vec::new(),
                diagnostics: diag,
            },
        }),
        Err((diag, failure)) => Err(IntegrationError {
            failure,
            partial: Trajectory {
                samples: obs
                    .samples
                    .iter()
                    .map(|s| (s.time, s.clone()))
                    .collect(),
                dense: true,
                event_times: Vec::new(),
                diagnostics: diag,
            },
        }),
    }
}

/// Low-level entry used by the sweep module: runs `kind` under an arbitrary
/// observer and returns the diagnostics (errors carry no trajectory here;
/// the caller owns whatever the observer collected).
pub(crate) fn drive_observed(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state0: &DynamicalState,
    tau_end: f64,
    config: &IntegratorConfig,
    observer: &mut dyn StepObserver,
) -> Result<Diagnostics, (Diagnostics, IntegrationFailure)> {
    let sys = ModelSystem { kind, params, trap };
    let mut driver = Driver::new(&sys, config);
    let mut y = phase_from_state(state0);
    match driver.propagate(state0.time, &mut y, tau_end, observer) {
        Ok(()) => Ok(driver.diag),
        Err(failure) => Err((driver.diag, failure)),
    }
}
