//! Model definitions: trap modulation, interaction parameters, phase-space
//! states, right-hand sides, energies and equilibria.
//!
//! All models are second-order systems in one or three coordinates.
//! The width models carry a repulsive singular core (`1/v³` from zero-point
//! kinetic pressure plus `P/v⁴` from the mean-field interaction) that acts
//! as an elastic barrier at the origin; the linear models (Mathieu,
//! center of mass) have no core and may cross zero.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors produced by model construction and evaluation.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    /// A constructor argument violates a model invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A width coordinate reached zero or below where the singular core is
    /// defined; integrators treat this as "shrink the step", never as a
    /// state to evaluate through.
    #[error("non-positive width coordinate [{index}] = {value:e}")]
    NonPositiveWidth { index: usize, value: f64 },
    /// The requested quantity is not defined for this model.
    #[error("operation not supported for {model}: {reason}")]
    Unsupported {
        model: &'static str,
        reason: &'static str,
    },
}

/// Coordinate channel of the (possibly anisotropic) trap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    X,
    Y,
    Z,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::X, Channel::Y, Channel::Z];

    pub fn index(self) -> usize {
        match self {
            Channel::X => 0,
            Channel::Y => 1,
            Channel::Z => 2,
        }
    }
}

/// Time-dependent trap strengths λ_η²(τ) = λ₀η²(1 + ε_η cos ωτ) plus an
/// optional viscous damping coefficient γ shared by all channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapModulation {
    base: [f64; 3],
    amplitude: [f64; 3],
    omega: f64,
    damping: f64,
}

impl TrapModulation {
    /// General anisotropic constructor.
    ///
    /// Requires λ₀η > 0 and |ε_η| < 1 for every channel (so λ_η²(τ) stays
    /// strictly positive), γ ≥ 0, and ω > 0 whenever any ε_η ≠ 0.
    pub fn new(
        base: [f64; 3],
        amplitude: [f64; 3],
        omega: f64,
        damping: f64,
    ) -> Result<Self, ModelError> {
        for (i, &b) in base.iter().enumerate() {
            if !(b > 0.0) || !b.is_finite() {
                return Err(ModelError::InvalidParameter(format!(
                    "base strength λ₀[{i}] must be positive and finite, got {b}"
                )));
            }
        }
        for (i, &a) in amplitude.iter().enumerate() {
            if !(a.abs() < 1.0) {
                return Err(ModelError::InvalidParameter(format!(
                    "drive amplitude ε[{i}] must satisfy |ε| < 1, got {a}"
                )));
            }
        }
        let driven = amplitude.iter().any(|&a| a != 0.0);
        if driven && !(omega > 0.0 && omega.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "drive frequency ω must be positive when any ε ≠ 0, got {omega}"
            )));
        }
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "drive frequency ω must be finite and non-negative, got {omega}"
            )));
        }
        if !(damping >= 0.0) || !damping.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "damping γ must be finite and non-negative, got {damping}"
            )));
        }
        Ok(Self {
            base,
            amplitude,
            omega,
            damping,
        })
    }

    /// Isotropic trap with the same base strength and drive on all channels.
    pub fn isotropic(lambda0: f64, epsilon: f64, omega: f64) -> Result<Self, ModelError> {
        Self::new(
            [lambda0; 3],
            [epsilon; 3],
            omega,
            0.0,
        )
    }

    /// Undriven trap (ε = 0 everywhere); ω is kept at zero.
    pub fn static_trap(lambda0: f64) -> Result<Self, ModelError> {
        Self::new([lambda0; 3], [0.0; 3], 0.0, 0.0)
    }

    /// Symmetric (m = 0) drive on a cylindrical trap: ε_x = ε_y = ε,
    /// ε_z = 0, base strengths (λ_r, λ_r, λ_z).
    pub fn m0(lambda_r: f64, lambda_z: f64, epsilon: f64, omega: f64) -> Result<Self, ModelError> {
        Self::new(
            [lambda_r, lambda_r, lambda_z],
            [epsilon, epsilon, 0.0],
            omega,
            0.0,
        )
    }

    /// Quadrupolar (m = 2) drive on a cylindrical trap: ε_x = −ε_y = ε,
    /// ε_z = 0.
    pub fn m2(lambda_r: f64, lambda_z: f64, epsilon: f64, omega: f64) -> Result<Self, ModelError> {
        Self::new(
            [lambda_r, lambda_r, lambda_z],
            [epsilon, -epsilon, 0.0],
            omega,
            0.0,
        )
    }

    /// Returns a copy with the damping coefficient replaced.
    pub fn with_damping(self, gamma: f64) -> Result<Self, ModelError> {
        Self::new(self.base, self.amplitude, self.omega, gamma)
    }

    /// λ_η²(τ) for all three channels; strictly positive by construction.
    pub fn strengths_squared(&self, tau: f64) -> [f64; 3] {
        let c = if self.omega > 0.0 {
            (self.omega * tau).cos()
        } else {
            1.0
        };
        [
            self.base[0] * self.base[0] * (1.0 + self.amplitude[0] * c),
            self.base[1] * self.base[1] * (1.0 + self.amplitude[1] * c),
            self.base[2] * self.base[2] * (1.0 + self.amplitude[2] * c),
        ]
    }

    /// λ_η²(τ) for a single channel.
    pub fn channel_squared(&self, channel: Channel, tau: f64) -> f64 {
        let i = channel.index();
        let c = if self.omega > 0.0 {
            (self.omega * tau).cos()
        } else {
            1.0
        };
        self.base[i] * self.base[i] * (1.0 + self.amplitude[i] * c)
    }

    pub fn base_strengths(&self) -> [f64; 3] {
        self.base
    }

    pub fn amplitudes(&self) -> [f64; 3] {
        self.amplitude
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    /// Whether any channel is actually driven.
    pub fn is_driven(&self) -> bool {
        self.amplitude.iter().any(|&a| a != 0.0)
    }

    /// Drive period 2π/ω.
    ///
    /// Returns an error for an undriven trap (ω = 0), where no period is
    /// defined.
    pub fn drive_period(&self) -> Result<f64, ModelError> {
        if self.omega > 0.0 {
            Ok(std::f64::consts::TAU / self.omega)
        } else {
            Err(ModelError::InvalidParameter(
                "drive period undefined for ω = 0".into(),
            ))
        }
    }
}

/// Physical inputs behind the dimensionless interaction strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalInputs {
    /// Particle number N.
    pub particle_count: f64,
    /// s-wave scattering length a (same length unit as `oscillator_length`).
    pub scattering_length: f64,
    /// Oscillator length a₀ of the reference trap.
    pub oscillator_length: f64,
}

/// Dimensionless interaction strength P = √(2/π)·N·a/a₀ (repulsive only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    interaction: f64,
    physical: Option<PhysicalInputs>,
}

impl ModelParams {
    /// Construct directly from the dimensionless strength P ≥ 0.
    pub fn from_interaction(p: f64) -> Result<Self, ModelError> {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "interaction strength P must be finite and ≥ 0, got {p}"
            )));
        }
        Ok(Self {
            interaction: p,
            physical: None,
        })
    }

    /// Construct from the physical triple (N, a, a₀); derives
    /// P = √(2/π)·N·a/a₀.
    pub fn from_physical(
        particle_count: f64,
        scattering_length: f64,
        oscillator_length: f64,
    ) -> Result<Self, ModelError> {
        if !(particle_count >= 0.0 && scattering_length >= 0.0 && oscillator_length > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "physical triple must satisfy N ≥ 0, a ≥ 0, a₀ > 0; \
                 got N={particle_count}, a={scattering_length}, a₀={oscillator_length}"
            )));
        }
        let p = (2.0 / std::f64::consts::PI).sqrt() * particle_count * scattering_length
            / oscillator_length;
        Ok(Self {
            interaction: p,
            physical: Some(PhysicalInputs {
                particle_count,
                scattering_length,
                oscillator_length,
            }),
        })
    }

    pub fn interaction(&self) -> f64 {
        self.interaction
    }

    pub fn physical(&self) -> Option<PhysicalInputs> {
        self.physical
    }
}

/// Singular-core variant of the radial width model.
///
/// `Full` is the physical core `1/v³ + P/v⁴`. The alternatives replace it
/// with a single power of comparable strength, `(1+P)/v⁴` or `(1+P)/v³`;
/// they exist to demonstrate that the resonance structure depends only on
/// the presence of a hard repulsive barrier, not on its detailed shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    Full,
    InverseCubic,
    InverseQuartic,
}

/// Which dynamical model a state evolves under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Three coupled width equations
    /// v̈_η + λ_η²(τ)v_η = 1/v_η³ + P/(v_η²·Π_{μ≠η}v_μ).
    Variational3D,
    /// Radially symmetric width equation v̈ + λ²(τ)v = core(v), with the
    /// chosen singular core.
    Radial(SingularKind),
    /// Linear oscillator v̈ + λ²(τ)v = 0 with an elastic bounce at v = 0.
    ImpactOscillator,
    /// Linear Mathieu oscillator ü + γu̇ + λ²(τ)u = 0.
    Mathieu,
    /// Center-of-mass motion in the driven trap; identical dynamics to
    /// `Mathieu` (the mean position obeys the bare trap equation no matter
    /// how strong the interaction is).
    CenterOfMass,
}

impl ModelKind {
    /// Number of coordinates (1 or 3).
    pub fn dimension(self) -> usize {
        match self {
            ModelKind::Variational3D => 3,
            _ => 1,
        }
    }

    /// Whether coordinates are widths (positive quantities).
    pub fn is_width_model(self) -> bool {
        matches!(
            self,
            ModelKind::Variational3D | ModelKind::Radial(_) | ModelKind::ImpactOscillator
        )
    }

    /// Whether the right-hand side has a singular core that forbids
    /// non-positive coordinates.
    pub fn has_singular_core(self) -> bool {
        matches!(self, ModelKind::Variational3D | ModelKind::Radial(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Variational3D => "variational3d",
            ModelKind::Radial(SingularKind::Full) => "radial",
            ModelKind::Radial(SingularKind::InverseCubic) => "radial_cubic",
            ModelKind::Radial(SingularKind::InverseQuartic) => "radial_quartic",
            ModelKind::ImpactOscillator => "impact",
            ModelKind::Mathieu => "mathieu",
            ModelKind::CenterOfMass => "center_of_mass",
        }
    }

    /// Inverse of [`ModelKind::name`]; the vocabulary used by
    /// configuration files.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "variational3d" => ModelKind::Variational3D,
            "radial" => ModelKind::Radial(SingularKind::Full),
            "radial_cubic" => ModelKind::Radial(SingularKind::InverseCubic),
            "radial_quartic" => ModelKind::Radial(SingularKind::InverseQuartic),
            "impact" => ModelKind::ImpactOscillator,
            "mathieu" => ModelKind::Mathieu,
            "center_of_mass" => ModelKind::CenterOfMass,
            _ => return None,
        })
    }
}

/// A phase-space point: coordinates, velocities and the time they refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicalState {
    pub coordinates: Vec<f64>,
    pub velocities: Vec<f64>,
    pub time: f64,
}

impl DynamicalState {
    /// Single-coordinate state at τ = 0.
    pub fn single(q: f64, qdot: f64) -> Self {
        Self {
            coordinates: vec![q],
            velocities: vec![qdot],
            time: 0.0,
        }
    }

    /// Three-coordinate state at τ = 0.
    pub fn triple(q: [f64; 3], qdot: [f64; 3]) -> Self {
        Self {
            coordinates: q.to_vec(),
            velocities: qdot.to_vec(),
            time: 0.0,
        }
    }

    pub fn at_time(mut self, tau: f64) -> Self {
        self.time = tau;
        self
    }

    /// Checks dimension and (for singular-core models) positivity.
    pub fn validate_for(&self, kind: ModelKind) -> Result<(), ModelError> {
        if self.coordinates.len() != kind.dimension()
            || self.velocities.len() != kind.dimension()
        {
            return Err(ModelError::InvalidParameter(format!(
                "state dimension {} does not match model {} (needs {})",
                self.coordinates.len(),
                kind.name(),
                kind.dimension()
            )));
        }
        if kind.has_singular_core() {
            for (i, &q) in self.coordinates.iter().enumerate() {
                if !(q > 0.0) {
                    return Err(ModelError::NonPositiveWidth { index: i, value: q });
                }
            }
        }
        Ok(())
    }
}

/// Writes the accelerations for `kind` at time `tau` into `out`
/// (length = model dimension). Shared by the public [`rhs`] and the
/// integrator's first-order formulation.
pub(crate) fn accelerations(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    tau: f64,
    coords: &[f64],
    vels: &[f64],
    out: &mut [f64],
) -> Result<(), ModelError> {
    let p = params.interaction();
    let gamma = trap.damping();
    match kind {
        ModelKind::Variational3D => {
            let lam2 = trap.strengths_squared(tau);
            for i in 0..3 {
                let v = coords[i];
                if !(v > 0.0) {
                    return Err(ModelError::NonPositiveWidth { index: i, value: v });
                }
            }
            let prod = coords[0] * coords[1] * coords[2];
            for i in 0..3 {
                let v = coords[i];
                // P/(v_η² Π_{μ≠η} v_μ) = P·v_η/(v_η³ Π v_μ) — written to
                // reuse the full product.
                let core = 1.0 / (v * v * v) + p / (v * prod);
                out[i] = -lam2[i] * v - gamma * vels[i] + core;
            }
        }
        ModelKind::Radial(variant) => {
            let v = coords[0];
            if !(v > 0.0) {
                return Err(ModelError::NonPositiveWidth { index: 0, value: v });
            }
            let lam2 = trap.channel_squared(Channel::X, tau);
            let v2 = v * v;
            let v3 = v2 * v;
            let core = match variant {
                SingularKind::Full => 1.0 / v3 + p / (v3 * v),
                SingularKind::InverseCubic => (1.0 + p) / v3,
                SingularKind::InverseQuartic => (1.0 + p) / (v3 * v),
            };
            out[0] = -lam2 * v - gamma * vels[0] + core;
        }
        ModelKind::ImpactOscillator | ModelKind::Mathieu | ModelKind::CenterOfMass => {
            let lam2 = trap.channel_squared(Channel::X, tau);
            out[0] = -lam2 * coords[0] - gamma * vels[0];
        }
    }
    Ok(())
}

/// Acceleration vector of `kind` at the state's own time.
///
/// Errors with [`ModelError::NonPositiveWidth`] when a singular-core
/// coordinate is ≤ 0; integrators use that signal to shrink the step.
pub fn rhs(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state: &DynamicalState,
) -> Result<Vec<f64>, ModelError> {
    state.validate_for(kind)?;
    let mut out = vec![0.0; kind.dimension()];
    accelerations(
        kind,
        params,
        trap,
        state.time,
        &state.coordinates,
        &state.velocities,
        &mut out,
    )?;
    Ok(out)
}

/// First integral of the width models at frozen trap strength λ(τ).
///
/// Radial (full core): E = ½v̇² + ½λ²v² + 1/(2v²) + P/(3v³); the variant
/// cores integrate to their own potential terms. 3D:
/// E = ½Σ(v̇_η² + λ_η²v_η²) + Σ 1/(2v_η²) + P/(v_x v_y v_z). The impact
/// oscillator carries the bare harmonic energy (conserved across bounces,
/// which only flip the velocity sign).
///
/// Exactly conserved along trajectories when ε = γ = 0.
pub fn energy(
    kind: ModelKind,
    params: &ModelParams,
    trap: &TrapModulation,
    state: &DynamicalState,
    at_time: f64,
) -> Result<f64, ModelError> {
    state.validate_for(kind)?;
    let p = params.interaction();
    match kind {
        ModelKind::Variational3D => {
            let lam2 = trap.strengths_squared(at_time);
            let mut e = 0.0;
            for i in 0..3 {
                let v = state.coordinates[i];
                let vd = state.velocities[i];
                e += 0.5 * (vd * vd + lam2[i] * v * v) + 0.5 / (v * v);
            }
            e += p / (state.coordinates[0] * state.coordinates[1] * state.coordinates[2]);
            Ok(e)
        }
        ModelKind::Radial(variant) => {
            let v = state.coordinates[0];
            let vd = state.velocities[0];
            let lam2 = trap.channel_squared(Channel::X, at_time);
            let core_potential = match variant {
                SingularKind::Full => 0.5 / (v * v) + p / (3.0 * v * v * v),
                SingularKind::InverseCubic => 0.5 * (1.0 + p) / (v * v),
                SingularKind::InverseQuartic => (1.0 + p) / (3.0 * v * v * v),
            };
            Ok(0.5 * (vd * vd + lam2 * v * v) + core_potential)
        }
        ModelKind::ImpactOscillator => {
            let v = state.coordinates[0];
            let vd = state.velocities[0];
            let lam2 = trap.channel_squared(Channel::X, at_time);
            Ok(0.5 * (vd * vd + lam2 * v * v))
        }
        ModelKind::Mathieu | ModelKind::CenterOfMass => Err(ModelError::Unsupported {
            model: kind.name(),
            reason: "energy is defined for the width models only",
        }),
    }
}

/// Unique positive root of λ₀²v⁵ − v − P = 0: the stationary width of the
/// radial model (full core) in a static trap of strength λ₀.
///
/// Bracketed bisection on [max(P^{1/5}/λ₀^{2/5}, 1e-6),
/// (1+P)^{1/5}/λ₀^{2/5} + 2]; the upper end is doubled away from the origin
/// until it brackets, which only matters for very shallow traps. Absolute
/// tolerance 1e-12.
pub fn equilibrium_width(params: &ModelParams, lambda0: f64) -> Result<f64, ModelError> {
    if !(lambda0 > 0.0) || !lambda0.is_finite() {
        return Err(ModelError::InvalidParameter(format!(
            "equilibrium width needs λ₀ > 0, got {lambda0}"
        )));
    }
    let p = params.interaction();
    if p == 0.0 {
        // λ₀²v⁵ = v has the closed-form root v* = λ₀^{-1/2}; returning it
        // exactly keeps the linearized frequency at exactly 2λ₀.
        return Ok(lambda0.powf(-0.5));
    }
    let l2 = lambda0 * lambda0;
    let f = |v: f64| l2 * v.powi(5) - v - p;
    let scale = lambda0.powf(-0.4);
    let mut lo = (p.powf(0.2) * scale).max(1e-6);
    if f(lo) > 0.0 {
        // Only reachable for P = 0 where the lower clamp may overshoot.
        lo = 1e-6;
    }
    let mut hi = (1.0 + p).powf(0.2) * scale + 2.0;
    let mut guard = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(ModelError::InvalidParameter(format!(
                "failed to bracket equilibrium width for P={p}, λ₀={lambda0}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Stationary width of any single-width model variant; zero for the linear
/// models (their rest point is the origin).
pub fn equilibrium_width_of(
    kind: ModelKind,
    params: &ModelParams,
    lambda0: f64,
) -> Result<f64, ModelError> {
    let p = params.interaction();
    let l2 = lambda0 * lambda0;
    match kind {
        ModelKind::Radial(SingularKind::Full) | ModelKind::Variational3D => {
            equilibrium_width(params, lambda0)
        }
        // λ₀²v = (1+P)/v⁴  ⇒  v = ((1+P)/λ₀²)^{1/5}
        ModelKind::Radial(SingularKind::InverseQuartic) => Ok(((1.0 + p) / l2).powf(0.2)),
        // λ₀²v = (1+P)/v³  ⇒  v = ((1+P)/λ₀²)^{1/4}
        ModelKind::Radial(SingularKind::InverseCubic) => Ok(((1.0 + p) / l2).powf(0.25)),
        ModelKind::ImpactOscillator | ModelKind::Mathieu | ModelKind::CenterOfMass => Ok(0.0),
    }
}

/// Stationary widths of the 3D model for an anisotropic static trap,
/// found by cyclic per-axis bisection to absolute tolerance 1e-12.
pub fn equilibrium_widths_3d(
    params: &ModelParams,
    base: [f64; 3],
) -> Result<[f64; 3], ModelError> {
    for (i, &b) in base.iter().enumerate() {
        if !(b > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "base strength λ₀[{i}] must be positive, got {b}"
            )));
        }
    }
    let p = params.interaction();
    // Start from the decoupled (P-shared isotropically) guesses.
    let mut v = [0.0; 3];
    for i in 0..3 {
        v[i] = equilibrium_width(params, base[i])?;
    }
    for _ in 0..500 {
        let mut max_shift: f64 = 0.0;
        for i in 0..3 {
            let others = v[(i + 1) % 3] * v[(i + 2) % 3];
            let l2 = base[i] * base[i];
            // Solve λ²v = 1/v³ + P/(v²·others) for this axis alone;
            // g is increasing in v, so bisection brackets reliably.
            let g = |w: f64| l2 * w - 1.0 / (w * w * w) - p / (w * w * others);
            let mut lo = 1e-6;
            let mut hi = v[i].max(1.0);
            let mut guard = 0;
            while g(hi) < 0.0 {
                hi *= 2.0;
                guard += 1;
                if guard > 60 {
                    return Err(ModelError::InvalidParameter(
                        "3D equilibrium failed to bracket".into(),
                    ));
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            let new = 0.5 * (lo + hi);
            max_shift = max_shift.max((new - v[i]).abs());
            v[i] = new;
        }
        if max_shift < 1e-13 {
            return Ok(v);
        }
    }
    Err(ModelError::InvalidParameter(
        "3D equilibrium iteration did not converge".into(),
    ))
}

/// Small-oscillation frequency about the radial equilibrium:
/// ω_lin = √(λ₀² + 3/v*⁴ + 4P/v*⁵).
///
/// Approaches √5·λ₀ as P → ∞, and equals 2λ₀ exactly at P = 0 — twice the
/// particle frequency, the familiar breathing-mode value.
pub fn linearized_frequency(params: &ModelParams, lambda0: f64) -> Result<f64, ModelError> {
    let vstar = equilibrium_width(params, lambda0)?;
    let p = params.interaction();
    let v4 = vstar.powi(4);
    Ok((lambda0 * lambda0 + 3.0 / v4 + 4.0 * p / (v4 * vstar)).sqrt())
}

/// Folds an unconstrained oscillator coordinate onto the width half-line:
/// v = |u|. Maps Mathieu solutions onto impact-oscillator solutions.
pub fn fold_to_width(u: f64) -> f64 {
    u.abs()
}
