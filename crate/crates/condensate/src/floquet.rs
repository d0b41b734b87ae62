//! Linear stability of the periodically driven oscillator via Floquet
//! theory.
//!
//! The linear test equation ü + γu̇ + λ₀²(1 + ε cos ωτ)u = 0 is integrated
//! over one drive period from the two canonical basis states to build the
//! fundamental (monodromy) matrix. Its eigenvalues — the Floquet
//! multipliers — decide stability: any multiplier outside the unit circle
//! means exponential growth. Instability regions in the (ω, ε) plane form
//! wedges; [`trace_wedge`] walks one wedge's boundary in ω for each drive
//! amplitude by bisection, seeded from the classical tongue-center
//! expansions.

use crate::integrate::{
    AcceptedStep, Driver, IntegrationFailure, IntegratorConfig, OdeSystem, StepObserver,
    StepOutcome, MAX_DIM,
};
use crate::model::{Channel, ModelError, TrapModulation};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

/// Stability flags use this as "numerically zero" growth.
pub const STABILITY_MARGIN: f64 = 1e-10;

/// Errors from the stability operations.
#[derive(Debug, Error)]
pub enum FloquetError {
    #[error("{0}")]
    Invalid(#[from] ModelError),
    #[error("period integration failed: {0}")]
    Integration(IntegrationFailure),
}

/// One-period linear stability summary.
#[derive(Debug, Clone)]
pub struct FloquetResult {
    /// Fundamental matrix over one period, row-major [[m11, m12], [m21, m22]].
    pub monodromy: [[f64; 2]; 2],
    /// Eigenvalues of the monodromy matrix.
    pub multipliers: [Complex64; 2],
    /// max ln|μ| / T with T = 2π/ω; positive means exponential growth
    /// per unit τ.
    pub growth_exponent: f64,
    /// growth_exponent ≤ 1e-10.
    pub stable: bool,
}

impl FloquetResult {
    /// Trace of the monodromy matrix.
    pub fn trace(&self) -> f64 {
        self.monodromy[0][0] + self.monodromy[1][1]
    }

    /// Determinant of the monodromy matrix (= e^{−γT} by Liouville).
    pub fn determinant(&self) -> f64 {
        self.monodromy[0][0] * self.monodromy[1][1]
            - self.monodromy[0][1] * self.monodromy[1][0]
    }
}

/// Verdict of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stability {
    Stable,
    Unstable { growth_exponent: f64 },
}

impl Stability {
    pub fn is_unstable(&self) -> bool {
        matches!(self, Stability::Unstable { .. })
    }
}

/// Both basis solutions of the linear test equation, integrated together:
/// y = [u₁, u₂, u̇₁, u̇₂].
struct FundamentalSystem<'a> {
    trap: &'a TrapModulation,
    channel: Channel,
}

impl OdeSystem for FundamentalSystem<'_> {
    fn phase_dim(&self) -> usize {
        4
    }

    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<(), ModelError> {
        let lam2 = self.trap.channel_squared(self.channel, t);
        let gamma = self.trap.damping();
        dydt[0] = y[2];
        dydt[1] = y[3];
        dydt[2] = -gamma * y[2] - lam2 * y[0];
        dydt[3] = -gamma * y[3] - lam2 * y[1];
        Ok(())
    }
}

struct NullObserver;

impl StepObserver for NullObserver {
    fn on_step(&mut self, _step: &AcceptedStep<'_>) -> StepOutcome {
        StepOutcome::Continue
    }
}

/// Monodromy matrix and Floquet multipliers for one channel of the trap.
///
/// The two canonical basis solutions (u(0), u̇(0)) = (1, 0) and (0, 1) are
/// integrated over one period T = 2π/ω. Tolerances are tightened to at
/// least rel 1e-12 / abs 1e-14 regardless of `config` so the multipliers
/// are trustworthy to the stability margin.
pub fn monodromy(
    trap: &TrapModulation,
    channel: Channel,
    config: &IntegratorConfig,
) -> Result<FloquetResult, FloquetError> {
    let omega = trap.omega();
    if !(omega > 0.0) {
        return Err(FloquetError::Invalid(ModelError::InvalidParameter(
            "monodromy needs a positive drive frequency".into(),
        )));
    }
    config.validate()?;
    let period = std::f64::consts::TAU / omega;

    let cfg = IntegratorConfig {
        rel_tol: config.rel_tol.min(1e-12),
        abs_tol: config.abs_tol.min(1e-14),
        ..*config
    };
    let sys = FundamentalSystem { trap, channel };
    let mut driver = Driver::new(&sys, &cfg);
    let mut y = [0.0_f64; MAX_DIM];
    y[0] = 1.0;
    y[3] = 1.0;
    driver
        .propagate(0.0, &mut y, period, &mut NullObserver)
        .map_err(FloquetError::Integration)?;

    // Columns of M are the evolved basis vectors.
    let m = [[y[0], y[1]], [y[2], y[3]]];
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
    let half_tr = Complex64::new(0.5 * tr, 0.0);
    let multipliers = [half_tr + 0.5 * disc, half_tr - 0.5 * disc];
    let growth_exponent = multipliers
        .iter()
        .map(|mu| mu.norm().max(1e-300).ln() / period)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(FloquetResult {
        monodromy: m,
        multipliers,
        growth_exponent,
        stable: growth_exponent <= STABILITY_MARGIN,
    })
}

/// Stability of ü + γu̇ + λ₀²(1 + ε cos ωτ)u = 0 at one parameter point.
///
/// Unstable iff the largest multiplier magnitude exceeds 1 + 1e-10.
pub fn classify(
    omega: f64,
    epsilon: f64,
    gamma: f64,
    lambda0: f64,
    config: &IntegratorConfig,
) -> Result<Stability, FloquetError> {
    let trap = TrapModulation::isotropic(lambda0, epsilon, omega)?.with_damping(gamma)?;
    let result = monodromy(&trap, Channel::X, config)?;
    let max_mu = result
        .multipliers
        .iter()
        .map(|mu| mu.norm())
        .fold(0.0, f64::max);
    if max_mu > 1.0 + STABILITY_MARGIN {
        Ok(Stability::Unstable {
            growth_exponent: result.growth_exponent,
        })
    } else {
        Ok(Stability::Stable)
    }
}

/// Boundary curves of one instability wedge in the (ω, ε) plane.
///
/// Rows with `omega_lower > omega_upper` mean "no instability found at
/// this ε" (the empty-interval convention, used below the damping-lifted
/// tip); the [`WedgeBoundary::interval`] accessor folds that into an
/// `Option`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WedgeBoundary {
    /// Wedge order n (tongues emanate from ω = 2λ₀/n).
    pub order: usize,
    /// Drive amplitudes, strictly increasing.
    pub epsilon_values: Vec<f64>,
    /// Lower boundary frequency per amplitude.
    pub omega_lower: Vec<f64>,
    /// Upper boundary frequency per amplitude.
    pub omega_upper: Vec<f64>,
    /// (ω, ε) where the wedge pinches shut: (2λ₀/n, 0) undamped; lifted to
    /// ε > 0 by damping. ε = ∞ when no instability exists on the grid.
    pub tip: (f64, f64),
}

impl WedgeBoundary {
    /// The instability interval at row `i`, or `None` when empty.
    pub fn interval(&self, i: usize) -> Option<(f64, f64)> {
        let (lo, hi) = (self.omega_lower[i], self.omega_upper[i]);
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    pub fn width(&self, i: usize) -> f64 {
        self.interval(i).map_or(0.0, |(lo, hi)| hi - lo)
    }
}

const EMPTY_LO: f64 = f64::INFINITY;
const EMPTY_HI: f64 = f64::NEG_INFINITY;

/// Tongue center in Mathieu's `a` parameter (a = 4λ₀²/ω², q̃ = 2λ₀²ε/ω²),
/// from the classical small-q̃ expansions.
fn tongue_center_a(order: usize, qt: f64) -> f64 {
    match order {
        1 => 1.0 - qt * qt / 8.0,
        2 => 4.0 + qt * qt / 6.0,
        3 => 9.0 + qt * qt / 16.0,
        _ => unreachable!("order validated to 1..=3"),
    }
}

/// Tongue half-width in `a` at lowest order.
fn tongue_half_width_a(order: usize, qt: f64) -> f64 {
    let qt = qt.abs();
    match order {
        1 => qt,
        2 => qt * qt / 4.0,
        3 => qt * qt * qt / 64.0,
        _ => unreachable!(),
    }
}

/// Self-consistent tongue-center frequency for wedge `order` at amplitude
/// `epsilon` (q̃ depends on ω, so iterate the map a few times).
fn seed_frequency(order: usize, epsilon: f64, lambda0: f64) -> f64 {
    let mut omega = 2.0 * lambda0 / order as f64;
    for _ in 0..20 {
        let qt = 2.0 * lambda0 * lambda0 * epsilon / (omega * omega);
        let a = tongue_center_a(order, qt).max(1e-12);
        omega = 2.0 * lambda0 / a.sqrt();
    }
    omega
}

/// Finds one unstable frequency inside the wedge at this ε, or `None`.
///
/// Tries the asymptotic center first, then scans a window around it sized
/// by the predicted tongue width.
fn find_unstable_seed(
    order: usize,
    epsilon: f64,
    gamma: f64,
    lambda0: f64,
    config: &IntegratorConfig,
) -> Result<Option<f64>, FloquetError> {
    if epsilon == 0.0 {
        return Ok(None);
    }
    let center = seed_frequency(order, epsilon, lambda0);
    if classify(center, epsilon, gamma, lambda0, config)?.is_unstable() {
        return Ok(Some(center));
    }
    // Scan in `a` space around the predicted center: the tongue is far
    // narrower in ω than in ε, and its center prediction degrades as q̃
    // grows.
    let qt = 2.0 * lambda0 * lambda0 * epsilon / (center * center);
    let a_center = tongue_center_a(order, qt);
    let half = tongue_half_width_a(order, qt);
    for &span in &[2.0 * half, 8.0 * half + 0.02, 0.4 * (order * order) as f64 * 0.25] {
        let m = 80;
        for i in 0..=m {
            let a = a_center - span + 2.0 * span * i as f64 / m as f64;
            if a <= 1e-9 {
                continue;
            }
            let omega = 2.0 * lambda0 / a.sqrt();
            if classify(omega, epsilon, gamma, lambda0, config)?.is_unstable() {
                return Ok(Some(omega));
            }
        }
    }
    Ok(None)
}

/// Bisects the stability boundary between an unstable frequency inside the
/// wedge and a stable one outside, to a bracket of 1e-7.
fn bisect_boundary(
    mut omega_in: f64,
    mut omega_out: f64,
    epsilon: f64,
    gamma: f64,
    lambda0: f64,
    config: &IntegratorConfig,
) -> Result<f64, FloquetError> {
    for _ in 0..64 {
        if (omega_in - omega_out).abs() <= 1e-7 {
            break;
        }
        let mid = 0.5 * (omega_in + omega_out);
        if classify(mid, epsilon, gamma, lambda0, config)?.is_unstable() {
            omega_in = mid;
        } else {
            omega_out = mid;
        }
    }
    Ok(0.5 * (omega_in + omega_out))
}

/// Walks outward from `seed` in direction `dir` (±1) until stable, then
/// bisects back; returns the boundary frequency.
fn boundary_from_seed(
    seed: f64,
    dir: f64,
    order: usize,
    epsilon: f64,
    gamma: f64,
    lambda0: f64,
    config: &IntegratorConfig,
) -> Result<f64, FloquetError> {
    let qt = 2.0 * lambda0 * lambda0 * epsilon / (seed * seed);
    let half_a = tongue_half_width_a(order, qt);
    // ω(a) = 2λ₀/√a ⇒ |dω| ≈ ω/(2a)·|da|.
    let a_here = 4.0 * lambda0 * lambda0 / (seed * seed);
    let mut step = (seed / (2.0 * a_here) * half_a).max(1e-6) * 1.5;
    let cap = 0.45 * seed; // stay away from the neighbouring wedges
    let mut probe = seed;
    loop {
        let next = seed + dir * ((probe - seed).abs() + step);
        step *= 1.7;
        if (next - seed).abs() > cap {
            // Could not leave the unstable region within the trust window;
            // report the cap itself as the (conservative) boundary.
            return Ok(seed + dir * cap);
        }
        if !classify(next, epsilon, gamma, lambda0, config)?.is_unstable() {
            return bisect_boundary(probe, next, epsilon, gamma, lambda0, config);
        }
        probe = next;
    }
}

/// Traces instability-wedge boundaries over an amplitude grid.
///
/// `order` ∈ {1, 2, 3} selects the wedge with nominal tip ω = 2λ₀/order.
/// For each ε the boundary crossings are located by outward bisection from
/// an interior unstable seed; amplitudes where no instability is found
/// (possible for γ > 0 below the lifted tip) get the empty-interval
/// convention. The tip is (2λ₀/order, 0) for γ = 0; for γ > 0 it is
/// refined by bisection in ε between the last empty and first non-empty
/// grid rows.
pub fn trace_wedge(
    order: usize,
    epsilon_grid: &[f64],
    gamma: f64,
    lambda0: f64,
    config: &IntegratorConfig,
) -> Result<WedgeBoundary, FloquetError> {
    if !(1..=3).contains(&order) {
        return Err(FloquetError::Invalid(ModelError::InvalidParameter(
            format!("wedge order must be 1, 2, or 3; got {order}"),
        )));
    }
    if epsilon_grid.is_empty() {
        return Err(FloquetError::Invalid(ModelError::InvalidParameter(
            "amplitude grid must not be empty".into(),
        )));
    }
    for w in epsilon_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(FloquetError::Invalid(ModelError::InvalidParameter(
                "amplitude grid must be strictly increasing".into(),
            )));
        }
    }
    let eps_max = *epsilon_grid.last().unwrap();
    if !(epsilon_grid[0] >= 0.0 && eps_max <= 0.8) {
        return Err(FloquetError::Invalid(ModelError::InvalidParameter(
            "amplitude grid must lie within [0, 0.8]".into(),
        )));
    }
    if !(lambda0 > 0.0) || !(gamma >= 0.0) {
        return Err(FloquetError::Invalid(ModelError::InvalidParameter(
            "need λ₀ > 0 and γ ≥ 0".into(),
        )));
    }
    config.validate()?;

    // Each amplitude row is independent; the parallel map preserves grid
    // order, so results are bit-identical to the serial loop.
    let rows: Result<Vec<(f64, f64, Option<f64>)>, FloquetError> = epsilon_grid
        .par_iter()
        .map(|&eps| match find_unstable_seed(order, eps, gamma, lambda0, config)? {
            Some(seed) => {
                let lo = boundary_from_seed(seed, -1.0, order, eps, gamma, lambda0, config)?;
                let hi = boundary_from_seed(seed, 1.0, order, eps, gamma, lambda0, config)?;
                Ok((lo, hi, Some(seed)))
            }
            None => Ok((EMPTY_LO, EMPTY_HI, None)),
        })
        .collect();
    let rows = rows?;

    let mut omega_lower = Vec::with_capacity(epsilon_grid.len());
    let mut omega_upper = Vec::with_capacity(epsilon_grid.len());
    let mut first_nonempty: Option<usize> = None;
    let mut first_seed = f64::NAN;
    for (i, (lo, hi, seed)) in rows.into_iter().enumerate() {
        omega_lower.push(lo);
        omega_upper.push(hi);
        if let Some(s) = seed {
            if first_nonempty.is_none() {
                first_nonempty = Some(i);
                first_seed = s;
            }
        }
    }

    let nominal = 2.0 * lambda0 / order as f64;
    let tip = if gamma == 0.0 {
        // Undamped wedges touch the axis exactly at the nominal frequency.
        (nominal, 0.0)
    } else {
        match first_nonempty {
            None => (nominal, f64::INFINITY),
            Some(i) => {
                // Refine ε_min between the last empty amplitude (or 0) and
                // the first unstable one.
                let mut eps_lo = if i == 0 { 0.0 } else { epsilon_grid[i - 1] };
                let mut eps_hi = epsilon_grid[i];
                let mut tip_omega = first_seed;
                for _ in 0..12 {
                    let mid = 0.5 * (eps_lo + eps_hi);
                    match find_unstable_seed(order, mid, gamma, lambda0, config)? {
                        Some(seed) => {
                            eps_hi = mid;
                            tip_omega = seed;
                        }
                        None => eps_lo = mid,
                    }
                }
                (tip_omega, eps_hi)
            }
        }
    };

    Ok(WedgeBoundary {
        order,
        epsilon_values: epsilon_grid.to_vec(),
        omega_lower,
        omega_upper,
        tip,
    })
}
