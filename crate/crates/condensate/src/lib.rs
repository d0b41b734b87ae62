//! Numerical toolkit for parametrically driven Bose–Einstein condensate
//! width dynamics.
//!
//! A condensate held in a harmonic trap whose strength is modulated in time
//! responds through its widths. A Gaussian variational ansatz reduces the
//! mean-field dynamics to second-order ODEs for those widths — oscillators
//! with a singular repulsive core — and the modulation turns them into
//! parametrically driven systems with instability wedges in the
//! (drive frequency, drive amplitude) plane.
//!
//! The crate provides:
//!
//! - [`model`] — right-hand sides, energies and equilibria of every model:
//!   the coupled 3D width equations, the radially symmetric width equation
//!   (with alternative singular cores), the impact oscillator obtained by
//!   replacing the core with an elastic bounce at the origin, the equivalent
//!   linear Mathieu oscillator, and the trap-driven center-of-mass equation.
//! - [`integrate`] — an adaptive Dormand–Prince 5(4) integrator with dense
//!   output, a width floor that guards the singularity, an A-stable implicit
//!   fallback for stiff episodes, bounce-event detection, and stroboscopic
//!   sampling.
//! - [`floquet`] — monodromy matrices, Floquet multipliers and instability
//!   wedge boundary tracing for the linear oscillators.
//! - [`asymptotics`] — closed-form first-order resonance formulas: growth
//!   exponent, strongest-response frequency, instability band, damped
//!   exponent.
//! - [`sweep`] — direct-integration resonance classification over parameter
//!   grids, damping-threshold measurement, wedge-tip refinement, and
//!   limit-cycle detection.
//! - [`gpe`] — a radially symmetric Gross–Pitaevskii solver (Crank–Nicolson
//!   with imaginary-time ground-state preparation) and a 1D cartesian
//!   variant for the center-of-mass (Ehrenfest) cross-check.
//! - [`cli`] — configuration parsing and the subcommand implementations
//!   behind the `condensate` binary.
//! - [`verify`] — the acceptance suite shared by `condensate verify` and the
//!   integration tests.
//!
//! Units are dimensionless throughout: lengths in units of the oscillator
//! length, time as τ = νt with ν the reference trap frequency.

pub mod asymptotics;
pub mod cli;
pub mod floquet;
pub mod gpe;
pub mod integrate;
pub mod model;
pub mod sweep;
pub mod verify;
