//! The basic object of the crate: the radial width equation
//! v̈ + λ²(τ)·v = 1/v³ + P/v⁴ for a condensate breathing in a harmonic
//! trap. This example finds the stationary width, measures the
//! small-oscillation (breathing) frequency, and integrates a gently kicked
//! orbit first in a static trap and then under a weak off-resonant drive.
//!
//! Run with: cargo run --release --example width_oscillations

use condensate::integrate::{integrate_sampled, IntegratorConfig};
use condensate::model::{
    equilibrium_width, linearized_frequency, DynamicalState, ModelKind, ModelParams,
    SingularKind, TrapModulation,
};

fn main() {
    let params = ModelParams::from_interaction(9.2).unwrap();
    let kind = ModelKind::Radial(SingularKind::Full);
    let cfg = IntegratorConfig::default();

    let vstar = equilibrium_width(&params, 1.0).unwrap();
    let freq = linearized_frequency(&params, 1.0).unwrap();
    println!("interaction strength      P      = {}", params.interaction());
    println!("stationary width          v*     = {vstar:.6}");
    println!("breathing frequency       ω_lin  = {freq:.6}");
    println!("(P = 0 would give exactly ω_lin = 2; the interaction raises it toward √5)");

    // A 5% kick in a static trap: clean anharmonic oscillation around v*.
    let static_trap = TrapModulation::static_trap(1.0).unwrap();
    let state0 = DynamicalState::single(1.05 * vstar, 0.0);
    let traj = integrate_sampled(kind, &params, &static_trap, &state0, 12.0, &cfg, 0.5).unwrap();
    println!("\nstatic trap, 5% kick:");
    println!("{:>8} {:>12} {:>12}", "tau", "v", "v - v*");
    for (t, s) in &traj.samples {
        println!("{t:>8.2} {:>12.6} {:>+12.6}", s.coordinates[0], s.coordinates[0] - vstar);
    }

    // The same orbit under a weak drive far from parametric resonance:
    // bounded quasiperiodic response.
    let driven = TrapModulation::isotropic(1.0, 0.05, 1.3).unwrap();
    let traj = integrate_sampled(kind, &params, &driven, &state0, 12.0, &cfg, 0.5).unwrap();
    println!("\ndriven trap (ε = 0.05, ω = 1.3, off resonance):");
    println!("{:>8} {:>12} {:>12}", "tau", "v", "v - v*");
    for (t, s) in &traj.samples {
        println!("{t:>8.2} {:>12.6} {:>+12.6}", s.coordinates[0], s.coordinates[0] - vstar);
    }
    println!("\nBoth runs stay near v*; parametric drives near ω = 2 would not.");
}
