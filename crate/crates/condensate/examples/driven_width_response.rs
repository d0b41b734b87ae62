//! Cross-validation of the width ODE against the full PDE: drive the trap
//! and compare the condensate's r.m.s. radius from the Gross–Pitaevskii
//! evolution with the width predicted by the variational ODE, each
//! normalized by its own stationary value. A stable drive keeps the two
//! responses locked; a resonant drive makes both grow together until the
//! cloud escapes the grid.
//!
//! Run with: cargo run --release --example driven_width_response

use condensate::gpe::{evolve, ground_state, GpeConfig, GpeError};
use condensate::integrate::{integrate_sampled, IntegratorConfig};
use condensate::model::{
    equilibrium_width, DynamicalState, ModelKind, ModelParams, SingularKind, TrapModulation,
};

fn main() {
    let params = ModelParams::from_interaction(9.2).unwrap();
    let static_trap = TrapModulation::static_trap(1.0).unwrap();
    let mut config = GpeConfig::radial(&params, static_trap).unwrap();
    config.grid_points = 1024;

    println!("preparing the interacting ground state (M = {})...", config.grid_points);
    let ground = ground_state(&config).unwrap();
    let w0 = ground.field.width();
    let vstar = equilibrium_width(&params, 1.0).unwrap();

    // A stable drive: inside neither the linear nor the nonlinear wedge.
    let (omega, eps) = (2.0, 0.03);
    let driven = TrapModulation::isotropic(1.0, eps, omega).unwrap();
    let driven_config = GpeConfig { trap: driven, ..config };

    let tau_end = 60.0;
    println!("evolving the PDE under ε = {eps}, ω = {omega} to τ = {tau_end}...");
    let evolution = match evolve(&ground.field, &driven_config, tau_end, 0.5) {
        Ok(e) => e,
        Err(GpeError::DomainEscape { time, evolution }) => {
            println!("(cloud escaped the domain at τ = {time:.2} — resonant!)");
            *evolution
        }
        Err(e) => panic!("evolution failed: {e}"),
    };

    // The matching ODE run from its own equilibrium.
    let ode = integrate_sampled(
        ModelKind::Radial(SingularKind::Full),
        &params,
        &driven_config.trap,
        &DynamicalState::single(vstar, 0.0),
        tau_end,
        &IntegratorConfig::default(),
        0.5,
    )
    .unwrap();

    println!("\n{:>8} {:>14} {:>14} {:>12}", "tau", "PDE w/w0", "ODE v/v*", "diff");
    let mut worst = 0.0_f64;
    for (rec, (t, s)) in evolution.records.iter().zip(&ode.samples) {
        let pde = rec.width / w0;
        let ode_v = s.coordinates[0] / vstar;
        worst = worst.max((pde - ode_v).abs());
        if (rec.time / 6.0).fract().abs() < 1e-9 {
            println!("{t:>8.1} {pde:>14.6} {ode_v:>14.6} {:>12.2e}", (pde - ode_v).abs());
        }
    }
    println!("\nlargest normalized mismatch over the whole run: {worst:.3e}");
    println!("The Gaussian ansatz tracks the exact mean-field response to a few");
    println!("parts in a thousand at this amplitude. Try (ω, ε) = (2.04, 0.15)");
    println!("to watch both descriptions resonate and the cloud leave the grid.");
}
