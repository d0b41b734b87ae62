//! The impact oscillator: replace the singular core of the width equation
//! with a hard wall at v = 0 and an elastic bounce. Because the equation
//! between bounces is the bare linear (Mathieu) oscillator, the bouncing
//! solution is exactly the fold v(τ) = |u(τ)| of the linear one — the
//! barrier only reflects, it never stores energy.
//!
//! Run with: cargo run --release --example bounce_dynamics

use condensate::integrate::{integrate_sampled, integrate_with_bounce, IntegratorConfig};
use condensate::model::{energy, DynamicalState, ModelKind, ModelParams, TrapModulation};

fn main() {
    let params = ModelParams::from_interaction(0.0).unwrap();
    let cfg = IntegratorConfig::default().with_tolerances(1e-10, 1e-12);

    // Static trap first: bounce instants and energy conservation.
    let trap = TrapModulation::static_trap(1.0).unwrap();
    let state0 = DynamicalState::single(1.2, -0.8);
    let traj = integrate_with_bounce(&params, &trap, &state0, 25.0, &cfg).unwrap();
    let e0 = energy(ModelKind::ImpactOscillator, &params, &trap, &state0, 0.0).unwrap();
    println!("static trap, start (v, v̇) = (1.2, −0.8):");
    println!("  bounces in τ ≤ 25: {}", traj.event_times.len());
    print!("  first bounce instants:");
    for t in traj.event_times.iter().take(4) {
        print!(" {t:.4}");
    }
    let end = traj.final_state();
    let e1 = energy(ModelKind::ImpactOscillator, &params, &trap, end, end.time).unwrap();
    println!("\n  energy drift across all bounces: {:.2e}", (e1 - e0).abs() / e0);

    // Driven trap: the fold identity v = |u| holds sample for sample.
    let driven = TrapModulation::isotropic(1.0, 0.2, 2.0).unwrap();
    let folded = integrate_sampled(
        ModelKind::ImpactOscillator,
        &params,
        &driven,
        &state0,
        30.0,
        &cfg,
        0.01,
    )
    .unwrap();
    let linear = integrate_sampled(
        ModelKind::Mathieu,
        &params,
        &driven,
        &state0,
        30.0,
        &cfg,
        0.01,
    )
    .unwrap();

    let mut worst = 0.0_f64;
    let mut compared = 0usize;
    for ((tv, sv), (_, su)) in folded.samples.iter().zip(&linear.samples) {
        // The fold is non-smooth at the bounce instants themselves; compare
        // away from a small collar around each.
        if folded.event_times.iter().any(|tc| (tv - tc).abs() < 0.02) {
            continue;
        }
        worst = worst.max((sv.coordinates[0] - su.coordinates[0].abs()).abs());
        compared += 1;
    }
    println!("\ndriven trap (ε = 0.2, ω = 2), fold check v ≟ |u|:");
    println!("  bounces: {}", folded.event_times.len());
    println!("  samples compared: {compared}");
    println!("  worst |v - |u||:  {worst:.2e}");
    println!("\nOn resonance the linear solution grows without bound, and the");
    println!("bouncing width inherits that growth through the fold — this is the");
    println!("mechanism that keeps the nonlinear wedge tip pinned at ω = 2λ₀.");
}
