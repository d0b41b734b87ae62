//! An exact corner of the problem: the center of mass of a condensate in a
//! harmonic trap obeys the bare (linear) trap equation no matter how strong
//! the interaction — interactions are internal forces, and a harmonic
//! potential's gradient is linear in position. This example displaces a 1D
//! interacting ground state, evolves the PDE under a driven trap, and
//! compares ⟨x⟩(τ) against the center-of-mass ODE: the two must agree to
//! discretization error.
//!
//! Run with: cargo run --release --example center_of_mass_check

use condensate::gpe::{center_of_mass_check, GpeConfig};
use condensate::model::TrapModulation;

fn main() {
    // Stable drive: (ω, ε) = (2.5, 0.1) lies outside every Mathieu wedge.
    let trap = TrapModulation::isotropic(1.0, 0.1, 2.5).unwrap();
    let config = GpeConfig::cartesian(20.0, trap);

    println!("1D condensate, coupling g = {}, displaced by ~0.5:", config.coupling);
    let check = center_of_mass_check(&config, 0.5, 40.0).unwrap();

    println!("exact displacement applied: {:.6}", check.displacement);
    println!("{:>8} {:>14} {:>14}", "tau", "PDE <x>", "ODE x");
    let n = check.times.len();
    for k in (0..n).step_by((n / 10).max(1)) {
        println!(
            "{:>8.2} {:>14.8} {:>14.8}",
            check.times[k], check.pde_mean[k], check.ode_reference[k]
        );
    }
    println!(
        "\nsup |PDE - ODE| over τ ≤ 40:  {:.2e}{}",
        check.max_deviation,
        if check.escaped { "  (run ended early: escape)" } else { "" }
    );
    println!("\nThe deviation is pure discretization error — refine the grid and");
    println!("it shrinks. Drive at (ω, ε) = (2.0, 0.15) instead and the center of");
    println!("mass resonates exactly like the Mathieu oscillator says it must,");
    println!("interactions or not: sloshing and breathing decouple exactly.");
}
