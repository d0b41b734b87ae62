//! From laboratory numbers to the dimensionless model and back. The only
//! interaction parameter the width equation needs is P = √(2/π)·N·a/a₀;
//! time is measured in inverse trap frequencies (τ = νt) and lengths in
//! oscillator lengths. This example maps a typical ⁸⁷Rb setup onto P,
//! shows how the stationary width and breathing frequency respond, and
//! tabulates the P-dependence between the ideal-gas and strong-coupling
//! limits.
//!
//! Run with: cargo run --example physical_units

use condensate::model::{equilibrium_width, linearized_frequency, ModelParams};

fn main() {
    // Typical numbers: N = 50 000 atoms, a = 5.3 nm, ν = 2π·10 Hz trap for
    // Rb-87 gives a₀ ≈ 3.4 μm.
    let params = ModelParams::from_physical(50_000.0, 5.3e-9, 3.4e-6).unwrap();
    let phys = params.physical().unwrap();
    println!("N  = {}", phys.particle_count);
    println!("a  = {} m", phys.scattering_length);
    println!("a₀ = {} m", phys.oscillator_length);
    println!("P  = √(2/π)·N·a/a₀ = {:.2}", params.interaction());
    println!();

    println!(
        "{:>10} {:>12} {:>12}   note",
        "P", "v*", "omega_lin"
    );
    for &p in &[0.0, 1.0, 9.2, 50.0, 184.0, 1000.0] {
        let params = ModelParams::from_interaction(p).unwrap();
        let v = equilibrium_width(&params, 1.0).unwrap();
        let f = linearized_frequency(&params, 1.0).unwrap();
        let note = match p {
            p if p == 0.0 => "ideal gas: v* = 1, ω_lin = 2 exactly",
            p if p == 9.2 => "the benchmark condensate used throughout",
            p if p == 1000.0 => "approaching Thomas–Fermi: ω_lin → √5 ≈ 2.236",
            _ => "",
        };
        println!("{p:>10.1} {v:>12.4} {f:>12.4}   {note}");
    }

    println!("\nThe breathing frequency moves by only ~10% across four orders of");
    println!("magnitude in P — yet the parametric instability tip stays pinned");
    println!("at ω = 2 for all of them (see the wedge_tip_universality example).");
}
