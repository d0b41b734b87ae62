//! Beyond the Gaussian ansatz: the radially symmetric Gross–Pitaevskii
//! equation solved on a grid. Imaginary-time propagation prepares the
//! interacting ground state; its chemical potential and r.m.s. radius are
//! compared with the variational prediction (a Gaussian of width v* has
//! r.m.s. radius √(3/2)·v*).
//!
//! Run with: cargo run --release --example ground_state

use condensate::gpe::{ground_state, GpeConfig};
use condensate::model::{equilibrium_width, ModelParams, TrapModulation};

fn main() {
    let params = ModelParams::from_interaction(9.2).unwrap();
    let trap = TrapModulation::static_trap(1.0).unwrap();

    let mut config = GpeConfig::radial(&params, trap).unwrap();
    config.grid_points = 1024;
    println!(
        "radial Gross–Pitaevskii ground state: g = {:.4} (P = {}), domain R = {:.2}, M = {}",
        config.coupling,
        params.interaction(),
        config.extent,
        config.grid_points
    );

    let ground = ground_state(&config).unwrap();
    let vstar = equilibrium_width(&params, 1.0).unwrap();
    let gaussian_rms = (1.5_f64).sqrt() * vstar;

    println!("converged in {} imaginary-time iterations", ground.iterations);
    println!("chemical potential  μ        = {:.6}", ground.chemical_potential);
    println!("r.m.s. radius       ⟨r²⟩^1/2 = {:.6}", ground.field.width());
    println!("variational Gaussian (v* = {vstar:.4}) would give {gaussian_rms:.6}");
    println!(
        "relative difference: {:.2}%",
        100.0 * (ground.field.width() - gaussian_rms).abs() / gaussian_rms
    );
    println!("\nThe interacting profile is slightly broader than the best Gaussian");
    println!("— the mean field pushes density outward into the trap's wings. The");
    println!("few-percent agreement is what justifies the width-ODE description.");
}
