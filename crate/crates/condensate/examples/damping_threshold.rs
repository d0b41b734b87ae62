//! How much drive does it take to destabilize the condensate? Without
//! damping, any amplitude works if the frequency is tuned well enough
//! (the wedge touches ε = 0). With damping the wedge tip lifts off the
//! axis: growth must outrun the decay rate γ/2 at the linear level — and
//! the measured nonlinear threshold tracks the linear tip lift ≈ 2γ.
//!
//! Run with: cargo run --release --example damping_threshold

use condensate::model::{ModelKind, ModelParams, SingularKind};
use condensate::sweep::{threshold_scan, SweepContext};

fn main() {
    let params = ModelParams::from_interaction(9.2).unwrap();
    let grid: Vec<f64> = (1..=20).map(|i| 0.02 * i as f64).collect();

    for &gamma in &[0.0, 0.05, 0.15] {
        let ctx = SweepContext::new(ModelKind::Radial(SingularKind::Full), params, 1.0)
            .with_damping(gamma);
        match threshold_scan(&ctx, &grid).unwrap() {
            Some(t) => println!(
                "γ = {gamma:>4.2}: smallest resonant amplitude ε_min = {:.4} (detected at ω = {:.3})",
                t.epsilon, t.omega
            ),
            None => println!("γ = {gamma:>4.2}: no amplitude on the grid destabilizes the width"),
        }
    }

    println!("\nFor the linear (Mathieu) problem the tip lift is ε_tip ≈ 2γ near");
    println!("ω = 2; the nonlinear threshold sits close to that, slightly above,");
    println!("because the detuned nonlinear orbit also has to climb the barrier.");
    println!("The undamped threshold is just the smallest grid amplitude whose");
    println!("wedge overlaps the scanned frequency window.");
}
