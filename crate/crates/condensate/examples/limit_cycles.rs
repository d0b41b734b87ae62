//! Above the damped resonance threshold the width does not grow forever:
//! the nonlinearity detunes the oscillation as the amplitude rises, the
//! drive falls out of resonance, and the orbit settles onto a finite
//! periodic response — a limit cycle of the stroboscopic map. This example
//! finds one, checks that two different seeds land on the same cycle, and
//! shows how its amplitude grows with the drive.
//!
//! Run with: cargo run --release --example limit_cycles

use condensate::model::{equilibrium_width, ModelKind, ModelParams, SingularKind};
use condensate::sweep::{find_limit_cycle, CycleOutcome, SweepContext};

fn main() {
    let params = ModelParams::from_interaction(9.2).unwrap();
    let vstar = equilibrium_width(&params, 1.0).unwrap();
    let ctx = SweepContext::new(ModelKind::Radial(SingularKind::Full), params, 1.0)
        .with_damping(0.15);

    println!("damped width dynamics (P = 9.2, γ = 0.15), drive ω = 1.9:");
    println!("{:>8} {:>14} {:>12} {:>10}", "epsilon", "outcome", "amplitude", "periods");
    for &eps in &[0.0, 0.04, 0.08, 0.12, 0.16] {
        match find_limit_cycle(&ctx, 1.9, eps).unwrap() {
            CycleOutcome::Converged(c) => println!(
                "{eps:>8.2} {:>14} {:>12.6} {:>10}",
                "converged", c.amplitude, c.periods
            ),
            CycleOutcome::NotConverged { last_delta, periods } => println!(
                "{eps:>8.2} {:>14} {last_delta:>12.2e} {periods:>10}",
                "not converged"
            ),
            CycleOutcome::SeedDependent { difference } => println!(
                "{eps:>8.2} {:>14} {difference:>12.2e} {:>10}",
                "seed-dependent", "-"
            ),
            CycleOutcome::Escaped { max_amplitude } => println!(
                "{eps:>8.2} {:>14} {max_amplitude:>12.4} {:>10}",
                "escaped", "-"
            ),
        }
    }

    println!("\n(equilibrium width v* = {vstar:.4}; the ε = 0 'cycle' is the");
    println!("equilibrium itself, reached after the transient decays.)");
    println!("The cycle amplitude rises smoothly once the drive clears the");
    println!("damped threshold — saturated resonance, not runaway growth.");
}
