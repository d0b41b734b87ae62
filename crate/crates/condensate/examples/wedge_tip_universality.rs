//! Where does the nonlinear instability wedge touch down? The
//! small-oscillation frequency depends on the interaction strength
//! (ω_lin ≈ 2.20 at P = 9.2, approaching √5 ≈ 2.24 as P → ∞), so naive
//! linearization about the equilibrium predicts the strongest response
//! near drive ω ≈ ω_lin. It does not happen: resonant orbits spend their
//! time far from equilibrium, slamming into the repulsive core, where the
//! dynamics are the folded linear oscillator — whose resonance sits at
//! exactly 2λ₀. The tip location is therefore universal: independent of P
//! and of the detailed shape of the core.
//!
//! Run with: cargo run --release --example wedge_tip_universality

use condensate::model::{linearized_frequency, ModelKind, ModelParams, SingularKind};
use condensate::sweep::{wedge_tip, SweepContext};

fn main() {
    println!("wedge-tip scan at ε = 0.10 over ω ∈ [1.92, 2.08] (λ₀ = 1):\n");
    println!(
        "{:>22} {:>10} {:>10} {:>12}",
        "model", "P", "omega_lin", "tip omega"
    );

    let cases: [(&str, SingularKind, f64); 5] = [
        ("full core", SingularKind::Full, 9.2),
        ("full core", SingularKind::Full, 50.0),
        ("full core", SingularKind::Full, 184.0),
        ("1/v3 core", SingularKind::InverseCubic, 9.2),
        ("1/v4 core", SingularKind::InverseQuartic, 9.2),
    ];
    for (label, core, p) in cases {
        let params = ModelParams::from_interaction(p).unwrap();
        let freq = linearized_frequency(&params, 1.0).unwrap();
        let ctx = SweepContext::new(ModelKind::Radial(core), params, 1.0);
        let tip = wedge_tip(&ctx, 0.10, (1.92, 2.08), 17, 25.0)
            .unwrap()
            .expect("ε = 0.10 opens the wedge for every case here");
        println!("{label:>22} {p:>10.1} {freq:>10.4} {tip:>12.4}", tip = tip.omega);
    }

    println!("\nEvery tip sits at ω = 2.00 even though the small-oscillation");
    println!("frequencies range up to 2.24 — barrier-dominated universality.");
    println!("(The linearized frequency only governs truly infinitesimal");
    println!("oscillations, which no finite drive amplitude probes.)");
}
