//! Measuring a resonance quantitatively: integrate the driven width
//! equation, bucket the deviation from equilibrium into one-drive-period
//! maxima, and fit a line to the log-envelope. A resonant point yields a
//! clean exponential with a growth exponent; a stable point yields a flat,
//! bounded envelope the fit rightly refuses to call growth.
//!
//! Run with: cargo run --release --example envelope_growth

use condensate::model::{
    equilibrium_width, DynamicalState, ModelKind, ModelParams, SingularKind,
};
use condensate::sweep::{envelope_growth, SweepContext};

fn report(ctx: &SweepContext, omega: f64, eps: f64, initial: &DynamicalState, label: &str) {
    let rep = envelope_growth(ctx, omega, eps, Some(initial), 150.0).unwrap();
    println!("{label}  (ω = {omega}, ε = {eps})");
    println!("  drive periods recorded: {}", rep.maxima.len());
    print!("  per-period envelope (every 6th):");
    for m in rep.maxima.iter().step_by(6) {
        print!(" {m:.4}");
    }
    println!();
    match rep.fit {
        Some(fit) => println!(
            "  log-envelope fit: slope q̂ = {:.4} ± {:.4}, R² = {:.4} over {} points",
            fit.slope, fit.std_error, fit.r_squared, fit.points
        ),
        None => println!("  log-envelope fit: not available (too few points)"),
    }
    println!();
}

fn main() {
    let params = ModelParams::from_interaction(9.2).unwrap();
    let vstar = equilibrium_width(&params, 1.0).unwrap();
    let ctx = SweepContext::new(ModelKind::Radial(SingularKind::Full), params, 1.0);
    // Start close to the equilibrium so there is room to grow before the
    // escape bound ends the resonant run.
    let seed = DynamicalState::single(vstar - 0.01, 0.0);

    report(&ctx, 2.04, 0.15, &seed, "resonant drive");
    report(&ctx, 1.70, 0.15, &seed, "detuned (stable) drive");

    println!("Note where the resonance sits: the nonlinear wedge at this");
    println!("amplitude contains ω = 2.04 but NOT ω ≈ 2.20, the small-oscillation");
    println!("frequency — growth is organized by the folded barrier dynamics");
    println!("at ω = 2λ₀, leaning right with amplitude.");
}
