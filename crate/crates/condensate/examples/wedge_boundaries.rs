//! Precise instability-wedge boundaries from Floquet analysis: for each
//! drive amplitude ε the lower and upper boundary frequencies of the first
//! three wedges are located by bisection on the monodromy spectral radius,
//! and the principal wedge is compared against the first-order closed form
//! |ω − 2| ≤ ε/2 + ε²/32.
//!
//! Run with: cargo run --release --example wedge_boundaries

use condensate::asymptotics;
use condensate::floquet::trace_wedge;
use condensate::integrate::IntegratorConfig;

fn main() {
    let cfg = IntegratorConfig::default();
    let eps_grid: Vec<f64> = (1..=8).map(|i| 0.025 * i as f64).collect();

    for order in 1..=3 {
        let wedge = trace_wedge(order, &eps_grid, 0.0, 1.0, &cfg).unwrap();
        println!(
            "wedge n = {order}  (tip at ω = {:.4}, ε = {:.4})",
            wedge.tip.0, wedge.tip.1
        );
        println!("{:>8} {:>12} {:>12} {:>10}", "epsilon", "omega_lo", "omega_hi", "width");
        for (i, eps) in wedge.epsilon_values.iter().enumerate() {
            match wedge.interval(i) {
                Some((lo, hi)) => println!("{eps:>8.3} {lo:>12.6} {hi:>12.6} {:>10.6}", hi - lo),
                None => println!("{eps:>8.3} {:>12} {:>12} {:>10}", "-", "-", "-"),
            }
        }
        println!();
    }

    println!("principal wedge vs first-order formula (edges, γ = 0):");
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12}",
        "epsilon", "traced_lo", "formula_lo", "traced_hi", "formula_hi"
    );
    let wedge = trace_wedge(1, &eps_grid, 0.0, 1.0, &cfg).unwrap();
    for (i, &eps) in wedge.epsilon_values.iter().enumerate() {
        if let Some((lo, hi)) = wedge.interval(i) {
            let (plo, phi) = asymptotics::resonance_band(eps);
            println!("{eps:>8.3} {lo:>12.6} {plo:>12.6} {hi:>12.6} {phi:>12.6}");
        }
    }
    println!("\nThe discrepancy grows like ε² — the formula is first order; the");
    println!("traced boundaries are exact to integrator precision.");
}
