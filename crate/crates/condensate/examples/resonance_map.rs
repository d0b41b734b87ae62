//! Direct-integration classification of the nonlinear width equation over
//! the (drive frequency, drive amplitude) plane. Each cell integrates a
//! near-equilibrium orbit for many drive periods and classifies the
//! envelope: resonant growth, bounded oscillation, or (with damping) a
//! limit cycle. The resonant region is the nonlinear analog of the linear
//! Mathieu wedge — same tip, leaning to higher frequency.
//!
//! Run with: cargo run --release --example resonance_map

use condensate::model::{ModelKind, ModelParams, SingularKind};
use condensate::sweep::{resonance_map, AxisRange, ClassifyCriteria, SweepContext, Verdict};

fn print_map(ctx: &SweepContext, omega: &AxisRange, eps: &AxisRange, label: &str) {
    let map = resonance_map(ctx, omega, eps).unwrap();
    println!("{label}");
    println!("  ('R' resonant, '.' stable, 'C' limit cycle, '?' inconclusive)");
    let omegas = map.omega_values.clone();
    for (i, e) in map.epsilon_values.iter().enumerate().rev() {
        let mut row = String::new();
        for j in 0..omegas.len() {
            row.push(match map.cell(i, j).verdict {
                Verdict::Resonant => 'R',
                Verdict::Stable => '.',
                Verdict::LimitCycle => 'C',
                Verdict::Inconclusive => '?',
            });
        }
        println!("  ε = {e:>5.3} |{row}|");
    }
    println!(
        "            ω: {:.2} .. {:.2}  ({} columns)",
        omegas[0],
        omegas.last().unwrap(),
        omegas.len()
    );
    println!(
        "  counts: {} resonant, {} stable, {} limit-cycle, {} inconclusive\n",
        map.count(Verdict::Resonant),
        map.count(Verdict::Stable),
        map.count(Verdict::LimitCycle),
        map.count(Verdict::Inconclusive)
    );
}

fn main() {
    let params = ModelParams::from_interaction(9.2).unwrap();
    let criteria = ClassifyCriteria {
        tau_max: 300.0,
        ..ClassifyCriteria::default()
    };
    let omega = AxisRange::new(1.80, 2.20, 21);
    let eps = AxisRange::new(0.02, 0.20, 10);

    let undamped = SweepContext::new(ModelKind::Radial(SingularKind::Full), params, 1.0)
        .with_criteria(criteria);
    print_map(&undamped, &omega, &eps, "undamped width dynamics (P = 9.2):");

    let damped = SweepContext::new(ModelKind::Radial(SingularKind::Full), params, 1.0)
        .with_criteria(criteria)
        .with_damping(0.15);
    print_map(&damped, &omega, &eps, "same sweep with damping γ = 0.15:");

    println!("The undamped wedge opens from ω ≈ 2 and leans right (the nonlinear");
    println!("frequency rises with amplitude). Damping turns the response below");
    println!("threshold into decaying transients and, at larger drive, saturates");
    println!("the growth into finite limit cycles.");
}
