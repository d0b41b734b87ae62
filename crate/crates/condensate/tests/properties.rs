//! Structural invariants that must hold across randomly drawn parameters,
//! not just at the benchmark points: exact identities (Liouville's theorem,
//! the damped-to-undamped Floquet transformation, the impact/Mathieu fold),
//! conservation laws, and agreement between independent code paths
//! (closed-form asymptotics vs traced wedges, map cells vs pointwise
//! classification). Draws are seeded so every run checks the same cases.

use condensate::asymptotics;
use condensate::floquet::{monodromy, trace_wedge};
use condensate::integrate::{
    integrate, integrate_sampled, integrate_with_bounce, IntegratorConfig,
};
use condensate::model::{
    energy, equilibrium_width_of, linearized_frequency, rhs, Channel, DynamicalState,
    ModelKind, ModelParams, SingularKind, TrapModulation,
};
use condensate::sweep::{
    classify_point, resonance_map, wedge_tip, AxisRange, ClassifyCriteria, SweepContext,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerances tight enough that every assertion margin below is dominated
/// by the property under test, not by integrator error.
fn tight() -> IntegratorConfig {
    IntegratorConfig::default().with_tolerances(1e-10, 1e-12)
}

const WIDTH_KINDS: [ModelKind; 3] = [
    ModelKind::Radial(SingularKind::Full),
    ModelKind::Radial(SingularKind::InverseCubic),
    ModelKind::Radial(SingularKind::InverseQuartic),
];

// ---------------------------------------------------------------------------
// Equilibria and linearization
// ---------------------------------------------------------------------------

/// The reported equilibrium must actually zero the acceleration, and the
/// reported small-oscillation frequency must match the curvature of the
/// force field measured by finite differences on the public RHS — the
/// formula and the dynamics have to tell the same story.
#[test]
fn equilibria_balance_forces_and_set_the_linearized_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..6 {
        let p: f64 = rng.gen_range(0.0..200.0);
        let lambda0: f64 = rng.gen_range(0.5..2.0);
        let params = ModelParams::from_interaction(p).unwrap();
        let trap = TrapModulation::static_trap(lambda0).unwrap();

        for kind in WIDTH_KINDS {
            let v = equilibrium_width_of(kind, &params, lambda0).unwrap();
            assert!(v > 0.0);
            let a = rhs(kind, &params, &trap, &DynamicalState::single(v, 0.0)).unwrap()[0];
            let scale = (lambda0 * lambda0 * v).max(1.0);
            assert!(
                a.abs() <= 1e-8 * scale,
                "{kind:?} at P = {p:.3}, λ₀ = {lambda0:.3}: residual force {a:e} at v* = {v}"
            );
        }

        // Curvature check for the full-core radial model.
        let kind = ModelKind::Radial(SingularKind::Full);
        let v = equilibrium_width_of(kind, &params, lambda0).unwrap();
        let h = 1e-5 * v;
        let a_plus = rhs(kind, &params, &trap, &DynamicalState::single(v + h, 0.0)).unwrap()[0];
        let a_minus = rhs(kind, &params, &trap, &DynamicalState::single(v - h, 0.0)).unwrap()[0];
        let curvature = -(a_plus - a_minus) / (2.0 * h);
        let freq = linearized_frequency(&params, lambda0).unwrap();
        assert!(
            (freq * freq - curvature).abs() <= 1e-6 * curvature,
            "P = {p:.3}, λ₀ = {lambda0:.3}: ω_lin² = {} vs measured curvature {curvature}",
            freq * freq
        );
    }

    // Without interaction the equilibrium and frequency are closed-form.
    let free = ModelParams::from_interaction(0.0).unwrap();
    for &lambda0 in &[0.5, 1.0, 1.7] {
        let v = equilibrium_width_of(ModelKind::Radial(SingularKind::Full), &free, lambda0)
            .unwrap();
        assert_eq!(v, lambda0.powf(-0.5));
        let freq = linearized_frequency(&free, lambda0).unwrap();
        assert!(
            (freq - 2.0 * lambda0).abs() <= 1e-14 * lambda0,
            "λ₀ = {lambda0}: breathing frequency {freq} must be 2λ₀"
        );
    }
}

// ---------------------------------------------------------------------------
// Conservation
// ---------------------------------------------------------------------------

/// With the drive and damping off, the first integral reported by
/// `model::energy` is conserved along every trajectory — including across
/// the impact oscillator's bounces, which only flip the velocity sign.
#[test]
fn energy_is_conserved_on_random_undriven_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let cfg = tight();

    for kind in WIDTH_KINDS {
        for _ in 0..2 {
            let p: f64 = rng.gen_range(0.0..50.0);
            let params = ModelParams::from_interaction(p).unwrap();
            let trap = TrapModulation::static_trap(1.0).unwrap();
            let state0 = DynamicalState::single(
                rng.gen_range(0.5..2.5),
                rng.gen_range(-0.8..0.8),
            );
            let e0 = energy(kind, &params, &trap, &state0, 0.0).unwrap();
            let traj = integrate(kind, &params, &trap, &state0, 50.0, &cfg).unwrap();
            let end = traj.final_state();
            let e1 = energy(kind, &params, &trap, end, end.time).unwrap();
            let drift = (e1 - e0).abs() / e0.abs().max(1.0);
            assert!(
                drift < 1e-7,
                "{kind:?} at P = {p:.3}: relative energy drift {drift:e} over τ = 50"
            );
        }
    }

    // Anisotropic 3D orbit.
    let p: f64 = rng.gen_range(0.0..50.0);
    let params = ModelParams::from_interaction(p).unwrap();
    let trap = TrapModulation::m0(0.9, 1.4, 0.0, 1.0).unwrap();
    let state0 = DynamicalState::triple(
        [
            rng.gen_range(0.7..2.0),
            rng.gen_range(0.7..2.0),
            rng.gen_range(0.7..2.0),
        ],
        [
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ],
    );
    let e0 = energy(ModelKind::Variational3D, &params, &trap, &state0, 0.0).unwrap();
    let traj = integrate(ModelKind::Variational3D, &params, &trap, &state0, 50.0, &cfg).unwrap();
    let end = traj.final_state();
    let e1 = energy(ModelKind::Variational3D, &params, &trap, end, end.time).unwrap();
    let drift = (e1 - e0).abs() / e0.abs().max(1.0);
    assert!(drift < 1e-7, "3D: relative energy drift {drift:e} over τ = 50");

    // Impact oscillator: check at every sample, bounces included.
    let params = ModelParams::from_interaction(0.0).unwrap();
    let trap = TrapModulation::static_trap(1.0).unwrap();
    let state0 = DynamicalState::single(1.3, -0.9);
    let kind = ModelKind::ImpactOscillator;
    let e0 = energy(kind, &params, &trap, &state0, 0.0).unwrap();
    let traj = integrate_with_bounce(&params, &trap, &state0, 40.0, &cfg).unwrap();
    assert!(
        !traj.event_times.is_empty(),
        "a bound impact orbit must actually hit the wall"
    );
    for (t, s) in &traj.samples {
        let e = energy(kind, &params, &trap, s, *t).unwrap();
        assert!(
            (e - e0).abs() / e0 < 1e-7,
            "impact oscillator energy {e} departs from {e0} at τ = {t}"
        );
    }
}

// ---------------------------------------------------------------------------
// Exact model equivalences
// ---------------------------------------------------------------------------

/// The center-of-mass equation is the Mathieu equation — not approximately,
/// but identically (the mean position ignores the interaction entirely).
/// The two kinds must produce bit-for-bit equal trajectories.
#[test]
fn center_of_mass_motion_is_exactly_mathieu() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let cfg = IntegratorConfig::default();
    let params = ModelParams::from_interaction(9.2).unwrap();
    for _ in 0..3 {
        let omega: f64 = rng.gen_range(0.5..3.0);
        let eps: f64 = rng.gen_range(0.0..0.5);
        let gamma: f64 = rng.gen_range(0.0..0.3);
        let trap = TrapModulation::isotropic(1.0, eps, omega)
            .unwrap()
            .with_damping(gamma)
            .unwrap();
        let state0 = DynamicalState::single(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));

        let com = integrate(ModelKind::CenterOfMass, &params, &trap, &state0, 25.0, &cfg)
            .unwrap();
        let mat = integrate(ModelKind::Mathieu, &params, &trap, &state0, 25.0, &cfg).unwrap();
        assert_eq!(com.samples.len(), mat.samples.len());
        for ((t1, s1), (t2, s2)) in com.samples.iter().zip(&mat.samples) {
            assert!(
                t1 == t2 && s1.coordinates == s2.coordinates && s1.velocities == s2.velocities,
                "trajectories diverge at τ = {t1} for ω = {omega}, ε = {eps}, γ = {gamma}"
            );
        }
    }
}

/// The impact oscillator is the fold v = |u| of the linear solution: away
/// from the bounce instants the two trajectories agree to integrator
/// precision, whatever the drive and initial condition.
#[test]
fn the_impact_oscillator_folds_the_mathieu_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let cfg = tight();
    let params = ModelParams::from_interaction(0.0).unwrap();
    let interval = 0.02;
    for _ in 0..2 {
        let omega: f64 = rng.gen_range(0.6..3.0);
        let eps: f64 = rng.gen_range(0.02..0.3);
        let v0: f64 = rng.gen_range(0.3..2.0);
        let vdot0: f64 = rng.gen_range(-1.0..1.0);
        let trap = TrapModulation::isotropic(1.0, eps, omega).unwrap();
        let state0 = DynamicalState::single(v0, vdot0);

        let folded = integrate_sampled(
            ModelKind::ImpactOscillator,
            &params,
            &trap,
            &state0,
            20.0,
            &cfg,
            interval,
        )
        .unwrap();
        let linear = integrate_sampled(
            ModelKind::Mathieu,
            &params,
            &trap,
            &state0,
            20.0,
            &cfg,
            interval,
        )
        .unwrap();
        assert_eq!(folded.samples.len(), linear.samples.len());

        let mut compared = 0usize;
        for ((tv, sv), (tu, su)) in folded.samples.iter().zip(&linear.samples) {
            assert!((tv - tu).abs() < 1e-12);
            // The fold is non-smooth exactly at the events; skip a
            // two-sample collar around each.
            if folded
                .event_times
                .iter()
                .any(|tc| (tv - tc).abs() < 2.0 * interval)
            {
                continue;
            }
            let diff = (sv.coordinates[0] - su.coordinates[0].abs()).abs();
            assert!(
                diff < 1e-6,
                "fold mismatch {diff:e} at τ = {tv} for ω = {omega}, ε = {eps}"
            );
            compared += 1;
        }
        assert!(compared > 500, "only {compared} samples compared");
    }
}

/// Bookkeeping of the bounce integrator: uniform samples sit exactly on the
/// requested grid and never go negative; raw-step event samples carry
/// coordinate exactly zero with an outgoing velocity; bounce instants are
/// strictly ordered.
#[test]
fn bounce_sampling_respects_the_grid_and_the_wall() {
    let cfg = tight();
    let params = ModelParams::from_interaction(0.0).unwrap();
    let trap = TrapModulation::isotropic(1.0, 0.15, 2.0).unwrap();
    let state0 = DynamicalState::single(0.8, -0.6);
    let dt = 0.05;

    let uniform = integrate_sampled(
        ModelKind::ImpactOscillator,
        &params,
        &trap,
        &state0,
        30.0,
        &cfg,
        dt,
    )
    .unwrap();
    assert!(uniform.dense);
    assert!(!uniform.event_times.is_empty());
    for w in uniform.event_times.windows(2) {
        assert!(w[1] > w[0], "bounce instants out of order: {w:?}");
    }
    for (k, (t, s)) in uniform.samples.iter().enumerate().skip(1) {
        let expected = state0.time + k as f64 * dt;
        assert!(
            (t - expected).abs() < 1e-9,
            "sample {k} at τ = {t}, expected the grid point {expected}"
        );
        assert!(
            s.coordinates[0] >= -1e-9,
            "folded width {} went negative at τ = {t}",
            s.coordinates[0]
        );
    }

    let raw = integrate_with_bounce(&params, &trap, &state0, 30.0, &cfg).unwrap();
    assert!(!raw.dense);
    let mut events_seen = 0usize;
    for (t, s) in &raw.samples {
        if raw.event_times.iter().any(|tc| tc == t) {
            events_seen += 1;
            assert_eq!(s.coordinates[0], 0.0, "event sample off the wall at τ = {t}");
            assert!(
                s.velocities[0] >= 0.0,
                "post-bounce velocity {} not outgoing at τ = {t}",
                s.velocities[0]
            );
        }
    }
    assert_eq!(events_seen, raw.event_times.len());
}

// ---------------------------------------------------------------------------
// Floquet identities
// ---------------------------------------------------------------------------

/// Liouville's theorem: the monodromy determinant equals e^{−γT} no matter
/// the drive, and the multiplier product must agree with it.
#[test]
fn monodromy_determinants_obey_liouville() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let cfg = IntegratorConfig::default();
    for draw in 0..4 {
        let omega: f64 = rng.gen_range(0.8..3.0);
        let eps: f64 = rng.gen_range(0.0..0.4);
        let gamma: f64 = if draw == 0 { 0.0 } else { rng.gen_range(0.02..0.4) };
        let trap = TrapModulation::isotropic(1.0, eps, omega)
            .unwrap()
            .with_damping(gamma)
            .unwrap();
        let result = monodromy(&trap, Channel::X, &cfg).unwrap();

        let period = std::f64::consts::TAU / omega;
        let det = result.determinant();
        let expected = (-gamma * period).exp();
        assert!(
            (det - expected).abs() <= 1e-9 * expected.max(1.0),
            "det = {det} vs e^(−γT) = {expected} at ω = {omega}, ε = {eps}, γ = {gamma}"
        );

        let product = result.multipliers[0] * result.multipliers[1];
        assert!(
            (product.re - det).abs() <= 1e-9 * det.abs().max(1.0) && product.im.abs() <= 1e-9,
            "multiplier product {product} disagrees with det {det}"
        );
    }
}

/// The substitution u = e^{−γτ/2}w turns the damped oscillator into an
/// undamped one with a renormalized static strength λ₀′² = λ₀² − γ²/4 and
/// amplitude ε′ = ελ₀²/λ₀′². The growth exponents must therefore satisfy
/// q(γ) = q′(0) − γ/2 exactly — damping is a rigid downward shift.
#[test]
fn damping_shifts_the_growth_exponent_by_half_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let cfg = IntegratorConfig::default();
    for _ in 0..3 {
        let omega: f64 = rng.gen_range(1.7..2.3);
        let eps: f64 = rng.gen_range(0.05..0.3);
        let gamma: f64 = rng.gen_range(0.05..0.3);

        let damped = TrapModulation::isotropic(1.0, eps, omega)
            .unwrap()
            .with_damping(gamma)
            .unwrap();
        let q_damped = monodromy(&damped, Channel::X, &cfg).unwrap().growth_exponent;

        let lambda_shifted = (1.0 - gamma * gamma / 4.0).sqrt();
        let eps_shifted = eps / (lambda_shifted * lambda_shifted);
        let undamped = TrapModulation::isotropic(lambda_shifted, eps_shifted, omega).unwrap();
        let q_shifted = monodromy(&undamped, Channel::X, &cfg).unwrap().growth_exponent;

        let diff = (q_damped - (q_shifted - gamma / 2.0)).abs();
        assert!(
            diff <= 5e-9,
            "shift identity off by {diff:e} at ω = {omega}, ε = {eps}, γ = {gamma}"
        );
    }
}

/// At small amplitude the traced principal-wedge edges must approach the
/// closed-form band |ω − 2| ≤ ε/2 + ε²/32; the discrepancy is second order.
#[test]
fn traced_wedge_edges_approach_the_first_order_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let cfg = IntegratorConfig::default();
    for _ in 0..2 {
        let eps: f64 = rng.gen_range(0.02..0.05);
        let wedge = trace_wedge(1, &[eps], 0.0, 1.0, &cfg).unwrap();
        let (lo, hi) = wedge
            .interval(0)
            .expect("the undamped principal wedge is open at every ε > 0");
        let (lo_pred, hi_pred) = asymptotics::resonance_band(eps);
        assert!(
            (lo - lo_pred).abs() <= 3e-3 && (hi - hi_pred).abs() <= 3e-3,
            "ε = {eps}: traced ({lo}, {hi}) vs first-order ({lo_pred}, {hi_pred})"
        );
    }
}

// ---------------------------------------------------------------------------
// Nonlinear classification
// ---------------------------------------------------------------------------

/// The barrier pins the nonlinear wedge tip at twice the trap frequency
/// regardless of interaction strength — the defining universality of the
/// fold. One seeded draw of P checks a value no benchmark uses.
#[test]
fn the_wedge_tip_ignores_the_interaction_strength() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let p: f64 = rng.gen_range(5.0..120.0);
    let params = ModelParams::from_interaction(p).unwrap();
    let ctx = SweepContext::new(ModelKind::Radial(SingularKind::Full), params, 1.0);
    let tip = wedge_tip(&ctx, 0.10, (1.92, 2.08), 17, 25.0)
        .unwrap()
        .expect("an ε = 0.10 drive must destabilize some scanned frequency");
    assert!(
        (tip.omega - 2.0).abs() <= 0.02,
        "P = {p:.3}: tip at ω = {} instead of 2",
        tip.omega
    );
}

/// Classification is a pure function of its inputs, and the parallel map
/// assembles exactly the pointwise verdicts in row-major (ε, ω) order —
/// no cell swapping, no RNG leakage, no worker-count dependence.
#[test]
fn map_cells_match_pointwise_classification_deterministically() {
    let params = ModelParams::from_interaction(9.2).unwrap();
    let criteria = ClassifyCriteria {
        tau_max: 150.0,
        ..ClassifyCriteria::default()
    };
    let ctx = SweepContext::new(ModelKind::Radial(SingularKind::Full), params, 1.0)
        .with_criteria(criteria);

    let once = classify_point(&ctx, 2.04, 0.15).unwrap();
    let again = classify_point(&ctx, 2.04, 0.15).unwrap();
    assert_eq!(once, again, "repeated classification changed its answer");

    let omega_axis = AxisRange::new(1.9, 2.1, 2);
    let epsilon_axis = AxisRange::new(0.05, 0.15, 2);
    let map = resonance_map(&ctx, &omega_axis, &epsilon_axis).unwrap();
    for (i, &eps) in epsilon_axis.values().iter().enumerate() {
        for (j, &omega) in omega_axis.values().iter().enumerate() {
            let direct = classify_point(&ctx, omega, eps).unwrap();
            assert_eq!(
                map.cell(i, j),
                &direct,
                "map cell ({i}, {j}) disagrees with direct classification at (ω = {omega}, ε = {eps})"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Pure-function properties (proptest)
// ---------------------------------------------------------------------------

mod pure {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Inclusive linear grids: exact endpoints, exact length, strictly
        /// increasing interior.
        #[test]
        fn axis_ranges_hit_their_endpoints(
            start in -1.0e3..1.0e3f64,
            span in 1.0e-6..1.0e3f64,
            steps in 2usize..64,
        ) {
            let axis = AxisRange::new(start, start + span, steps);
            prop_assert!(axis.validate("x").is_ok());
            let v = axis.values();
            prop_assert_eq!(v.len(), steps);
            prop_assert_eq!(v[0], start);
            prop_assert_eq!(*v.last().unwrap(), start + span);
            for w in v.windows(2) {
                prop_assert!(w[1] > w[0]);
            }
        }

        /// Arbitrary floats — NaN and infinities included — must come back
        /// as clean errors from every constructor, never as panics.
        #[test]
        fn malformed_parameters_error_instead_of_panicking(
            lambda0 in proptest::num::f64::ANY,
            epsilon in proptest::num::f64::ANY,
            omega in proptest::num::f64::ANY,
            gamma in proptest::num::f64::ANY,
        ) {
            if let Ok(trap) = TrapModulation::isotropic(lambda0, epsilon, omega) {
                let _ = trap.with_damping(gamma);
            }
            let _ = TrapModulation::m0(lambda0, lambda0, epsilon, omega);
            let _ = TrapModulation::m2(lambda0, lambda0, epsilon, omega);
            let _ = ModelParams::from_interaction(gamma);
            let _ = TrapModulation::static_trap(lambda0);
        }

        /// Accepted interaction strengths always yield positive equilibria
        /// that balance the trap against the core, for every singular kind.
        #[test]
        fn equilibria_exist_wherever_parameters_are_accepted(
            p in 0.0..1.0e6f64,
            lambda0 in 0.1..10.0f64,
        ) {
            let params = ModelParams::from_interaction(p).unwrap();
            let trap = TrapModulation::static_trap(lambda0).unwrap();
            for kind in super::WIDTH_KINDS {
                let v = equilibrium_width_of(kind, &params, lambda0).unwrap();
                prop_assert!(v > 0.0 && v.is_finite());
                let a = rhs(kind, &params, &trap, &DynamicalState::single(v, 0.0)).unwrap()[0];
                let scale = (lambda0 * lambda0 * v).max(1.0);
                prop_assert!(
                    a.abs() <= 1e-8 * scale,
                    "{:?}: residual {} at P = {}, λ₀ = {}", kind, a, p, lambda0
                );
            }
        }
    }
}
