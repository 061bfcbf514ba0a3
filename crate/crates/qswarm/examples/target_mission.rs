//! Closed-loop target reaching: a two-robot mixed swarm senses its
//! proximity to the target cell, refines a density estimate, recovers a
//! displacement operator toward the estimate, and applies it — repeating
//! until the position marginal is within the convergence margin.
//!
//! Run with `cargo run -p qswarm --example target_mission`.

use num_complex::Complex64;
use qswarm::dynamics::{ApplicationMode, RecoveryMethod};
use qswarm::mission::{run_mission, MissionConfig, SensorModel};
use qswarm::qcore::Tolerances;
use qswarm::swarm::{robot_from_amplitudes, CompositionMode, QubitRole, SwarmState};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let roles = vec![QubitRole::PositionX, QubitRole::Success];

    let scout = robot_from_amplitudes(
        "scout",
        roles.clone(),
        vec![re(inv_sqrt2), re(0.0), re(inv_sqrt2), re(0.0)],
        false,
        &tol,
    )?;
    let anchor = robot_from_amplitudes(
        "anchor",
        roles,
        vec![re(0.0), re(0.0), re(0.0), re(1.0)],
        false,
        &tol,
    )?;
    let swarm = SwarmState::new(
        vec![scout, anchor],
        Some(vec![0.5, 0.5]),
        CompositionMode::Mixed,
    )?;

    // Noiseless proximity sensing toward position bit 1, fixed seed so the
    // run is reproducible.
    let sensor = SensorModel::new(vec![true], 0.0, 0)?;
    let cfg = MissionConfig::new(swarm, sensor, 0.1, 100, 0.9)?
        .with_recovery(RecoveryMethod::Procrustes)
        .with_application(ApplicationMode::Left);

    let trace = run_mission(&cfg)?;

    println!(
        "{:>4}  {:>14}  {:>14}  {:>22}",
        "iter", "d(target)", "d(estimate)", "displacements"
    );
    for rec in &trace.records {
        let moves: Vec<String> = rec
            .displacements
            .iter()
            .map(|d| format!("{:.4}", d))
            .collect();
        println!(
            "{:>4}  {:>14.8}  {:>14.8}  {:>22}",
            rec.iteration,
            rec.distance_to_target,
            rec.distance_to_estimate,
            moves.join(", ")
        );
    }

    println!(
        "\nconverged: {} after {} iterations, final distance {:.8}",
        trace.converged, trace.iterations, trace.final_distance
    );

    Ok(())
}
