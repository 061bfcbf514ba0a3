//! Build the two-robot toy swarm in both composition modes and inspect
//! the resulting densities: full matrix, trace, purity, per-robot
//! position reductions, and the swarm barycenter.
//!
//! Run with `cargo run -p qswarm --example swarm_density`.

use num_complex::Complex64;
use qswarm::qcore::{purity, CMatrix, Tolerances};
use qswarm::swarm::{
    barycenter_probability, position_probability, reduced_position, robot_from_amplitudes,
    swarm_density, CompositionMode, QubitRole, SwarmState,
};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn print_matrix(label: &str, m: &CMatrix) {
    println!("{label}:");
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| {
                let z = m[(r, c)];
                if z.im.abs() < 1e-12 {
                    format!("{:+.4}", z.re)
                } else {
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                }
            })
            .collect();
        println!("  [ {} ]", row.join("  "));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;

    // Robot one holds an even superposition over its position qubit with
    // the success flag clear; robot two sits at position 1 with success set.
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

    for mode in [CompositionMode::Tensor, CompositionMode::Mixed] {
        println!("=== composition: {:?} ===", mode);
        let swarm = SwarmState::new(
            vec![scout.clone(), anchor.clone()],
            None,
            mode,
        )?;
        let rho = swarm_density(&swarm)?;
        println!("dimension: {}", rho.dim());
        if rho.dim() <= 4 {
            print_matrix("swarm density", rho.matrix());
        }
        println!("trace  = {:.6}", rho.matrix().trace().re);
        println!("purity = {:.6}", purity(&rho));

        for robot in swarm.robots() {
            let local = robot.density();
            let reduced = reduced_position(&local, robot.roles())?;
            print_matrix(
                &format!("{} position marginal", robot.id()),
                reduced.matrix(),
            );
            println!(
                "{}: P(position = 1) = {:.4}",
                robot.id(),
                position_probability(robot, true)?
            );
        }
        println!(
            "swarm barycenter P(position = 1) = {:.4}",
            barycenter_probability(&swarm, true)?
        );
        println!();
    }

    Ok(())
}
