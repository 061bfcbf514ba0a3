//! Sample the position-probability surface of a two-axis swarm — one
//! robot in an entangled diagonal state, one parked at the origin — and
//! render the aggregate series as an ASCII heat map plus the first rows
//! of the CSV export.
//!
//! Run with `cargo run -p qswarm --example amplitude_surface`.

use num_complex::Complex64;
use qswarm::qcore::Tolerances;
use qswarm::surface::{surface_grid, SWARM_SERIES_ID};
use qswarm::swarm::{robot_from_amplitudes, CompositionMode, QubitRole, SwarmState};

const SHADES: &[u8] = b" .:-=+*#%@";

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let roles = vec![QubitRole::PositionX, QubitRole::PositionY];

    // Diagonal entanglement: equal weight on (0,0) and (1,1).
    let diagonal = robot_from_amplitudes(
        "diagonal",
        roles.clone(),
        vec![re(inv_sqrt2), re(0.0), re(0.0), re(inv_sqrt2)],
        false,
        &tol,
    )?;
    let origin = robot_from_amplitudes(
        "origin",
        roles,
        vec![re(1.0), re(0.0), re(0.0), re(0.0)],
        false,
        &tol,
    )?;
    let swarm = SwarmState::new(
        vec![diagonal, origin],
        None,
        CompositionMode::Mixed,
    )?;

    let resolution = 21;
    let grid = surface_grid(&swarm, resolution)?;
    let ys = grid.ys.as_ref().expect("two position axes");
    let aggregate = grid
        .series
        .iter()
        .find(|s| s.robot_id == SWARM_SERIES_ID)
        .expect("aggregate series");

    let max = aggregate.values.iter().cloned().fold(0.0_f64, f64::max);
    println!("aggregate amplitude surface ({}x{}), max = {:.4}\n", resolution, resolution, max);
    // y grows upward, x to the right; values are stored x-major.
    for yi in (0..ys.len()).rev() {
        let row: String = (0..grid.xs.len())
            .map(|xi| {
                let v = aggregate.values[xi * ys.len() + yi];
                let idx = ((v / max) * (SHADES.len() - 1) as f64).round() as usize;
                SHADES[idx.min(SHADES.len() - 1)] as char
            })
            .collect();
        println!("  {}", row);
    }

    println!("\nfirst CSV rows:");
    for line in grid.to_csv().lines().take(8) {
        println!("  {}", line);
    }

    Ok(())
}
