//! Amplitude-surface export: per-robot position-probability grids over the
//! unit interval (one axis per position role, at most two), plus a
//! swarm-aggregate series, rendered as CSV for external plotting.
//!
//! Only the basis endpoints carry physical meaning — for one position qubit
//! these are the probabilities at x = 0 and x = 1 — and intermediate samples
//! interpolate linearly (bilinearly for two axes). The interpolation is
//! presentation-only and the CSV header says so.

use crate::qcore::DensityMatrix;
use crate::swarm::{position_qubits, reduced_position, QubitRole, SwarmState};
use crate::{Error, Result};
use std::fmt::Write as _;

/// Identifier of the aggregate series (weighted mixture of robot marginals).
pub const SWARM_SERIES_ID: &str = "swarm";

/// One robot's (or the aggregate's) sampled surface, flattened x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSeries {
    pub robot_id: String,
    /// `xs.len()` values for one axis, `xs.len() * ys.len()` (x-major) for two.
    pub values: Vec<f64>,
}

/// Sampled probability surfaces for every robot plus the swarm aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub xs: Vec<f64>,
    /// Present exactly when the robots carry a second position axis.
    pub ys: Option<Vec<f64>>,
    pub series: Vec<SurfaceSeries>,
}

fn linspace(resolution: usize) -> Vec<f64> {
    let step = 1.0 / (resolution - 1) as f64;
    (0..resolution).map(|i| i as f64 * step).collect()
}

/// Basis-endpoint probabilities for one robot: the diagonal of its reduced
/// position density, reordered so the PositionX bit is most significant.
fn corner_probabilities(
    rho: &DensityMatrix,
    roles: &[QubitRole],
    axes: &[QubitRole],
) -> Result<Vec<f64>> {
    let reduced = reduced_position(rho, roles)?;
    let kept: Vec<QubitRole> = position_qubits(roles).iter().map(|&q| roles[q]).collect();
    let n = kept.len();
    let mut corners = vec![0.0; 1 << n];
    for (idx, p) in corners.iter_mut().enumerate() {
        // idx packs axis bits in `axes` order, x most significant.
        let mut reduced_idx = 0usize;
        for (slot, role) in kept.iter().enumerate() {
            let axis = axes.iter().position(|a| a == role).expect("axis role");
            let bit = (idx >> (n - 1 - axis)) & 1;
            reduced_idx |= bit << (n - 1 - slot);
        }
        *p = reduced.matrix()[(reduced_idx, reduced_idx)].re.max(0.0);
    }
    Ok(corners)
}

fn sample(corners: &[f64], x: f64, y: Option<f64>) -> f64 {
    match y {
        None => (1.0 - x) * corners[0] + x * corners[1],
        Some(y) => {
            (1.0 - x) * (1.0 - y) * corners[0]
                + (1.0 - x) * y * corners[1]
                + x * (1.0 - y) * corners[2]
                + x * y * corners[3]
        }
    }
}

/// Sample every robot's position-probability surface on a `resolution`-point
/// grid per axis (≥ 2), appending the weighted swarm aggregate as a final
/// series named [`SWARM_SERIES_ID`].
pub fn surface_grid(swarm: &SwarmState, resolution: usize) -> Result<SurfaceGrid> {
    if resolution < 2 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            message: format!("must be at least 2, got {}", resolution),
        });
    }
    let robots = swarm.robots();
    let reference: Vec<QubitRole> = position_qubits(robots[0].roles())
        .iter()
        .map(|&q| robots[0].roles()[q])
        .collect();
    if reference.is_empty() {
        return Err(Error::RoleMissing {
            role: "position_x or position_y",
        });
    }
    if reference.len() > 2 {
        return Err(Error::InvalidParameter {
            name: "position qubits",
            message: format!("surface export supports 1 or 2 axes, got {}", reference.len()),
        });
    }
    for r in robots {
        let axes: Vec<QubitRole> = position_qubits(r.roles())
            .iter()
            .map(|&q| r.roles()[q])
            .collect();
        if axes != reference {
            return Err(Error::InvalidParameter {
                name: "roles",
                message: format!("robot '{}' has a different position-axis layout", r.id()),
            });
        }
    }
    // Axis order is fixed: x, then y when present.
    let mut axes = vec![QubitRole::PositionX];
    if reference.contains(&QubitRole::PositionY) {
        axes.push(QubitRole::PositionY);
    }
    if !reference.contains(&QubitRole::PositionX) {
        axes = vec![QubitRole::PositionY];
    }

    let xs = linspace(resolution);
    let ys = (axes.len() == 2).then(|| linspace(resolution));

    let mut corner_sets: Vec<Vec<f64>> = robots
        .iter()
        .map(|r| corner_probabilities(&r.density(), r.roles(), &axes))
        .collect::<Result<_>>()?;
    let aggregate: Vec<f64> = (0..corner_sets[0].len())
        .map(|c| {
            corner_sets
                .iter()
                .zip(swarm.weights())
                .map(|(set, &w)| w * set[c])
                .sum()
        })
        .collect();
    corner_sets.push(aggregate);

    let mut ids: Vec<String> = robots.iter().map(|r| r.id().to_string()).collect();
    ids.push(SWARM_SERIES_ID.to_string());

    let series = ids
        .into_iter()
        .zip(corner_sets)
        .map(|(robot_id, corners)| {
            let values = match &ys {
                None => xs.iter().map(|&x| sample(&corners, x, None)).collect(),
                Some(ys) => xs
                    .iter()
                    .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
                    .map(|(x, y)| sample(&corners, x, Some(y)))
                    .collect(),
            };
            SurfaceSeries { robot_id, values }
        })
        .collect();

    Ok(SurfaceGrid { xs, ys, series })
}

impl SurfaceGrid {
    /// Render as CSV (`x[,y],robot_id,amplitude`), grid-point-major with the
    /// series cycling fastest. Header comments flag the interpolation as
    /// presentation-only.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "# position-probability surface; values between basis endpoints are linear interpolation (presentation only)\n",
        );
        out.push_str(
            "# per-robot series: reduced position-density diagonal (endpoint values sum to 1 per robot); `swarm` series: weighted mixture of robot series\n",
        );
        match &self.ys {
            None => {
                out.push_str("x,robot_id,amplitude\n");
                for (i, &x) in self.xs.iter().enumerate() {
                    for s in &self.series {
                        let _ = writeln!(out, "{:.16e},{},{:.16e}", x, s.robot_id, s.values[i]);
                    }
                }
            }
            Some(ys) => {
                out.push_str("x,y,robot_id,amplitude\n");
                for (ix, &x) in self.xs.iter().enumerate() {
                    for (iy, &y) in ys.iter().enumerate() {
                        for s in &self.series {
                            let _ = writeln!(
                                out,
                                "{:.16e},{:.16e},{},{:.16e}",
                                x,
                                y,
                                s.robot_id,
                                s.values[ix * ys.len() + iy]
                            );
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Tolerances;
    use crate::swarm::{robot_from_amplitudes, CompositionMode};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn one_axis_swarm() -> SwarmState {
        let tol = Tolerances::default();
        let r1 = robot_from_amplitudes(
            "r1",
            vec![QubitRole::PositionX],
            vec![c(0.0), c(1.0)],
            false,
            &tol,
        )
        .unwrap();
        let r2 = robot_from_amplitudes(
            "r2",
            vec![QubitRole::PositionX],
            vec![c(1.0), c(0.0)],
            false,
            &tol,
        )
        .unwrap();
        SwarmState::new(vec![r1, r2], None, CompositionMode::Mixed).unwrap()
    }

    #[test]
    fn eigenstate_robot_peaks_at_its_position() {
        let grid = surface_grid(&one_axis_swarm(), 5).unwrap();
        assert_eq!(grid.xs.len(), 5);
        assert!(grid.ys.is_none());
        let r1 = &grid.series[0];
        assert_eq!(r1.robot_id, "r1");
        assert_abs_diff_eq!(r1.values[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r1.values[4], 1.0, epsilon = 1e-15);
        assert!(r1.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn resolution_two_gives_exact_endpoints() {
        let grid = surface_grid(&one_axis_swarm(), 2).unwrap();
        assert_eq!(grid.xs, vec![0.0, 1.0]);
        let swarm_series = grid.series.last().unwrap();
        assert_eq!(swarm_series.robot_id, SWARM_SERIES_ID);
        assert_abs_diff_eq!(swarm_series.values[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(swarm_series.values[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn resolution_below_two_rejected() {
        assert!(matches!(
            surface_grid(&one_axis_swarm(), 1),
            Err(Error::InvalidParameter { name: "resolution", .. })
        ));
    }

    #[test]
    fn missing_position_roles_rejected() {
        let tol = Tolerances::default();
        let r = robot_from_amplitudes(
            "s",
            vec![QubitRole::Success],
            vec![c(1.0), c(0.0)],
            false,
            &tol,
        )
        .unwrap();
        let swarm = SwarmState::new(vec![r], None, CompositionMode::Mixed).unwrap();
        assert!(matches!(
            surface_grid(&swarm, 3),
            Err(Error::RoleMissing { .. })
        ));
    }

    #[test]
    fn two_axis_endpoints_match_mixture_diagonal() {
        let tol = Tolerances::default();
        let roles = vec![QubitRole::PositionX, QubitRole::PositionY];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = robot_from_amplitudes(
            "r1",
            roles.clone(),
            vec![c(s), c(0.0), c(0.0), c(s)],
            false,
            &tol,
        )
        .unwrap();
        let origin = robot_from_amplitudes(
            "r2",
            roles,
            vec![c(1.0), c(0.0), c(0.0), c(0.0)],
            false,
            &tol,
        )
        .unwrap();
        let swarm = SwarmState::new(vec![bell, origin], None, CompositionMode::Mixed).unwrap();
        let grid = surface_grid(&swarm, 2).unwrap();
        let ys = grid.ys.as_ref().unwrap();
        assert_eq!(ys.len(), 2);
        let agg = grid.series.last().unwrap();
        // Corners x-major: (0,0), (0,1), (1,0), (1,1).
        assert_abs_diff_eq!(agg.values[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(agg.values[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(agg.values[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(agg.values[3], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn csv_has_header_and_deterministic_rows() {
        let grid = surface_grid(&one_axis_swarm(), 2).unwrap();
        let csv = grid.to_csv();
        let csv2 = surface_grid(&one_axis_swarm(), 2).unwrap().to_csv();
        assert_eq!(csv, csv2);
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(lines.next().unwrap(), "x,robot_id,amplitude");
        // 2 grid points × 3 series.
        assert_eq!(lines.count(), 6);
    }
}
