//! Command implementations behind the `qswarm` binary. Each `cmd_*` function
//! does the full job of one subcommand — read scenario files, compute,
//! write to stdout or `--out` — and returns a process exit code (0 success;
//! validation errors map to 1, I/O to 2, reference-ledger mismatches to 3).

pub mod checks;

use crate::dynamics::{
    conjugate_residual, one_sided_residual, recover_evolution_procrustes, recover_evolution_svd,
    EvolutionOperator,
};
use crate::mission::run_mission;
use crate::qcore::{CMatrix, DensityMatrix, Tolerances};
use crate::scenario::{parse_scenario_with, MatrixJson, ScenarioFile};
use crate::surface::surface_grid;
use crate::swarm::{
    barycenter_probability, reduced_position, swarm_density, QubitRole, SwarmState,
};
use crate::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Serialization target for `cmd_density`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

fn read_scenario(path: &Path, tol: &Tolerances) -> Result<ScenarioFile> {
    let text = fs::read_to_string(path)?;
    parse_scenario_with(&text, tol)
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

/// Row-major CSV rendering of a complex matrix: each row becomes one line of
/// interleaved `re,im` pairs at 17 significant digits.
fn matrix_csv(m: &CMatrix) -> String {
    let mut out = String::from("# complex matrix, row-major, interleaved re,im pairs\n");
    for r in 0..m.nrows() {
        let cells: Vec<String> = (0..m.ncols())
            .flat_map(|c| [format!("{:.16e}", m[(r, c)].re), format!("{:.16e}", m[(r, c)].im)])
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `report.csv` + `swarm` → `report.swarm.csv`, keeping the directory.
fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let ext = base
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    base.with_file_name(format!("{}.{}.{}", stem, suffix, ext))
}

fn sanitize_id(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

#[derive(Debug, Serialize)]
struct ReducedEntry {
    robot_id: String,
    matrix: MatrixJson,
}

#[derive(Debug, Serialize)]
struct DensityReport {
    swarm_density: MatrixJson,
    trace: f64,
    purity: f64,
    /// `[P(x=0), P(x=1)]` over the swarm; absent without a PositionX role.
    #[serde(skip_serializing_if = "Option::is_none")]
    barycenter: Option<[f64; 2]>,
    reduced_position: Vec<ReducedEntry>,
}

fn density_report(swarm: &SwarmState) -> Result<(DensityMatrix, DensityReport)> {
    let rho = swarm_density(swarm)?;
    let has_x = swarm.robots()[0]
        .roles()
        .contains(&QubitRole::PositionX);
    let barycenter = if has_x {
        Some([
            barycenter_probability(swarm, false)?,
            barycenter_probability(swarm, true)?,
        ])
    } else {
        None
    };
    let reduced_position = swarm
        .robots()
        .iter()
        .map(|r| {
            reduced_position(&r.density(), r.roles()).map(|m| ReducedEntry {
                robot_id: r.id().to_string(),
                matrix: MatrixJson::from_matrix(m.matrix()),
            })
        })
        .collect::<Result<_>>()?;
    let report = DensityReport {
        swarm_density: MatrixJson::from_matrix(rho.matrix()),
        trace: rho.matrix().trace().re,
        purity: crate::qcore::ops::purity(&rho),
        barycenter,
        reduced_position,
    };
    Ok((rho, report))
}

/// Swarm density, purity, barycenter probabilities, and per-robot reduced
/// position matrices — JSON to stdout/`--out`, or one matrix per file for
/// `--format csv` (which requires `--out` as the base path).
pub fn cmd_density(scenario: &Path, out: Option<&Path>, format: OutputFormat) -> Result<i32> {
    let tol = Tolerances::from_env()?;
    let file = read_scenario(scenario, &tol)?;
    let swarm = file.to_swarm_state(&tol)?;
    let (rho, report) = density_report(&swarm)?;
    match format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Json(e.to_string()))?;
            text.push('\n');
            write_text(out, &text)?;
        }
        OutputFormat::Csv => {
            let base = out.ok_or(Error::InvalidParameter {
                name: "--out",
                message: "required with --format csv (used as the base path)".to_string(),
            })?;
            let mut written = Vec::new();
            let swarm_path = with_suffix(base, "swarm");
            fs::write(&swarm_path, matrix_csv(rho.matrix()))?;
            written.push(swarm_path);
            for (entry, robot) in report.reduced_position.iter().zip(swarm.robots()) {
                let path = with_suffix(base, &format!("reduced.{}", sanitize_id(robot.id())));
                fs::write(&path, matrix_csv(&entry.matrix.to_matrix()?))?;
                written.push(path);
            }
            let mut scalars = String::from("name,value\n");
            let _ = writeln!(scalars, "trace,{:.16e}", report.trace);
            let _ = writeln!(scalars, "purity,{:.16e}", report.purity);
            if let Some([p0, p1]) = report.barycenter {
                let _ = writeln!(scalars, "barycenter_p0,{:.16e}", p0);
                let _ = writeln!(scalars, "barycenter_p1,{:.16e}", p1);
            }
            let scalars_path = with_suffix(base, "scalars");
            fs::write(&scalars_path, scalars)?;
            written.push(scalars_path);
            for path in written {
                println!("{}", path.display());
            }
        }
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct VariantReport {
    operator: MatrixJson,
    unitarity_defect: f64,
    unitary_within_threshold: bool,
    one_sided_residual: f64,
    conjugate_residual: f64,
}

fn variant_report(
    o: &EvolutionOperator,
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
) -> VariantReport {
    VariantReport {
        operator: MatrixJson::from_matrix(o.matrix()),
        unitarity_defect: o.unitarity_defect(),
        unitary_within_threshold: !o.flagged(),
        one_sided_residual: one_sided_residual(o, rho0, rho1),
        conjugate_residual: conjugate_residual(o, rho0, rho1),
    }
}

#[derive(Debug, Serialize)]
struct EvolveReport {
    dim: usize,
    svd_composition: VariantReport,
    procrustes: VariantReport,
}

/// Recover the evolution operator between two scenario snapshots with both
/// methods and report operators, unitarity defects, and residuals as JSON.
pub fn cmd_evolve(scenario0: &Path, scenario1: &Path, out: Option<&Path>) -> Result<i32> {
    let tol = Tolerances::from_env()?;
    let rho0 = swarm_density(&read_scenario(scenario0, &tol)?.to_swarm_state(&tol)?)?;
    let rho1 = swarm_density(&read_scenario(scenario1, &tol)?.to_swarm_state(&tol)?)?;
    let o_svd = recover_evolution_svd(&rho0, &rho1)?;
    let o_pro = recover_evolution_procrustes(&rho0, &rho1)?;
    let report = EvolveReport {
        dim: rho0.dim(),
        svd_composition: variant_report(&o_svd, &rho0, &rho1),
        procrustes: variant_report(&o_pro, &rho0, &rho1),
    };
    let mut text =
        serde_json::to_string_pretty(&report).map_err(|e| Error::Json(e.to_string()))?;
    text.push('\n');
    write_text(out, &text)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct RecordLine {
    iteration: usize,
    distance_to_target: f64,
    distance_to_estimate: f64,
    converged: bool,
    displacements: Vec<f64>,
    operator: MatrixJson,
    rho_swarm: MatrixJson,
    rho_estimate: MatrixJson,
}

#[derive(Debug, Serialize)]
struct MissionSummary {
    converged: bool,
    iterations: usize,
    final_distance: f64,
}

/// Run the scenario's mission and write the trace as JSON lines (one record
/// per iteration). `--seed` overrides the scenario seed; `--summary` prints
/// a one-line outcome object to stdout afterwards.
pub fn cmd_mission(
    scenario: &Path,
    out: Option<&Path>,
    summary: bool,
    seed: Option<u64>,
) -> Result<i32> {
    let tol = Tolerances::from_env()?;
    let mut file = read_scenario(scenario, &tol)?;
    if let (Some(seed), Some(mission)) = (seed, file.mission.as_mut()) {
        mission.seed = seed;
    }
    let cfg = file.to_mission_config(&tol)?;
    let trace = run_mission(&cfg)?;
    let mut lines = String::new();
    for rec in &trace.records {
        let line = RecordLine {
            iteration: rec.iteration,
            distance_to_target: rec.distance_to_target,
            distance_to_estimate: rec.distance_to_estimate,
            converged: rec.converged,
            displacements: rec.displacements.clone(),
            operator: MatrixJson::from_matrix(rec.operator.matrix()),
            rho_swarm: MatrixJson::from_matrix(rec.rho_swarm.matrix()),
            rho_estimate: MatrixJson::from_matrix(rec.rho_estimate.matrix()),
        };
        lines.push_str(&serde_json::to_string(&line).map_err(|e| Error::Json(e.to_string()))?);
        lines.push('\n');
    }
    write_text(out, &lines)?;
    if summary {
        let s = MissionSummary {
            converged: trace.converged,
            iterations: trace.iterations,
            final_distance: trace.final_distance,
        };
        println!(
            "{}",
            serde_json::to_string(&s).map_err(|e| Error::Json(e.to_string()))?
        );
    }
    Ok(0)
}

/// Sample the position-probability surfaces on a `resolution`-point grid and
/// write the CSV to stdout/`--out`.
pub fn cmd_surface(scenario: &Path, out: Option<&Path>, resolution: usize) -> Result<i32> {
    let tol = Tolerances::from_env()?;
    let swarm = read_scenario(scenario, &tol)?.to_swarm_state(&tol)?;
    let grid = surface_grid(&swarm, resolution)?;
    write_text(out, &grid.to_csv())?;
    Ok(0)
}

/// Recompute the embedded reference-value table and report each row as PASS
/// or DIVERGES (with both numbers). Exit 0 when every row matches its
/// expected classification, 3 on any unexpected mismatch; `--strict-paper`
/// turns expected divergences into exit 1.
pub fn cmd_paper_check(strict: bool, json: bool, out: Option<&Path>) -> Result<i32> {
    let tol = Tolerances::from_env()?;
    let outcomes = checks::run_reference_checks(&tol)?;
    let text = if json {
        checks::render_json(&outcomes)?
    } else {
        checks::render_text(&outcomes)
    };
    write_text(out, &text)?;
    Ok(checks::exit_code(&outcomes, strict))
}
