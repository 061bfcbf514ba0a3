//! The reference-value table behind `qswarm paper-check`: every published
//! numeric artifact the library models, recomputed from the embedded golden
//! scenarios and compared against the reference values. Rows where the
//! reference arithmetic is known not to hold are expected to DIVERGE; the
//! command fails (exit 3) only when a row's observed classification differs
//! from the expected one recorded here.

use crate::dynamics::{
    lindblad_generator_raw, recover_evolution_procrustes, recover_evolution_svd,
    stability_indicator, Dissipator, Hamiltonian, StabilityVerdict,
};
use crate::qcore::matrix::reversed_basis_order;
use crate::qcore::ops::{frobenius_half_sq, purity, trace_distance};
use crate::qcore::{CMatrix, DensityMatrix, Tolerances};
use crate::scenario::parse_scenario;
use crate::swarm::{
    barycenter_probability, position_probability, reduced_position, swarm_density, SwarmState,
};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;

pub const GOLDEN_PURE_TOY: &str = include_str!("../../scenarios/paper/pure_toy.json");
pub const GOLDEN_MIXED_TOY: &str = include_str!("../../scenarios/paper/mixed_toy.json");
pub const GOLDEN_CASE_A_T0: &str = include_str!("../../scenarios/paper/case_a_t0.json");
pub const GOLDEN_CASE_A_T1: &str = include_str!("../../scenarios/paper/case_a_t1.json");
pub const GOLDEN_SNAPSHOT_T0: &str = include_str!("../../scenarios/paper/snapshot_t0.json");
pub const GOLDEN_SNAPSHOT_T1: &str = include_str!("../../scenarios/paper/snapshot_t1.json");

/// Whether a table row reproduces its reference value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Pass,
    Diverges,
}

/// One evaluated row of the reference table.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub expected: Classification,
    pub observed: Classification,
    pub matches: bool,
    pub details: String,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ci(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, rows[0].len(), |r, col| c(rows[r][col]))
}

fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn golden_swarm(text: &str, tol: &Tolerances) -> Result<SwarmState> {
    parse_scenario(text)?.to_swarm_state(tol)
}

fn classify(diff: f64, tol: f64) -> Classification {
    if diff <= tol {
        Classification::Pass
    } else {
        Classification::Diverges
    }
}

fn fmt_matrix(m: &CMatrix) -> String {
    let mut out = String::from("[");
    for r in 0..m.nrows() {
        if r > 0 {
            out.push_str("; ");
        }
        let row: Vec<String> = (0..m.ncols())
            .map(|col| {
                let z = m[(r, col)];
                if z.im.abs() < 1e-14 {
                    format!("{:.4}", z.re)
                } else {
                    format!("{:.4}{:+.4}i", z.re, z.im)
                }
            })
            .collect();
        out.push_str(&row.join(", "));
    }
    out.push(']');
    out
}

/// Evaluate the full table in order. All inputs are embedded; the tolerance
/// bundle's trace entry is the numeric comparison threshold.
pub fn run_reference_checks(tol: &Tolerances) -> Result<Vec<CheckOutcome>> {
    let eps = tol.trace;
    let mut rows = Vec::new();
    let mut push = |name: &'static str,
                    expected: Classification,
                    observed: Classification,
                    details: String| {
        rows.push(CheckOutcome {
            name,
            expected,
            observed,
            matches: expected == observed,
            details,
        });
    };

    let pure = golden_swarm(GOLDEN_PURE_TOY, tol)?;
    let mixed = golden_swarm(GOLDEN_MIXED_TOY, tol)?;
    let r1 = &pure.robots()[0];
    let r2 = &pure.robots()[1];

    // 1–2: single-robot densities against the reference matrices (printed
    // with the basis order reversed relative to the canonical one).
    let ref_r1 = reversed_basis_order(&real_matrix(&[
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.5, 0.0, 0.5],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.5, 0.0, 0.5],
    ]));
    let d1 = max_abs_diff(r1.density().matrix(), &ref_r1);
    push(
        "superposed robot density",
        Classification::Pass,
        classify(d1, eps),
        format!("max |Δ| = {:.3e}", d1),
    );
    let ref_r2 = reversed_basis_order(&real_matrix(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
    ]));
    let d2 = max_abs_diff(r2.density().matrix(), &ref_r2);
    push(
        "eigenstate robot density",
        Classification::Pass,
        classify(d2, eps),
        format!("max |Δ| = {:.3e}", d2),
    );

    // 3–4: position probabilities and their weighted barycenter.
    let p1 = position_probability(r1, true)?;
    let p2 = position_probability(r2, true)?;
    let d3 = (p1 - 0.5).abs().max((p2 - 1.0).abs());
    push(
        "position probabilities",
        Classification::Pass,
        classify(d3, eps),
        format!("P₁(x=1) = {:.6}, P₂(x=1) = {:.6} (reference 0.5, 1)", p1, p2),
    );
    let bary = barycenter_probability(&mixed, true)?;
    push(
        "barycenter probability",
        Classification::Pass,
        classify((bary - 0.75).abs(), eps),
        format!("P(x=1) = {:.6} (reference 0.75)", bary),
    );

    // 5: tracing the success qubit out of the eigenstate robot.
    let red2 = reduced_position(&r2.density(), r2.roles())?;
    let ref_red2 = real_matrix(&[&[0.0, 0.0], &[0.0, 1.0]]);
    let d5 = max_abs_diff(red2.matrix(), &ref_red2);
    push(
        "eigenstate success reduction",
        Classification::Pass,
        classify(d5, eps),
        format!("max |Δ| = {:.3e}", d5),
    );

    // 6–8: the two-robot mixture, its trace, and its purity.
    let rho_mix = swarm_density(&mixed)?;
    let ref_mix = reversed_basis_order(&real_matrix(&[
        &[0.5, 0.0, 0.0, 0.0],
        &[0.0, 0.25, 0.0, 0.25],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.25, 0.0, 0.25],
    ]));
    let d6 = max_abs_diff(rho_mix.matrix(), &ref_mix);
    push(
        "two-robot mixture matrix",
        Classification::Pass,
        classify(d6, eps),
        format!("max |Δ| = {:.3e}", d6),
    );
    let tr = rho_mix.matrix().trace().re;
    push(
        "mixture trace",
        Classification::Pass,
        classify((tr - 1.0).abs(), eps),
        format!("trace = {:.12}", tr),
    );
    let pur = purity(&rho_mix);
    push(
        "mixture purity",
        Classification::Pass,
        classify((pur - 0.5).abs(), eps),
        format!("purity = {:.12} (reference 0.5)", pur),
    );

    // 9: the single-qubit relocation snapshots rebuilt from their mixture
    // definitions.
    let rho_a0 = swarm_density(&golden_swarm(GOLDEN_CASE_A_T0, tol)?)?;
    let rho_a1 = swarm_density(&golden_swarm(GOLDEN_CASE_A_T1, tol)?)?;
    let ref_a0 = real_matrix(&[&[0.9, 0.2], &[0.2, 0.1]]);
    let ref_a1 = real_matrix(&[&[0.1, 0.2], &[0.2, 0.9]]);
    let d9 = max_abs_diff(rho_a0.matrix(), &ref_a0).max(max_abs_diff(rho_a1.matrix(), &ref_a1));
    push(
        "relocation snapshots",
        Classification::Pass,
        classify(d9, eps),
        format!("max |Δ| over both snapshots = {:.3e}", d9),
    );

    // 10: the entangled-pair snapshots (initial and final), plus traces.
    let rho_s0 = swarm_density(&golden_swarm(GOLDEN_SNAPSHOT_T0, tol)?)?;
    let rho_s1 = swarm_density(&golden_swarm(GOLDEN_SNAPSHOT_T1, tol)?)?;
    let ref_s0 = real_matrix(&[
        &[0.75, 0.0, 0.0, 0.25],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.25, 0.0, 0.0, 0.25],
    ]);
    let ref_s1 = real_matrix(&[
        &[0.15, 0.0, 0.0, 0.35],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.35, 0.0, 0.0, 0.85],
    ]);
    let d10 = max_abs_diff(rho_s0.matrix(), &ref_s0)
        .max(max_abs_diff(rho_s1.matrix(), &ref_s1))
        .max((rho_s0.matrix().trace().re - 1.0).abs())
        .max((rho_s1.matrix().trace().re - 1.0).abs());
    push(
        "entangled-pair snapshots",
        Classification::Pass,
        classify(d10, eps),
        format!("max |Δ| over both snapshots = {:.3e}", d10),
    );

    // 11–12: operator recovery between the snapshots — both variants must be
    // unitary within threshold, and the least-squares variant's one-sided
    // residual can never exceed the composition variant's.
    let o_svd = recover_evolution_svd(&rho_s0, &rho_s1)?;
    let o_pro = recover_evolution_procrustes(&rho_s0, &rho_s1)?;
    let defect = o_svd.unitarity_defect().max(o_pro.unitarity_defect());
    push(
        "recovered operator unitarity",
        Classification::Pass,
        classify(defect, 1e-8),
        format!("max unitarity defect = {:.3e} (threshold 1e-8)", defect),
    );
    let res_svd = crate::dynamics::one_sided_residual(&o_svd, &rho_s0, &rho_s1);
    let res_pro = crate::dynamics::one_sided_residual(&o_pro, &rho_s0, &rho_s1);
    push(
        "least-squares residual dominance",
        Classification::Pass,
        classify((res_pro - res_svd).max(0.0), 1e-12),
        format!("residuals: least-squares {:.6e} ≤ composition {:.6e}", res_pro, res_svd),
    );

    // 13 (known divergence): tracing the success qubit out of the
    // superposed robot. The reference expression omits two of the four
    // terms the definition produces.
    let red1 = reduced_position(&r1.density(), r1.roles())?;
    let ref_red1 = real_matrix(&[&[0.5, 0.0], &[0.5, 0.0]]);
    let d13 = max_abs_diff(red1.matrix(), &ref_red1);
    push(
        "superposed robot reduction",
        Classification::Diverges,
        classify(d13, eps),
        format!(
            "computed {} vs reference form {}",
            fmt_matrix(red1.matrix()),
            fmt_matrix(&ref_red1)
        ),
    );

    // 14 (known divergence): the distance between the relocation snapshot
    // and the pure target. The reference prints 0.05, which the trace
    // distance does not reproduce — half the squared Frobenius norm does.
    let target = DensityMatrix::with_default_tol(real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]))?;
    let td = trace_distance(&rho_a0, &target)?;
    let fro = frobenius_half_sq(&rho_a0, &target)?;
    push(
        "snapshot-to-target distance",
        Classification::Diverges,
        classify((td - 0.05).abs(), eps),
        format!(
            "trace distance = {:.12} vs reference 0.05; ½‖Δ‖²_F = {:.12} reproduces it",
            td, fro
        ),
    );

    // 15 (known divergence): the stability indicator at the final
    // relocation snapshot. The computed trace is 0 (indeterminate); the
    // reference value −0.16i·ΔE is the off-diagonal entry of the product,
    // not its trace.
    let h = Hamiltonian::new(
        real_matrix(&[&[0.5, 0.0], &[0.0, -0.5]]),
        1.0,
    )?;
    let report = stability_indicator(&rho_a0, &rho_a1, &h, &[])?;
    let d15 = (report.value - ci(0.0, -0.16)).norm();
    push(
        "stability indicator value",
        Classification::Diverges,
        classify(d15, eps),
        format!(
            "computed {:.6}{:+.6}i ({:?}) vs reference -0.16i",
            report.value.re,
            report.value.im,
            report.verdict
        ),
    );
    debug_assert_eq!(report.verdict, StabilityVerdict::Indeterminate);

    // 16 (known divergence): the commutator term of the generator on the
    // non-Hermitian reduced matrix ¼[[1,0],[1,2]]. The computed matrix has
    // a single off-diagonal entry; the reference prints a diagonal one.
    let rho_r = real_matrix(&[&[0.25, 0.0], &[0.25, 0.5]]);
    let comm = lindblad_generator_raw(&rho_r, &h, &[])?;
    let ref_comm = CMatrix::from_row_slice(2, 2, &[ci(0.0, -0.5), c(0.0), c(0.0), ci(0.0, 0.5)]);
    let d16 = max_abs_diff(&comm, &ref_comm);
    push(
        "generator commutator term",
        Classification::Diverges,
        classify(d16, eps),
        format!(
            "computed {} vs reference {}",
            fmt_matrix(&comm),
            fmt_matrix(&ref_comm)
        ),
    );

    // 17: the dissipator terms on the same matrix with L = |0⟩⟨0|, γ = 1.
    // Summing the three reference terms gives −⅛|1⟩⟨0|, which the generator
    // (with H = 0) reproduces exactly.
    let l = real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let h0 = Hamiltonian::new(CMatrix::zeros(2, 2), 0.0)?;
    let jumps = lindblad_generator_raw(&rho_r, &h0, &[Dissipator::new(l, 1.0)?])?;
    let ref_jumps = real_matrix(&[&[0.0, 0.0], &[-0.125, 0.0]]);
    let d17 = max_abs_diff(&jumps, &ref_jumps);
    push(
        "dissipator term arithmetic",
        Classification::Pass,
        classify(d17, eps),
        format!("max |Δ| = {:.3e} against the summed reference terms", d17),
    );

    Ok(rows)
}

/// Human-readable report: one line per row plus a summary.
pub fn render_text(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    for (i, o) in outcomes.iter().enumerate() {
        let status = match (o.observed, o.matches) {
            (Classification::Pass, true) => "PASS",
            (Classification::Diverges, true) => "DIVERGES (expected)",
            (Classification::Pass, false) => "PASS (unexpected!)",
            (Classification::Diverges, false) => "DIVERGES (UNEXPECTED)",
        };
        let _ = writeln!(
            out,
            "{:>2}. {:<width$}  {:<22} {}",
            i + 1,
            o.name,
            status,
            o.details,
            width = width
        );
    }
    let diverging = outcomes
        .iter()
        .filter(|o| o.observed == Classification::Diverges)
        .count();
    let mismatched = outcomes.iter().filter(|o| !o.matches).count();
    let _ = writeln!(
        out,
        "{} checks: {} reproduced, {} known divergences, {} unexpected",
        outcomes.len(),
        outcomes.len() - diverging,
        diverging,
        mismatched
    );
    out
}

#[derive(Debug, Serialize)]
struct JsonReport<'a> {
    checks: &'a [CheckOutcome],
    total: usize,
    divergences: usize,
    all_match: bool,
}

/// Machine-readable report for `--json`.
pub fn render_json(outcomes: &[CheckOutcome]) -> Result<String> {
    let report = JsonReport {
        checks: outcomes,
        total: outcomes.len(),
        divergences: outcomes
            .iter()
            .filter(|o| o.observed == Classification::Diverges)
            .count(),
        all_match: outcomes.iter().all(|o| o.matches),
    };
    let mut text =
        serde_json::to_string_pretty(&report).map_err(|e| Error::Json(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// 3 on any row whose classification differs from the expectation; under
/// `strict`, 1 when any (expected) divergence is present; 0 otherwise.
pub fn exit_code(outcomes: &[CheckOutcome], strict: bool) -> i32 {
    if outcomes.iter().any(|o| !o.matches) {
        3
    } else if strict
        && outcomes
            .iter()
            .any(|o| o.observed == Classification::Diverges)
    {
        1
    } else {
        0
    }
}
