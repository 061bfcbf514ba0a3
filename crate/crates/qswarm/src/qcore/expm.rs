use super::matrix::{all_finite, ensure_square, inf_norm, CMatrix};
use crate::{Error, Result};

/// Degree-13 Padé numerator coefficients (Higham's scaling-and-squaring
/// constants) and the matching ∞-norm threshold.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential e^A by degree-13 Padé approximation with scaling and
/// squaring: A is scaled by 2⁻ˢ until ‖A/2ˢ‖_∞ ≤ θ₁₃, the Padé quotient is
/// solved, and the result squared s times.
pub fn matrix_exp(a: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(a)?;
    if !all_finite(a) {
        return Err(Error::NonFinite);
    }
    let norm = inf_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(s as i32));

    let ident = CMatrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    // U = A · (A⁶(b₁₃A⁶ + b₁₁A⁴ + b₉A²) + b₇A⁶ + b₅A⁴ + b₃A² + b₁I)
    let u_inner = &a6 * (a6.scale(PADE13[13]) + a4.scale(PADE13[11]) + a2.scale(PADE13[9]))
        + a6.scale(PADE13[7])
        + a4.scale(PADE13[5])
        + a2.scale(PADE13[3])
        + ident.scale(PADE13[1]);
    let u = &scaled * u_inner;
    // V = A⁶(b₁₂A⁶ + b₁₀A⁴ + b₈A²) + b₆A⁶ + b₄A⁴ + b₂A² + b₀I
    let v = &a6 * (a6.scale(PADE13[12]) + a4.scale(PADE13[10]) + a2.scale(PADE13[8]))
        + a6.scale(PADE13[6])
        + a4.scale(PADE13[4])
        + a2.scale(PADE13[2])
        + ident.scale(PADE13[0]);

    // e^A ≈ (V − U)⁻¹(V + U)
    let lhs = &v - &u;
    let rhs = &v + &u;
    let solved = lhs
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem("matrix exponential Padé solve"))?;

    let mut result = solved;
    for _ in 0..s {
        result = &result * &result;
    }
    if !all_finite(&result) {
        return Err(Error::NonFinite);
    }
    Ok(result)
}
