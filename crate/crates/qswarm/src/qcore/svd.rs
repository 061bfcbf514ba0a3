use super::matrix::{all_finite, CMatrix};
use crate::{Error, Result};
use num_complex::Complex64;

/// Singular value decomposition m = U Σ V† with a deterministic gauge.
///
/// Backends are free to order singular triplets and rotate each (uₖ, vₖ)
/// pair by a shared phase; both freedoms are fixed here so decompositions
/// are reproducible across runs:
/// - singular values sorted descending,
/// - each U column rotated so its largest-magnitude entry is real positive,
///   with the same rotation applied to the matching V column (ties broken
///   by lowest row index).
#[derive(Debug, Clone)]
pub struct SvdDecomposition {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl SvdDecomposition {
    pub fn compute(m: &CMatrix) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Empty("singular value decomposition input"));
        }
        if !all_finite(m) {
            return Err(Error::NonFinite);
        }
        let svd = m.clone().svd(true, true);
        let u_raw = svd.u.ok_or(Error::SvdFailed)?;
        let vt_raw = svd.v_t.ok_or(Error::SvdFailed)?;
        let sigma = svd.singular_values;

        let k = sigma.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            sigma[b]
                .partial_cmp(&sigma[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });

        let mut u = CMatrix::zeros(u_raw.nrows(), k);
        let mut v = CMatrix::zeros(vt_raw.ncols(), k);
        let mut singular_values = Vec::with_capacity(k);
        for (dst, &src) in order.iter().enumerate() {
            singular_values.push(sigma[src]);
            let ucol = u_raw.column(src).into_owned();
            // Rows of V† are conjugated columns of V.
            let vcol = vt_raw.row(src).adjoint();
            let phase = gauge_phase(&ucol);
            u.set_column(dst, &ucol.map(|z| z * phase));
            v.set_column(dst, &vcol.map(|z| z * phase));
        }
        if !all_finite(&u) || !all_finite(&v) {
            return Err(Error::SvdFailed);
        }
        Ok(SvdDecomposition {
            u,
            singular_values,
            v,
        })
    }

    /// Reassemble U Σ V†; useful for residual checks.
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.singular_values.len();
        let sigma = CMatrix::from_fn(k, k, |r, c| {
            if r == c {
                Complex64::new(self.singular_values[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &self.u * sigma * self.v.adjoint()
    }
}

/// Unit phase that rotates the column's largest-magnitude entry onto the
/// positive real axis. Zero columns are left untouched.
fn gauge_phase(col: &nalgebra::DVector<Complex64>) -> Complex64 {
    let mut best = 0usize;
    let mut best_mag = -1.0f64;
    for (i, z) in col.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag + 1e-15 {
            best_mag = mag;
            best = i;
        }
    }
    let pivot = col[best];
    if pivot.norm() <= f64::EPSILON {
        Complex64::new(1.0, 0.0)
    } else {
        pivot.conj() / pivot.norm()
    }
}
