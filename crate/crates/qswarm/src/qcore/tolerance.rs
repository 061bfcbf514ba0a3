/// Default tolerance for ket normalization checks.
pub const NORM_TOL: f64 = 1e-9;
/// Default tolerance for Hermiticity checks (Frobenius norm of m − m†).
pub const HERM_TOL: f64 = 1e-9;
/// Default tolerance for unit-trace checks.
pub const TRACE_TOL: f64 = 1e-9;
/// Default tolerance for positive-semidefiniteness; eigenvalues in
/// (−PSD_TOL, 0) are clamped to 0 on construction.
pub const PSD_TOL: f64 = 1e-9;

/// Environment variable that overrides the whole tolerance bundle with a
/// single value (parsed as a real).
pub const TOL_ENV_VAR: &str = "QSWARM_TOL";

/// Validation tolerance bundle. One knob per invariant class; the defaults
/// are shared by every constructor unless a caller passes its own bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub norm: f64,
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm: NORM_TOL,
            herm: HERM_TOL,
            trace: TRACE_TOL,
            psd: PSD_TOL,
        }
    }
}

impl Tolerances {
    /// Uniform bundle: every tolerance set to `tol`.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            norm: tol,
            herm: tol,
            trace: tol,
            psd: tol,
        }
    }

    /// Defaults, overridden by the `QSWARM_TOL` environment variable when it
    /// is set. A set-but-unparsable or non-positive value is an error rather
    /// than a silent fallback.
    pub fn from_env() -> crate::Result<Self> {
        match std::env::var(TOL_ENV_VAR) {
            Ok(raw) => {
                let tol: f64 = raw.trim().parse().map_err(|_| crate::Error::InvalidParameter {
                    name: TOL_ENV_VAR,
                    message: format!("cannot parse {raw:?} as a real"),
                })?;
                if !tol.is_finite() || tol <= 0.0 {
                    return Err(crate::Error::InvalidParameter {
                        name: TOL_ENV_VAR,
                        message: format!("tolerance must be a positive real, got {tol}"),
                    });
                }
                Ok(Tolerances::uniform(tol))
            }
            Err(_) => Ok(Tolerances::default()),
        }
    }
}
