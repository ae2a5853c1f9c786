//! Oracle comparisons run before any output is written.

use asymdiff::basis::{forward_transform, inverse_transform, TensorBasis};
use asymdiff::diffusion::{coeff_power, distance_matrix_repr};
use asymdiff::oracle::{brute_distance_matrix, SpectralDecomp, SpectralExponent};
use asymdiff::{DiffusionTime, Error, KernelMatrix};
use serde::Serialize;

use crate::error::CliResult;

/// Largest `n` checked by default.
pub const MAX_CHECKED_N: usize = 64;
const RECON_TOL: f64 = 1e-10;
const DIST_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Default, Serialize)]
pub struct SelfCheck {
    pub performed: bool,
    /// `max |inverse(forward(K)) - K|`.
    pub reconstruction_max_abs: Option<f64>,
    /// Full-order representation against brute force, relative to the largest distance.
    pub distance_max_rel: Option<f64>,
    pub spectral_max_rel: Option<f64>,
}

impl SelfCheck {
    pub fn skipped() -> Self {
        Self::default()
    }
}

fn violation(what: &str, value: f64, tol: f64) -> Error {
    Error::InvariantViolation(format!("self-check: {what} = {value:e} exceeds {tol:e}"))
}

fn max_rel(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    let scale = b.amax().max(f64::MIN_POSITIVE);
    (a - b).amax() / scale
}

/// Reconstruction exactness and full-order distances against brute force;
/// the spectral path too when the kernel is symmetric.
pub fn check_kernel(k: &KernelMatrix, t: DiffusionTime) -> CliResult<SelfCheck> {
    let basis = TensorBasis::fourier(k.n())?;
    let c = forward_transform(k, &basis)?;
    let recon = inverse_transform(&c, &basis)?.values;
    let recon_err = (recon - k.entries()).amax();
    if recon_err > RECON_TOL {
        return Err(violation("reconstruction error", recon_err, RECON_TOL).into());
    }

    let full = basis.max_radius();
    let powered = coeff_power(&c, &basis, t, full)?;
    let repr = distance_matrix_repr(&powered, &basis, full, full)?;
    let brute = brute_distance_matrix(k, t);
    let dist_err = max_rel(&repr, &brute);
    if dist_err > DIST_TOL {
        return Err(violation("distance error", dist_err, DIST_TOL).into());
    }

    let spectral_max_rel = match SpectralDecomp::new(k) {
        Ok(s) => {
            let n = k.n();
            let mut m = nalgebra::DMatrix::zeros(n, n);
            for x in 0..n {
                for y in 0..n {
                    m[(x, y)] = s.distance_sq(t, x, y, SpectralExponent::Doubled)?;
                }
            }
            let err = max_rel(&m, &brute);
            if err > DIST_TOL {
                return Err(violation("spectral distance error", err, DIST_TOL).into());
            }
            Some(err)
        }
        Err(Error::NotSymmetric { .. }) => None,
        Err(e) => return Err(e.into()),
    };

    Ok(SelfCheck {
        performed: true,
        reconstruction_max_abs: Some(recon_err),
        distance_max_rel: Some(dist_err),
        spectral_max_rel,
    })
}

pub fn enabled(n: usize, no_self_check: bool) -> bool {
    !no_self_check && n <= MAX_CHECKED_N
}
