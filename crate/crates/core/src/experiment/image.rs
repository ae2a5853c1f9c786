use nalgebra::DMatrix;

use crate::basis::{forward_transform, inverse_transform, truncate, TensorBasis};
use crate::dataset::ScalarGrid;
use crate::error::{Error, Result};
use crate::kernel::{image_kernel, markov_normalize, KernelMatrix};
use crate::oracle::{time_comparison, SvdDecomp, TimeReport, TimingProtocol};

#[derive(Debug, Clone, Default)]
pub struct ImageConfig {
    /// Radius of the `m2` box for the written reconstructions; `n / 4` when unset.
    pub k2: Option<usize>,
    /// Radii for the error/time curves; a doubling sweep up to `n / 2` when empty.
    pub sweep: Vec<usize>,
    pub protocol: TimingProtocol,
}

#[derive(Debug, Clone)]
pub struct ImageResult {
    pub n: usize,
    pub k2: usize,
    /// Markov-normalized image kernel.
    pub kernel: KernelMatrix,
    /// Reconstructions in the original gray scale, clamped to `[0, 1]`.
    pub recon_fourier: ScalarGrid,
    pub recon_svd: ScalarGrid,
    /// `‖ρ - ρ_r‖_F` for each path at the chosen `k2` (rank `2·k2 + 1` for SVD).
    pub fourier_l2_error: f64,
    pub svd_l2_error: f64,
    pub report: TimeReport,
}

fn default_sweep(n: usize) -> Vec<usize> {
    let max = n / 2;
    let mut out = vec![0];
    let mut r = 1;
    while r < max {
        out.push(r);
        r *= 2;
    }
    if max > 0 {
        out.push(max);
    }
    out
}

/// Undoes `ρ = k / (√v(x)√v(y))` and clamps to the gray-scale range.
fn denormalize(rho: &DMatrix<f64>, volumes: &[f64]) -> Result<ScalarGrid> {
    let n = rho.nrows();
    let values = DMatrix::from_fn(n, n, |x, y| (rho[(x, y)] * (volumes[x] * volumes[y]).sqrt()).clamp(0.0, 1.0));
    ScalarGrid::dense(values)
}

/// Fourier and SVD reconstructions of a Markov-normalized image kernel.
pub fn run_image(grid: &ScalarGrid, cfg: &ImageConfig) -> Result<ImageResult> {
    let raw = image_kernel(grid)?;
    let volumes = raw.volumes();
    let kernel = markov_normalize(&raw)?;
    let n = kernel.n();
    let k2 = cfg.k2.unwrap_or(n / 4);
    let basis = TensorBasis::fourier(n)?;
    basis.col().check_radius(k2)?;

    let grid_c = forward_transform(&kernel, &basis)?;
    let kept = truncate(&grid_c, &basis, basis.max_radius(), k2)?;
    let fourier = inverse_transform(&kept, &basis)?.values;
    let svd = SvdDecomp::new(kernel.entries())?;
    let rank = (2 * k2 + 1).min(n);
    let svd_recon = svd.rank_truncation(rank);

    let fourier_l2_error = (kernel.entries() - &fourier).norm();
    let svd_l2_error = (kernel.entries() - &svd_recon).norm();

    let sweep = if cfg.sweep.is_empty() { default_sweep(n) } else { cfg.sweep.clone() };
    if let Some(&bad) = sweep.iter().find(|&&r| r > n / 2) {
        return Err(Error::RadiusTooLarge { radius: bad, max: n / 2 });
    }
    let report = time_comparison(&kernel, &sweep, &cfg.protocol)?;

    Ok(ImageResult {
        n,
        k2,
        recon_fourier: denormalize(&fourier, &volumes)?,
        recon_svd: denormalize(&svd_recon, &volumes)?,
        kernel,
        fourier_l2_error,
        svd_l2_error,
        report,
    })
}
