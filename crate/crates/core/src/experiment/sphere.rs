use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::slot_plane;
use super::stats::distance_matrix_correlation;
use crate::basis::{forward_transform, inverse_transform_complex, truncate, TensorBasis, TruncationParams};
use crate::dataset::PointCloud;
use crate::diffusion::{run_algorithm1, DatasetSpec, DiffusionTime, Embedding};
use crate::error::Result;
use crate::kernel::KernelMatrix;
use crate::oracle::{SpectralDecomp, TimingProtocol};

#[derive(Debug, Clone)]
pub struct SphereConfig {
    pub n: usize,
    pub seed: u64,
    pub t: DiffusionTime,
    /// Sizes for the error/time curves; empty to skip them.
    pub sweep: Vec<usize>,
    pub protocol: TimingProtocol,
}

impl Default for SphereConfig {
    fn default() -> Self {
        Self {
            n: 512,
            seed: 0,
            t: DiffusionTime::ONE,
            sweep: vec![64, 128, 256, 512],
            protocol: TimingProtocol::default(),
        }
    }
}

/// Cost and error of the two-coordinate representations at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSweepRow {
    pub n: usize,
    pub fourier_seconds: f64,
    pub eigen_seconds: f64,
    /// `‖ρ - ρ_r‖_F` keeping all `m1` and `|m2| <= 1`.
    pub fourier_l2_error: f64,
    /// `‖ρ - Σ_{j<2} λ_j φ_j φ_jᵀ‖_F`.
    pub eigen_l2_error: f64,
}

#[derive(Debug, Clone)]
pub struct SphereResult {
    /// Points ordered by the periodic parameter `v`.
    pub cloud: PointCloud,
    /// Markov-normalized Gaussian kernel.
    pub kernel: KernelMatrix,
    /// `(λ_j^t φ_j(x))` for the two largest `|λ_j|`.
    pub eigen_map: DMatrix<f64>,
    /// `(Re, Im)` of the first embedding component (`m2 = -1`, all `m1`).
    pub fourier_map: DMatrix<f64>,
    pub fourier_embedding: Embedding,
    pub truncation_residual: f64,
    /// Pearson correlation of the two maps' pairwise-distance matrices.
    pub distance_correlation: Option<f64>,
    pub sweep: Vec<SphereSweepRow>,
}

fn sweep_row(n: usize, seed: u64, protocol: &TimingProtocol) -> Result<SphereSweepRow> {
    let kernel = DatasetSpec::sphere(n, seed)?.build_kernel()?;
    let basis = TensorBasis::fourier(n)?;
    let (fourier_seconds, grid) = protocol.measure(|| forward_transform(&kernel, &basis))?;
    let (eigen_seconds, spectral) = protocol.measure(|| SpectralDecomp::new(&kernel))?;
    let kept = truncate(&grid, &basis, basis.max_radius(), 1.min(basis.max_radius()))?;
    let recon = inverse_transform_complex(&kept, &basis)?;
    let fourier_l2_error = kernel
        .entries()
        .iter()
        .zip(recon.iter())
        .map(|(k, r)| (r - k).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let eigen_l2_error = spectral.eigenvalues().iter().skip(2).map(|l| l * l).sum::<f64>().sqrt();
    Ok(SphereSweepRow {
        n,
        fourier_seconds,
        eigen_seconds,
        fourier_l2_error,
        eigen_l2_error,
    })
}

/// Eigenvector path versus Fourier path on a Markov-normalized sphere sample.
pub fn run_sphere(cfg: &SphereConfig) -> Result<SphereResult> {
    let spec = DatasetSpec::sphere(cfg.n, cfg.seed)?;
    let cloud = spec.points().expect("sphere spec holds points").clone();
    let full = cfg.n / 2;
    let k2 = 1.min(full);
    let out = run_algorithm1(&spec, cfg.t, &TruncationParams::new(full, k2, full))?;
    let fourier_map = slot_plane(&out.embedding, -(k2 as i64));

    let spectral = SpectralDecomp::new(&out.kernel)?;
    let eigen_map = spectral.diffusion_map(cfg.t, 2);
    let distance_correlation = distance_matrix_correlation(&eigen_map, &fourier_map);

    let sweep = cfg
        .sweep
        .iter()
        .map(|&n| sweep_row(n, cfg.seed, &cfg.protocol))
        .collect::<Result<Vec<_>>>()?;

    Ok(SphereResult {
        cloud,
        kernel: out.kernel,
        eigen_map,
        fourier_map,
        fourier_embedding: out.embedding,
        truncation_residual: out.diagnostics.truncation_residual,
        distance_correlation,
        sweep,
    })
}
