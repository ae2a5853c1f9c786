use nalgebra::DMatrix;

use super::slot_plane;
use super::stats::circular_linear_correlation;
use crate::basis::TruncationParams;
use crate::dataset::PointCloud;
use crate::diffusion::{run_algorithm1, BasisChoice, DatasetSpec, DiffusionTime, Embedding};
use crate::error::Result;
use crate::kernel::KernelMatrix;

#[derive(Debug, Clone)]
pub struct MobiusConfig {
    pub n: usize,
    pub seed: u64,
    pub t: DiffusionTime,
}

impl Default for MobiusConfig {
    fn default() -> Self {
        Self {
            n: 300,
            seed: 0,
            t: DiffusionTime::ONE,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MobiusResult {
    /// Points ordered by the periodic parameter `u`.
    pub cloud: PointCloud,
    /// Markov-normalized sign-weighted kernel.
    pub kernel: KernelMatrix,
    /// `‖K - Kᵀ‖_F / ‖K‖_F` of the raw and the normalized kernel.
    pub raw_relative_asymmetry: f64,
    pub relative_asymmetry: f64,
    /// `(Re, Im)` of the first embedding component (`m2 = -1`, all `m1`).
    pub fourier_map: DMatrix<f64>,
    /// `(c_1 L_1(x), c_2 L_2(x))` from the singular basis.
    pub svd_map: DMatrix<f64>,
    pub fourier_embedding: Embedding,
    pub svd_embedding: Embedding,
    /// Circular-linear correlation of `Re φ_1` with `u`.
    pub fourier_circular_correlation: f64,
    /// Circular-linear correlation of `c_1 L_1` with `u`.
    pub svd_circular_correlation: f64,
}

impl MobiusResult {
    /// `KᵀK`, the kernel the singular basis is optimal for.
    pub fn gram(&self) -> DMatrix<f64> {
        self.kernel.entries().transpose() * self.kernel.entries()
    }
}

/// Fourier path versus singular-basis path on the sign-weighted Möbius kernel.
pub fn run_mobius(cfg: &MobiusConfig) -> Result<MobiusResult> {
    let spec = DatasetSpec::mobius(cfg.n, cfg.seed)?;
    let cloud = spec.points().expect("möbius spec holds points").clone();
    let raw_relative_asymmetry = spec.clone().with_markov(false).build_kernel()?.relative_asymmetry();

    let full = cfg.n / 2;
    let k2 = 1.min(full);
    let p = TruncationParams::new(full, k2, full);
    let fourier = run_algorithm1(&spec, cfg.t, &p)?;
    let svd = run_algorithm1(&spec.with_basis(BasisChoice::Singular), cfg.t, &p)?;

    let fourier_map = slot_plane(&fourier.embedding, -(k2 as i64));
    let n = cfg.n;
    // Sequential slots 0 and +1 hold singular indices 0 and 1.
    let svd_map = DMatrix::from_fn(n, 2, |x, c| {
        if c == 0 || k2 == 0 {
            svd.embedding.slot(x, 0).re
        } else {
            svd.embedding.slot(x, 1).re
        }
    });

    let u = cloud.label_column(0).expect("möbius labels hold u");
    let fourier_first: Vec<f64> = fourier_map.column(0).iter().copied().collect();
    let svd_first: Vec<f64> = svd_map.column(0).iter().copied().collect();

    Ok(MobiusResult {
        relative_asymmetry: fourier.kernel.relative_asymmetry(),
        raw_relative_asymmetry,
        fourier_circular_correlation: circular_linear_correlation(&u, &fourier_first),
        svd_circular_correlation: circular_linear_correlation(&u, &svd_first),
        cloud,
        kernel: fourier.kernel,
        fourier_map,
        svd_map,
        fourier_embedding: fourier.embedding,
        svd_embedding: svd.embedding,
    })
}
