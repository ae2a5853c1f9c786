use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{coeff_power, embed_powered, DiffusionTime, Embedding};
use crate::basis::{forward_transform, truncation_residual, BasisKind, CoefficientGrid, TensorBasis, TruncationParams};
use crate::dataset::{generate_mobius, generate_sphere, load_grayscale_image, PointCloud, ScalarGrid};
use crate::error::Result;
use crate::kernel::{
    gaussian_kernel, image_kernel, markov_normalize, sign_weighted_gaussian, temperature_kernel, KernelMatrix,
};
use crate::oracle::{SpectralDecomp, SvdDecomp};

/// Kernel built on a point cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointKernel {
    Gaussian { two_sigma_sq: f64 },
    SignWeighted,
}

#[derive(Debug, Clone)]
pub enum DataSource {
    Points { cloud: PointCloud, kernel: PointKernel },
    Image(ScalarGrid),
    ImageFile(PathBuf),
    Temperature { grid: ScalarGrid, two_sigma_sq: f64 },
    Kernel(KernelMatrix),
}

/// Orthonormal basis used for the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    Fourier,
    /// Left/right singular vectors of the (powered) kernel.
    Singular,
    /// Eigenvectors of the (powered) kernel; requires symmetry.
    Eigen,
}

/// How time `t > 1` is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerPath {
    /// Matrix power for Markov kernels, coefficient power otherwise.
    #[default]
    Auto,
    Matrix,
    Coefficient,
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub source: DataSource,
    pub markov: bool,
    pub basis: BasisChoice,
    pub power_path: PowerPath,
}

impl DatasetSpec {
    pub fn new(source: DataSource, markov: bool) -> Self {
        Self {
            source,
            markov,
            basis: BasisChoice::Fourier,
            power_path: PowerPath::Auto,
        }
    }

    /// Sphere sample with `exp(-‖x-y‖²)`, Markov-normalized, points ordered by
    /// the periodic parameter `v`.
    pub fn sphere(n: usize, seed: u64) -> Result<Self> {
        let cloud = generate_sphere(n, seed)?.sorted_by_label(1)?;
        Ok(Self::new(
            DataSource::Points {
                cloud,
                kernel: PointKernel::Gaussian { two_sigma_sq: 1.0 },
            },
            true,
        ))
    }

    /// Möbius sample with the sign-weighted kernel, Markov-normalized,
    /// points ordered by the periodic parameter `u`.
    pub fn mobius(n: usize, seed: u64) -> Result<Self> {
        let cloud = generate_mobius(n, seed)?.sorted_by_label(0)?;
        Ok(Self::new(
            DataSource::Points {
                cloud,
                kernel: PointKernel::SignWeighted,
            },
            true,
        ))
    }

    pub fn with_basis(mut self, basis: BasisChoice) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_markov(mut self, markov: bool) -> Self {
        self.markov = markov;
        self
    }

    pub fn with_power_path(mut self, path: PowerPath) -> Self {
        self.power_path = path;
        self
    }

    pub fn points(&self) -> Option<&PointCloud> {
        match &self.source {
            DataSource::Points { cloud, .. } => Some(cloud),
            _ => None,
        }
    }

    /// Step 1: the kernel, normalized when requested.
    pub fn build_kernel(&self) -> Result<KernelMatrix> {
        let k = match &self.source {
            DataSource::Points { cloud, kernel } => match kernel {
                PointKernel::Gaussian { two_sigma_sq } => gaussian_kernel(cloud, *two_sigma_sq)?,
                PointKernel::SignWeighted => sign_weighted_gaussian(cloud)?,
            },
            DataSource::Image(grid) => image_kernel(grid)?,
            DataSource::ImageFile(path) => image_kernel(&load_grayscale_image(path)?)?,
            DataSource::Temperature { grid, two_sigma_sq } => temperature_kernel(grid, *two_sigma_sq)?,
            DataSource::Kernel(k) => k.clone(),
        };
        if self.markov {
            markov_normalize(&k)
        } else {
            Ok(k)
        }
    }
}

/// Wall-clock seconds per step, kept apart from the deterministic diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepTimings {
    pub kernel: f64,
    pub power: f64,
    pub coefficients: f64,
    pub embedding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n: usize,
    pub t: DiffusionTime,
    pub params: TruncationParams,
    pub basis: BasisKind,
    pub power_path: PowerPath,
    /// `‖c - truncate(c, k1, k2)‖_F / ‖c‖_F` on the time-`t` grid.
    pub truncation_residual: f64,
    pub kernel_relative_asymmetry: f64,
}

#[derive(Debug, Clone)]
pub struct AlgorithmOutput {
    /// The (normalized) one-step kernel.
    pub kernel: KernelMatrix,
    pub basis: TensorBasis,
    /// Time-`t` coefficients.
    pub powered: CoefficientGrid,
    pub embedding: Embedding,
    pub diagnostics: Diagnostics,
    pub timings: StepTimings,
}

fn basis_for(choice: BasisChoice, k: &KernelMatrix) -> Result<TensorBasis> {
    match choice {
        BasisChoice::Fourier => TensorBasis::fourier(k.n()),
        BasisChoice::Singular => SvdDecomp::new(k.entries())?.tensor_basis(),
        BasisChoice::Eigen => Ok(TensorBasis::uniform(SpectralDecomp::new(k)?.basis()?)),
    }
}

/// Kernel, optional `t`-step power, coefficients, embedding.
pub fn run_algorithm1(spec: &DatasetSpec, t: DiffusionTime, p: &TruncationParams) -> Result<AlgorithmOutput> {
    let mut timings = StepTimings::default();

    let start = Instant::now();
    let kernel = spec.build_kernel()?;
    timings.kernel = start.elapsed().as_secs_f64();
    p.validate(kernel.n())?;

    let path = match spec.power_path {
        PowerPath::Auto if spec.markov => PowerPath::Matrix,
        PowerPath::Auto => PowerPath::Coefficient,
        other => other,
    };

    let (basis, powered) = if path == PowerPath::Matrix {
        let start = Instant::now();
        let kt = kernel.power(t.get())?;
        timings.power = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let basis = basis_for(spec.basis, &kt)?;
        let grid = forward_transform(&kt, &basis)?;
        timings.coefficients = start.elapsed().as_secs_f64();
        (basis, grid)
    } else {
        let start = Instant::now();
        let basis = basis_for(spec.basis, &kernel)?;
        let grid = forward_transform(&kernel, &basis)?;
        timings.coefficients = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let powered = coeff_power(&grid, &basis, t, p.k3)?;
        timings.power = start.elapsed().as_secs_f64();
        (basis, powered)
    };

    let start = Instant::now();
    let embedding = embed_powered(&powered, &basis, t, p)?;
    timings.embedding = start.elapsed().as_secs_f64();

    let diagnostics = Diagnostics {
        n: kernel.n(),
        t,
        params: *p,
        basis: basis.row().kind(),
        power_path: path,
        truncation_residual: truncation_residual(&powered, &basis, p.k1, p.k2)?,
        kernel_relative_asymmetry: kernel.relative_asymmetry(),
    };
    Ok(AlgorithmOutput {
        kernel,
        basis,
        powered,
        embedding,
        diagnostics,
        timings,
    })
}
