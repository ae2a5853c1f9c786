//! Diffusion distances for asymmetric kernels via tensor-basis coefficients.
//!
//! A kernel `k(x, y)` on `n` points is expanded in a tensor basis
//! `W_m1(x) W_m2(y)` ([`basis`]); distances, powers and embeddings are then
//! evaluated on the coefficient grid ([`diffusion`]). With the discrete
//! Fourier basis the expansion is a 2-D FFT. [`oracle`] holds the
//! brute-force and spectral references everything is checked against.

pub mod basis;
pub mod dataset;
pub mod diffusion;
pub mod error;
pub mod experiment;
pub mod kernel;
#[cfg(feature = "lapack")]
mod lapack;
pub mod oracle;

pub use basis::{
    forward_transform, inverse_transform, truncate, Basis, BasisKind, CoefficientGrid, GramTwist, TensorBasis,
    TruncationParams,
};
pub use dataset::{PointCloud, ScalarGrid};
pub use diffusion::{
    coeff_power, diffusion_distance_sq_repr, dynamic_distance_sq_repr, embed, global_distance_sq, run_algorithm1,
    weak_pipeline_distance_sq, DatasetSpec, DiffusionTime, Embedding,
};
pub use error::{Error, Result};
pub use kernel::{KernelMatrix, Normalization};

/// Real dense matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Complex dense matrix.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
