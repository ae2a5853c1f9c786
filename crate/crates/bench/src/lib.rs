//! Shared fixtures for the criterion benchmarks.

use asymdiff::basis::{forward_transform, CoefficientGrid, TensorBasis};
use asymdiff::kernel::random_kernel;
use asymdiff::KernelMatrix;

/// Sizes benchmarked by default; the SVD dominates beyond these.
pub const SIZES: [usize; 3] = [64, 128, 256];

pub struct Fixture {
    pub kernel: KernelMatrix,
    pub basis: TensorBasis,
    pub coeffs: CoefficientGrid,
}

/// Random kernel of size `n` with its Fourier basis and coefficients.
pub fn fixture(n: usize) -> Fixture {
    let kernel = random_kernel(n, n as u64).expect("positive size");
    let basis = TensorBasis::fourier(n).expect("positive size");
    let coeffs = forward_transform(&kernel, &basis).expect("matching sizes");
    Fixture { kernel, basis, coeffs }
}
