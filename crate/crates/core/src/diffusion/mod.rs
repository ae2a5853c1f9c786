//! Diffusion distances evaluated from tensor-basis coefficients.
//!
//! Every distance here is a truncated form of
//!
//! ```text
//! f_{k1,k2}(a1, a2, x, y) = Σ_{|m2|<=k2} | Σ_{|m1|<=k1} a1(m1,m2) W_m1(x) - a2(m1,m2) W_m1(y) |²
//! ```
//!
//! where `|m|` is the basis order of an index (see [`crate::basis`]). At full
//! radius it is the squared cross-row distance `‖k1(x,·) - k2(y,·)‖²`.

mod algorithm;
mod embed;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{truncate, CoefficientGrid, TensorBasis, TruncationParams};
use crate::error::{Error, Result};

pub use algorithm::{
    run_algorithm1, AlgorithmOutput, BasisChoice, DataSource, DatasetSpec, Diagnostics, PointKernel, PowerPath, StepTimings,
};
pub use embed::{embed, embed_powered, Embedding};

/// Squared distances in `[-NEGATIVE_FLOOR, 0)` are rounding noise and clamp to zero.
pub const NEGATIVE_FLOOR: f64 = 1e-12;

/// A diffusion time `t >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct DiffusionTime(u32);

impl DiffusionTime {
    pub const ONE: DiffusionTime = DiffusionTime(1);

    pub fn new(t: u32) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("diffusion time must be at least 1".into()));
        }
        Ok(Self(t))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for DiffusionTime {
    type Error = Error;

    fn try_from(t: u32) -> Result<Self> {
        Self::new(t)
    }
}

impl From<DiffusionTime> for u32 {
    fn from(t: DiffusionTime) -> u32 {
        t.0
    }
}

pub(crate) fn clamp_sq(value: f64) -> f64 {
    if (-NEGATIVE_FLOOR..0.0).contains(&value) {
        log::debug!("clamping squared distance {value:e} to zero");
        0.0
    } else {
        value
    }
}

fn check_point(index: usize, n: usize) -> Result<()> {
    if index >= n {
        return Err(Error::IndexOutOfRange { index, n });
    }
    Ok(())
}

/// `f_{k1,k2}(a1, a2, x, y)` by direct summation.
pub fn pair_sum(
    a1: &CoefficientGrid,
    a2: &CoefficientGrid,
    basis: &TensorBasis,
    x: usize,
    y: usize,
    k1: usize,
    k2: usize,
) -> Result<f64> {
    a1.check_basis(basis)?;
    a2.check_compatible(a1)?;
    let n = basis.n();
    check_point(x, n)?;
    check_point(y, n)?;
    basis.row().check_radius(k1)?;
    basis.col().check_radius(k2)?;
    let rows = basis.row().indices_within(k1);
    let wx: Vec<Complex64> = rows.iter().map(|&m| basis.row().value(x, m)).collect();
    let wy: Vec<Complex64> = rows.iter().map(|&m| basis.row().value(y, m)).collect();
    let (c1, c2) = (a1.coeffs(), a2.coeffs());
    let total: f64 = basis
        .col()
        .indices_within(k2)
        .into_iter()
        .map(|m2| {
            let inner: Complex64 = rows
                .iter()
                .enumerate()
                .map(|(i, &m1)| c1[(m1, m2)] * wx[i] - c2[(m1, m2)] * wy[i])
                .sum();
            inner.norm_sqr()
        })
        .sum();
    Ok(clamp_sq(total))
}

/// Truncated squared diffusion distance `f_{k1,k2}(a, a, x, y)` at time 1
/// (powered grids give later times).
pub fn diffusion_distance_sq_repr(
    c: &CoefficientGrid,
    basis: &TensorBasis,
    x: usize,
    y: usize,
    p: &TruncationParams,
) -> Result<f64> {
    pair_sum(c, c, basis, x, y, p.k1, p.k2)
}

/// Truncated squared dynamic distance between `x` under kernel `γ` and `y`
/// under kernel `β`.
pub fn dynamic_distance_sq_repr(
    c_gamma: &CoefficientGrid,
    c_beta: &CoefficientGrid,
    basis: &TensorBasis,
    x: usize,
    y: usize,
    p: &TruncationParams,
) -> Result<f64> {
    pair_sum(c_gamma, c_beta, basis, x, y, p.k1, p.k2)
}

/// `h^t_{k3}(a)`: `t - 1` twisted products `h ← a_{k3} · G · h` where `a_{k3}`
/// keeps only the columns of `a` within radius `k3`, so every intermediate
/// summation index is restricted to that box.
pub fn coeff_power(c: &CoefficientGrid, basis: &TensorBasis, t: DiffusionTime, k3: usize) -> Result<CoefficientGrid> {
    c.check_basis(basis)?;
    basis.col().check_radius(k3)?;
    if t.get() == 1 {
        return Ok(c.clone());
    }
    let n = c.n();
    let mut masked = c.coeffs().clone();
    for col in 0..n {
        if !basis.col().in_radius(col, k3) {
            masked.column_mut(col).fill(Complex64::new(0.0, 0.0));
        }
    }
    let twist = basis.gram_twist();
    let mut h: DMatrix<Complex64> = c.coeffs().clone();
    for _ in 1..t.get() {
        h = &masked * twist.apply(&h);
    }
    CoefficientGrid::from_parts(h, basis)
}

/// The weak scheme: truncate both grids to the radius-`k` box, power them
/// inside that box, then evaluate `f_{k,k}`.
pub fn weak_pipeline_distance_sq(
    c_gamma: &CoefficientGrid,
    c_beta: &CoefficientGrid,
    basis: &TensorBasis,
    t: DiffusionTime,
    k: usize,
    x: usize,
    y: usize,
) -> Result<f64> {
    c_gamma.check_compatible(c_beta)?;
    let hg = coeff_power(&truncate(c_gamma, basis, k, k)?, basis, t, k)?;
    let hb = coeff_power(&truncate(c_beta, basis, k, k)?, basis, t, k)?;
    pair_sum(&hg, &hb, basis, x, y, k, k)
}

/// Squared global distance `‖h^t(a^γ) - h^t(a^β)‖_F²` at full radius.
pub fn global_distance_sq(
    c_gamma: &CoefficientGrid,
    c_beta: &CoefficientGrid,
    basis: &TensorBasis,
    t: DiffusionTime,
) -> Result<f64> {
    c_gamma.check_compatible(c_beta)?;
    let full = basis.max_radius();
    let hg = coeff_power(c_gamma, basis, t, full)?;
    let hb = coeff_power(c_beta, basis, t, full)?;
    Ok(clamp_sq((hg.coeffs() - hb.coeffs()).iter().map(|z| z.norm_sqr()).sum()))
}

/// `f_{k,k}(a, a, x, y)` for every pair, indexed `[x][y]`, computed in parallel.
pub fn distance_matrix_repr(c: &CoefficientGrid, basis: &TensorBasis, k1: usize, k2: usize) -> Result<DMatrix<f64>> {
    use rayon::prelude::*;
    let n = basis.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|x| (0..n).map(|y| pair_sum(c, c, basis, x, y, k1, k2)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n, n, |x, y| rows[x][y]))
}
