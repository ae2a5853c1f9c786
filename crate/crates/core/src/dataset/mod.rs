//! Point clouds and scalar grids: synthetic generators and file ingestion.
//!
//! Random draws come from ChaCha8 seeded with `seed_from_u64(seed)`; each
//! uniform variate on `[0, 1)` is `(next_u64() >> 11) * 2^-53`. Both choices
//! are fixed so fixtures can be regenerated bit-for-bit in other languages.

mod grid_csv;
mod pgm;
mod temperature;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

pub use grid_csv::{load_scalar_csv, write_scalar_csv};
pub use pgm::{load_grayscale_image, save_grayscale_image};
pub use temperature::synth_temperature_field;

/// Seeded uniform sampler with a documented, portable output stream.
#[derive(Debug, Clone)]
pub struct UniformSampler {
    rng: ChaCha8Rng,
}

impl UniformSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform variate on `[0, 1)` with 53 random bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform variate on `[lo, hi)`.
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }

    /// Uniform index in `0..len` (`len > 0`).
    pub fn next_index(&mut self, len: usize) -> usize {
        ((self.next_unit() * len as f64) as usize).min(len - 1)
    }
}

/// A finite set of points in `R^d`, optionally carrying per-point labels
/// (for the synthetic surfaces, the `(u, v)` parameters that produced them).
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    label_names: Vec<String>,
    labels: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_labels(points, Vec::new(), Vec::new())
    }

    pub fn with_labels(
        points: Vec<Vec<f64>>,
        label_names: Vec<String>,
        labels: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("point cloud is empty".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("points must have dimension >= 1".into()));
        }
        if let Some(bad) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "point {bad} has dimension {}, expected {dim}",
                points[bad].len()
            )));
        }
        if !label_names.is_empty() || !labels.is_empty() {
            if labels.len() != points.len() {
                return Err(Error::SizeMismatch {
                    expected: points.len(),
                    found: labels.len(),
                });
            }
            if let Some(bad) = labels.iter().position(|l| l.len() != label_names.len()) {
                return Err(Error::InvalidArgument(format!(
                    "label row {bad} has {} values, expected {}",
                    labels[bad].len(),
                    label_names.len()
                )));
            }
        }
        Ok(Self {
            dim,
            points,
            label_names,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Per-point labels; empty when the cloud carries none.
    pub fn labels(&self) -> &[Vec<f64>] {
        &self.labels
    }

    /// Column `index` of the labels, if present.
    pub fn label_column(&self, index: usize) -> Option<Vec<f64>> {
        (index < self.label_names.len()).then(|| self.labels.iter().map(|l| l[index]).collect())
    }

    /// Reorders points (stably) by ascending value of label column `index`.
    pub fn sorted_by_label(&self, index: usize) -> Result<Self> {
        if index >= self.label_names.len() {
            return Err(Error::InvalidArgument(format!("no label column {index}")));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.labels[a][index].total_cmp(&self.labels[b][index]));
        Ok(Self {
            dim: self.dim,
            points: order.iter().map(|&i| self.points[i].clone()).collect(),
            label_names: self.label_names.clone(),
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
        })
    }
}

/// Sphere parametrization `(cos u sin v, sin u sin v, cos v)`.
pub fn sphere_point(u: f64, v: f64) -> [f64; 3] {
    [u.cos() * v.sin(), u.sin() * v.sin(), v.cos()]
}

/// Möbius strip parametrization with half-width `v`.
pub fn mobius_point(u: f64, v: f64) -> [f64; 3] {
    let r = 1.0 + 0.5 * v * (0.5 * u).cos();
    [r * u.cos(), r * u.sin(), 0.5 * v * (0.5 * u).sin()]
}

fn sample_surface(
    n: usize,
    seed: u64,
    u_range: (f64, f64),
    v_range: (f64, f64),
    surface: fn(f64, f64) -> [f64; 3],
) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidArgument("point count must be positive".into()));
    }
    let mut sampler = UniformSampler::new(seed);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u = sampler.next_in(u_range.0, u_range.1);
        let v = sampler.next_in(v_range.0, v_range.1);
        points.push(surface(u, v).to_vec());
        labels.push(vec![u, v]);
    }
    PointCloud::with_labels(points, vec!["u".into(), "v".into()], labels)
}

/// `n` points on the unit sphere, parameters uniform on `[0, π] × [0, 2π]`.
pub fn generate_sphere(n: usize, seed: u64) -> Result<PointCloud> {
    sample_surface(n, seed, (0.0, PI), (0.0, 2.0 * PI), sphere_point)
}

/// `n` points on the Möbius strip, parameters uniform on `[0, 2π] × [-1/2, 1/2]`.
pub fn generate_mobius(n: usize, seed: u64) -> Result<PointCloud> {
    sample_surface(n, seed, (0.0, 2.0 * PI), (-0.5, 0.5), mobius_point)
}

/// A rectangular raster of real values with a validity mask. Row 0 is the
/// top of the grid. Cells outside the mask hold `NaN`.
#[derive(Debug, Clone)]
pub struct ScalarGrid {
    values: DMatrix<f64>,
    mask: DMatrix<bool>,
}

/// Grids are equal when their masks agree and valid cells hold equal values.
impl PartialEq for ScalarGrid {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask
            && self
                .values
                .iter()
                .zip(other.values.iter())
                .zip(self.mask.iter())
                .all(|((a, b), &m)| !m || a == b)
    }
}

impl ScalarGrid {
    pub fn new(values: DMatrix<f64>, mask: DMatrix<bool>) -> Result<Self> {
        if values.shape() != mask.shape() {
            return Err(Error::InvalidArgument(format!(
                "values {:?} and mask {:?} differ in shape",
                values.shape(),
                mask.shape()
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidArgument("grid has zero dimensions".into()));
        }
        let mut any = false;
        for r in 0..values.nrows() {
            for c in 0..values.ncols() {
                if mask[(r, c)] {
                    any = true;
                    if !values[(r, c)].is_finite() {
                        return Err(Error::NonFinite { row: r, col: c });
                    }
                }
            }
        }
        if !any {
            return Err(Error::InvalidArgument("grid has no valid cells".into()));
        }
        Ok(Self { values, mask })
    }

    /// Grid with every cell valid.
    pub fn dense(values: DMatrix<f64>) -> Result<Self> {
        let mask = DMatrix::from_element(values.nrows(), values.ncols(), true);
        Self::new(values, mask)
    }

    pub fn width(&self) -> usize {
        self.values.ncols()
    }

    pub fn height(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn mask(&self) -> &DMatrix<bool> {
        &self.mask
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[(row, col)]
    }

    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.mask[(row, col)]
    }

    pub fn is_fully_valid(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    /// Valid cells as `(row, col)` in row-major order. This is the data-point
    /// order used by grid-derived kernels.
    pub fn valid_cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for r in 0..self.height() {
            for c in 0..self.width() {
                if self.mask[(r, c)] {
                    cells.push((r, c));
                }
            }
        }
        cells
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}
