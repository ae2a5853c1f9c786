use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{clamp_sq, coeff_power, DiffusionTime};
use crate::basis::{synthesize_rows, CoefficientGrid, TensorBasis, TruncationParams};
use crate::dataset::PointCloud;
use crate::error::{Error, Result};

/// The map `x ↦ φ_{k1,k2}(x) ∈ ℂ^{2k2+1}`.
///
/// Component `i` (0-based) carries the signed column slot `s = i - k2`:
/// `φ(x)(i) = Σ_{|m1|<=k1} h(m1, m2(s)) W_m1(x)`, where `h` is the powered
/// grid and `m2(s)` is [`crate::basis::Basis::slot_index`]. Slots without an
/// index of their own are identically zero, so squared Euclidean distances
/// between embedded points are exactly `f_{k1,k2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    vectors: DMatrix<Complex64>,
    time: DiffusionTime,
    params: TruncationParams,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// Row `x` is the embedded point `φ(x)`.
    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn time(&self) -> DiffusionTime {
        self.time
    }

    pub fn params(&self) -> TruncationParams {
        self.params
    }

    pub fn component(&self, x: usize, i: usize) -> Complex64 {
        self.vectors[(x, i)]
    }

    /// Component for signed slot `s ∈ [-k2, k2]`.
    pub fn slot(&self, x: usize, s: i64) -> Complex64 {
        self.vectors[(x, (s + self.params.k2 as i64) as usize)]
    }

    pub fn sq_distance(&self, x: usize, y: usize) -> f64 {
        let d: f64 = (0..self.dim())
            .map(|i| (self.vectors[(x, i)] - self.vectors[(y, i)]).norm_sqr())
            .sum();
        clamp_sq(d)
    }

    /// `‖φ(x) - φ(y)‖²` for all pairs.
    pub fn pairwise_sq_distances(&self) -> DMatrix<f64> {
        let n = self.n();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|x| (0..n).map(|y| self.sq_distance(x, y)).collect())
            .collect();
        DMatrix::from_fn(n, n, |x, y| rows[x][y])
    }

    /// CSV with `point_index`, `coord_<i>_re`, `coord_<i>_im` columns, then
    /// label columns when `labels` is given.
    pub fn write_csv<W: Write>(&self, w: W, labels: Option<&PointCloud>) -> Result<()> {
        if let Some(cloud) = labels {
            if cloud.len() != self.n() {
                return Err(Error::SizeMismatch {
                    expected: self.n(),
                    found: cloud.len(),
                });
            }
        }
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["point_index".to_string()];
        for i in 0..self.dim() {
            header.push(format!("coord_{i}_re"));
            header.push(format!("coord_{i}_im"));
        }
        if let Some(cloud) = labels {
            header.extend(cloud.label_names().iter().cloned());
        }
        out.write_record(&header).map_err(csv_error)?;
        for x in 0..self.n() {
            let mut record = vec![x.to_string()];
            for i in 0..self.dim() {
                let z = self.vectors[(x, i)];
                record.push(format!("{:e}", z.re));
                record.push(format!("{:e}", z.im));
            }
            if let Some(cloud) = labels {
                record.extend(cloud.labels()[x].iter().map(|v| format!("{v:e}")));
            }
            out.write_record(&record).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

/// Embeds with `h = coeff_power(c, t, k3)`.
pub fn embed(c: &CoefficientGrid, basis: &TensorBasis, t: DiffusionTime, p: &TruncationParams) -> Result<Embedding> {
    p.validate(basis.n())?;
    let powered = coeff_power(c, basis, t, p.k3)?;
    embed_powered(&powered, basis, t, p)
}

/// Embeds a grid that already holds the time-`t` coefficients.
pub fn embed_powered(
    powered: &CoefficientGrid,
    basis: &TensorBasis,
    t: DiffusionTime,
    p: &TruncationParams,
) -> Result<Embedding> {
    powered.check_basis(basis)?;
    p.validate(basis.n())?;
    let n = basis.n();
    let mut proj = powered.coeffs().clone();
    for m1 in 0..n {
        if !basis.row().in_radius(m1, p.k1) {
            proj.row_mut(m1).fill(Complex64::new(0.0, 0.0));
        }
    }
    synthesize_rows(&mut proj, basis.row());
    let k2 = p.k2 as i64;
    let slots: Vec<Option<usize>> = (-k2..=k2).map(|s| basis.col().slot_index(s)).collect();
    let vectors = DMatrix::from_fn(n, slots.len(), |x, i| match slots[i] {
        Some(m2) => proj[(x, m2)],
        None => Complex64::new(0.0, 0.0),
    });
    Ok(Embedding {
        vectors,
        time: t,
        params: *p,
    })
}
