//! Kernel matrices on finite data sets (counting measure).

use std::io::{Read, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{PointCloud, ScalarGrid, UniformSampler};
use crate::error::{Error, Result};

/// Bandwidth used by the temperature experiments.
pub const DEFAULT_TEMPERATURE_TWO_SIGMA_SQ: f64 = 650.0;

const CONTAINER_MAGIC: &[u8; 8] = b"ASDKERN1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Raw,
    Markov,
}

impl Normalization {
    fn tag(self) -> u8 {
        match self {
            Normalization::Raw => 0,
            Normalization::Markov => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Normalization::Raw),
            1 => Ok(Normalization::Markov),
            _ => Err(Error::MalformedContainer(format!("unknown normalization tag {tag}"))),
        }
    }
}

/// A non-negative `n × n` kernel `k(x, y)` with `x` indexing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    entries: DMatrix<f64>,
    normalization: Normalization,
    provenance: String,
}

impl KernelMatrix {
    /// Validates squareness, finiteness and non-negativity.
    pub fn new(entries: DMatrix<f64>, normalization: Normalization, provenance: impl Into<String>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::SizeMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if entries.is_empty() {
            return Err(Error::InvalidArgument("kernel must have at least one point".into()));
        }
        for c in 0..entries.ncols() {
            for r in 0..entries.nrows() {
                let v = entries[(r, c)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry { row: r, col: c, value: v });
                }
            }
        }
        Ok(Self {
            entries,
            normalization,
            provenance: provenance.into(),
        })
    }

    pub fn raw(entries: DMatrix<f64>) -> Result<Self> {
        Self::new(entries, Normalization::Raw, "raw")
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Row volumes `v(x) = Σ_y k(x, y)`.
    pub fn volumes(&self) -> Vec<f64> {
        self.entries.row_iter().map(|r| r.sum()).collect()
    }

    /// `max |K - Kᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }

    /// `‖K - Kᵀ‖_F / ‖K‖_F`.
    pub fn relative_asymmetry(&self) -> f64 {
        let norm = self.entries.norm();
        if norm == 0.0 {
            0.0
        } else {
            (&self.entries - self.entries.transpose()).norm() / norm
        }
    }

    /// The `t`-step kernel `K^t` (binary powering). Normalization is kept.
    pub fn power(&self, t: u32) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("diffusion time must be >= 1".into()));
        }
        let mut result: Option<DMatrix<f64>> = None;
        let mut base = self.entries.clone();
        let mut e = t;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => &r * &base,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        let entries = result.expect("t >= 1");
        // Products of non-negative matrices are non-negative; clamp rounding dust.
        let entries = entries.map(|v| v.max(0.0));
        Self::new(entries, self.normalization, format!("({})^{t}", self.provenance))
    }

    /// Writes the binary container: magic, `n` (u64), normalization tag (u8),
    /// provenance length (u32) and UTF-8 bytes, then `n²` row-major f64.
    /// All integers and floats are little-endian.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(CONTAINER_MAGIC)?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        w.write_all(&[self.normalization.tag()])?;
        let prov = self.provenance.as_bytes();
        w.write_all(&(prov.len() as u32).to_le_bytes())?;
        w.write_all(prov)?;
        for r in 0..self.n() {
            for c in 0..self.n() {
                w.write_all(&self.entries[(r, c)].to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != CONTAINER_MAGIC {
            return Err(Error::MalformedContainer("bad kernel magic".into()));
        }
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf).map_err(truncated)?;
        let n = u64::from_le_bytes(u64buf) as usize;
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag).map_err(truncated)?;
        let normalization = Normalization::from_tag(tag[0])?;
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf).map_err(truncated)?;
        let mut prov = vec![0u8; u32::from_le_bytes(u32buf) as usize];
        r.read_exact(&mut prov).map_err(truncated)?;
        let provenance =
            String::from_utf8(prov).map_err(|_| Error::MalformedContainer("provenance is not UTF-8".into()))?;
        let mut values = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            r.read_exact(&mut u64buf).map_err(truncated)?;
            values.push(f64::from_le_bytes(u64buf));
        }
        Self::new(DMatrix::from_row_slice(n, n, &values), normalization, provenance)
    }

    /// Comma-separated rows, one kernel row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.row_iter() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::MalformedContainer("truncated container".into())
    } else {
        Error::Io(e)
    }
}

/// Builds an `n × n` matrix from a per-entry function, rows in parallel.
fn build_rows(n: usize, entry: impl Fn(usize, usize) -> f64 + Sync) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| entry(i, j)).collect())
        .collect();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

fn check_finite(cloud: &PointCloud) -> Result<()> {
    for (i, p) in cloud.points().iter().enumerate() {
        if let Some(j) = p.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: j });
        }
    }
    Ok(())
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_bandwidth(two_sigma_sq: f64) -> Result<()> {
    if !(two_sigma_sq > 0.0 && two_sigma_sq.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "two_sigma_sq must be positive and finite, got {two_sigma_sq}"
        )));
    }
    Ok(())
}

/// Entries i.i.d. uniform on `[0, 1)`, drawn row-major from the seeded
/// sampler. Generally asymmetric.
pub fn random_kernel(n: usize, seed: u64) -> Result<KernelMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("kernel must have at least one point".into()));
    }
    let mut rng = UniformSampler::new(seed);
    let values: Vec<f64> = (0..n * n).map(|_| rng.next_unit()).collect();
    KernelMatrix::new(DMatrix::from_row_slice(n, n, &values), Normalization::Raw, format!("random(n={n}, seed={seed})"))
}

/// `k(x, y) = exp(-‖x - y‖² / two_sigma_sq)`.
pub fn gaussian_kernel(cloud: &PointCloud, two_sigma_sq: f64) -> Result<KernelMatrix> {
    check_bandwidth(two_sigma_sq)?;
    check_finite(cloud)?;
    let pts = cloud.points();
    let entries = build_rows(cloud.len(), |i, j| (-squared_distance(&pts[i], &pts[j]) / two_sigma_sq).exp());
    KernelMatrix::new(entries, Normalization::Raw, format!("gaussian(2σ²={two_sigma_sq})"))
}

/// Sign of the azimuth `atan2(z₂, z₁)` of the first two components, with
/// `S = 0` when the azimuth is zero (including the zero vector).
pub fn azimuth_sign(z: &[f64]) -> f64 {
    if z[0] == 0.0 && z[1] == 0.0 {
        return 0.0;
    }
    // `+ 0.0` folds -0.0 into +0.0 so (-1, -0) has azimuth +π like (-1, 0).
    let angle = (z[1] + 0.0).atan2(z[0]);
    if angle > 0.0 {
        1.0
    } else if angle < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `k(x, y) = (S(x - y) + 1) exp(-‖x - y‖²)`, asymmetric in general.
pub fn sign_weighted_gaussian(cloud: &PointCloud) -> Result<KernelMatrix> {
    if cloud.dim() != 3 {
        return Err(Error::InvalidArgument(format!(
            "sign-weighted kernel needs 3-D points, got dimension {}",
            cloud.dim()
        )));
    }
    check_finite(cloud)?;
    let pts = cloud.points();
    let entries = build_rows(cloud.len(), |i, j| {
        let z = [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]];
        (azimuth_sign(&z) + 1.0) * (-squared_distance(&pts[i], &pts[j])).exp()
    });
    KernelMatrix::new(entries, Normalization::Raw, "sign-weighted gaussian")
}

/// `k(x, y) = values[x][y]` for a square, fully valid grid.
pub fn image_kernel(grid: &ScalarGrid) -> Result<KernelMatrix> {
    if grid.width() != grid.height() {
        return Err(Error::InvalidArgument(format!(
            "image kernel needs a square image, got {}x{}",
            grid.width(),
            grid.height()
        )));
    }
    if !grid.is_fully_valid() {
        return Err(Error::InvalidArgument("image kernel needs every pixel valid".into()));
    }
    KernelMatrix::new(grid.values().clone(), Normalization::Raw, "image")
}

/// Temperature kernel on the valid cells (row-major order) of a grid:
/// `K(p, q) = T(q) exp(-‖p - q‖² / two_sigma_sq) / √N` with integer
/// `(row, col)` coordinates. Fails on negative temperatures since kernels
/// must be non-negative.
pub fn temperature_kernel(grid: &ScalarGrid, two_sigma_sq: f64) -> Result<KernelMatrix> {
    check_bandwidth(two_sigma_sq)?;
    let cells = grid.valid_cells();
    let scale = 1.0 / (cells.len() as f64).sqrt();
    let temps: Vec<f64> = cells.iter().map(|&(r, c)| grid.value(r, c)).collect();
    let entries = build_rows(cells.len(), |p, q| {
        let dr = cells[p].0 as f64 - cells[q].0 as f64;
        let dc = cells[p].1 as f64 - cells[q].1 as f64;
        scale * temps[q] * (-(dr * dr + dc * dc) / two_sigma_sq).exp()
    });
    KernelMatrix::new(entries, Normalization::Raw, format!("temperature(2σ²={two_sigma_sq})"))
}

/// `ρ(x, y) = k(x, y) / (√v(x) √v(y))` with plain row sums as volumes.
pub fn markov_normalize(k: &KernelMatrix) -> Result<KernelMatrix> {
    let volumes = k.volumes();
    if let Some(row) = volumes.iter().position(|&v| v <= 0.0) {
        return Err(Error::ZeroVolume { row });
    }
    let roots: Vec<f64> = volumes.iter().map(|v| v.sqrt()).collect();
    let entries = DMatrix::from_fn(k.n(), k.n(), |x, y| k.entries[(x, y)] / (roots[x] * roots[y]));
    KernelMatrix::new(entries, Normalization::Markov, format!("markov({})", k.provenance))
}
