use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::{fft_columns, fft_rows};
use super::{Basis, BasisKind, IndexConvention, TensorBasis};
use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

const MAGIC: &[u8; 8] = b"ASDCOEF1";
/// Relative imaginary residue silently dropped by [`inverse_transform`].
pub const RESIDUE_SILENT: f64 = 1e-10;
/// Relative imaginary residue above which [`inverse_transform`] fails.
pub const RESIDUE_FATAL: f64 = 1e-6;

/// Tensor-basis coefficients `a(m1, m2)` stored at `coeffs[(m1, m2)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    coeffs: DMatrix<Complex64>,
    row_kind: BasisKind,
    col_kind: BasisKind,
    convention: IndexConvention,
}

impl CoefficientGrid {
    /// Wraps coefficients with respect to `basis`.
    pub fn from_parts(coeffs: DMatrix<Complex64>, basis: &TensorBasis) -> Result<Self> {
        let n = basis.n();
        if coeffs.shape() != (n, n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: if coeffs.nrows() != n { coeffs.nrows() } else { coeffs.ncols() },
            });
        }
        Ok(Self {
            coeffs,
            row_kind: basis.row().kind(),
            col_kind: basis.col().kind(),
            convention: basis.row().index_convention(),
        })
    }

    pub fn n(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DMatrix<Complex64> {
        self.coeffs
    }

    pub fn get(&self, m1: usize, m2: usize) -> Complex64 {
        self.coeffs[(m1, m2)]
    }

    pub fn row_kind(&self) -> BasisKind {
        self.row_kind
    }

    pub fn col_kind(&self) -> BasisKind {
        self.col_kind
    }

    pub fn convention(&self) -> IndexConvention {
        self.convention
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ |a(m1, m2)|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }

    /// Errors unless this grid was produced for a basis of the same size and kinds.
    pub fn check_basis(&self, basis: &TensorBasis) -> Result<()> {
        if self.n() != basis.n() {
            return Err(Error::SizeMismatch {
                expected: basis.n(),
                found: self.n(),
            });
        }
        if (self.row_kind, self.col_kind) != basis.kinds() {
            return Err(Error::IncompatibleGrids(format!(
                "grid is over {:?}/{:?}, basis is {:?}/{:?}",
                self.row_kind,
                self.col_kind,
                basis.row().kind(),
                basis.col().kind()
            )));
        }
        Ok(())
    }

    /// Errors unless `other` has the same size and basis kinds.
    pub fn check_compatible(&self, other: &CoefficientGrid) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        if (self.row_kind, self.col_kind) != (other.row_kind, other.col_kind) {
            return Err(Error::IncompatibleGrids("coefficient grids use different bases".into()));
        }
        Ok(())
    }

    /// Little-endian container: magic, `u64` n, row/col kind and convention
    /// tags, then row-major `(re, im)` pairs.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        let convention = match self.convention {
            IndexConvention::Centered => 0u8,
            IndexConvention::Sequential => 1u8,
        };
        w.write_all(&[self.row_kind.tag(), self.col_kind.tag(), convention])?;
        let n = self.n();
        let mut buf = Vec::with_capacity(n * n * 16);
        for r in 0..n {
            for c in 0..n {
                let z = self.coeffs[(r, c)];
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| Error::MalformedContainer("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(Error::MalformedContainer("bad magic".into()));
        }
        let mut n_bytes = [0u8; 8];
        r.read_exact(&mut n_bytes)
            .map_err(|_| Error::MalformedContainer("truncated header".into()))?;
        let n = usize::try_from(u64::from_le_bytes(n_bytes))
            .map_err(|_| Error::MalformedContainer("size overflows".into()))?;
        let mut tags = [0u8; 3];
        r.read_exact(&mut tags)
            .map_err(|_| Error::MalformedContainer("truncated header".into()))?;
        let row_kind = BasisKind::from_tag(tags[0])?;
        let col_kind = BasisKind::from_tag(tags[1])?;
        let convention = match tags[2] {
            0 => IndexConvention::Centered,
            1 => IndexConvention::Sequential,
            t => return Err(Error::MalformedContainer(format!("unknown convention tag {t}"))),
        };
        let len = n
            .checked_mul(n)
            .and_then(|v| v.checked_mul(16))
            .ok_or_else(|| Error::MalformedContainer("size overflows".into()))?;
        let mut body = Vec::new();
        r.take(len as u64).read_to_end(&mut body)?;
        if body.len() != len {
            return Err(Error::MalformedContainer(format!(
                "expected {len} payload bytes, found {}",
                body.len()
            )));
        }
        let f = |i: usize| f64::from_le_bytes(body[i * 8..i * 8 + 8].try_into().expect("8 bytes"));
        let coeffs = DMatrix::from_fn(n, n, |row, col| {
            let k = row * n + col;
            Complex64::new(f(2 * k), f(2 * k + 1))
        });
        Ok(Self {
            coeffs,
            row_kind,
            col_kind,
            convention,
        })
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

/// `Uᴴ m` along the row index.
fn analyze_rows(m: &mut DMatrix<Complex64>, basis: &Basis) {
    match basis.explicit_vectors() {
        None => {
            fft_columns(m, FftDirection::Forward);
            *m /= Complex64::new((basis.n() as f64).sqrt(), 0.0);
        }
        Some(u) => *m = u.adjoint() * &*m,
    }
}

/// `m conj(U)` along the column index.
fn analyze_cols(m: &mut DMatrix<Complex64>, basis: &Basis) {
    match basis.explicit_vectors() {
        None => {
            fft_rows(m, FftDirection::Forward);
            *m /= Complex64::new((basis.n() as f64).sqrt(), 0.0);
        }
        Some(u) => *m = &*m * u.conjugate(),
    }
}

/// `U m` along the row index.
pub(crate) fn synthesize_rows(m: &mut DMatrix<Complex64>, basis: &Basis) {
    match basis.explicit_vectors() {
        None => {
            fft_columns(m, FftDirection::Inverse);
            *m /= Complex64::new((basis.n() as f64).sqrt(), 0.0);
        }
        Some(u) => *m = u * &*m,
    }
}

/// `m Uᵀ` along the column index.
fn synthesize_cols(m: &mut DMatrix<Complex64>, basis: &Basis) {
    match basis.explicit_vectors() {
        None => {
            fft_rows(m, FftDirection::Inverse);
            *m /= Complex64::new((basis.n() as f64).sqrt(), 0.0);
        }
        Some(u) => *m = &*m * u.transpose(),
    }
}

/// Coefficients `C = U_rowᴴ K conj(U_col)`; FFT-backed for Fourier factors.
pub fn forward_transform(kernel: &KernelMatrix, basis: &TensorBasis) -> Result<CoefficientGrid> {
    if kernel.n() != basis.n() {
        return Err(Error::SizeMismatch {
            expected: basis.n(),
            found: kernel.n(),
        });
    }
    let mut m = kernel.entries().map(|v| Complex64::new(v, 0.0));
    analyze_rows(&mut m, basis.row());
    analyze_cols(&mut m, basis.col());
    CoefficientGrid::from_parts(m, basis)
}

/// `K = U_row C U_colᵀ` without discarding the imaginary part.
pub fn inverse_transform_complex(grid: &CoefficientGrid, basis: &TensorBasis) -> Result<DMatrix<Complex64>> {
    grid.check_basis(basis)?;
    let mut m = grid.coeffs().clone();
    synthesize_rows(&mut m, basis.row());
    synthesize_cols(&mut m, basis.col());
    Ok(m)
}

/// A real reconstruction and the imaginary part it discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub values: DMatrix<f64>,
    /// `max |Im|` relative to `max(1, max |Re|)`.
    pub imag_residue: f64,
}

/// Real reconstruction. A relative imaginary residue above
/// [`RESIDUE_FATAL`] is an error; one above [`RESIDUE_SILENT`] is logged.
pub fn inverse_transform(grid: &CoefficientGrid, basis: &TensorBasis) -> Result<Reconstruction> {
    let m = inverse_transform_complex(grid, basis)?;
    let scale = m.iter().map(|z| z.re.abs()).fold(1.0, f64::max);
    let residue = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale;
    if residue > RESIDUE_FATAL {
        return Err(Error::ImaginaryResidue { residue });
    }
    if residue > RESIDUE_SILENT {
        log::warn!("discarding imaginary residue {residue:.3e} in reconstruction");
    }
    Ok(Reconstruction {
        values: m.map(|z| z.re),
        imag_residue: residue,
    })
}

/// Zeroes coefficients whose row order exceeds `k1` or column order exceeds `k2`.
pub fn truncate(grid: &CoefficientGrid, basis: &TensorBasis, k1: usize, k2: usize) -> Result<CoefficientGrid> {
    grid.check_basis(basis)?;
    basis.row().check_radius(k1)?;
    basis.col().check_radius(k2)?;
    let mut out = grid.clone();
    let n = grid.n();
    for c in 0..n {
        let keep_col = basis.col().in_radius(c, k2);
        for r in 0..n {
            if !keep_col || !basis.row().in_radius(r, k1) {
                out.coeffs[(r, c)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(out)
}

/// `‖c - truncate(c)‖_F / ‖c‖_F`, zero for an all-zero grid.
pub fn truncation_residual(grid: &CoefficientGrid, basis: &TensorBasis, k1: usize, k2: usize) -> Result<f64> {
    let kept = truncate(grid, basis, k1, k2)?;
    let total = grid.frobenius_norm();
    if total == 0.0 {
        return Ok(0.0);
    }
    let dropped = (grid.coeffs() - kept.coeffs()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(dropped / total)
}
