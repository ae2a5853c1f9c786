//! Separable 2-D DFT on column-major complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

const BLOCK: usize = 32;

/// Cache-blocked transpose.
pub(crate) fn transpose(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (rows, cols) = m.shape();
    let src = m.as_slice();
    let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
    for cb in (0..cols).step_by(BLOCK) {
        for rb in (0..rows).step_by(BLOCK) {
            for c in cb..(cb + BLOCK).min(cols) {
                for r in rb..(rb + BLOCK).min(rows) {
                    // src is column-major rows x cols; out is column-major cols x rows.
                    out[r * cols + c] = src[c * rows + r];
                }
            }
        }
    }
    DMatrix::from_vec(cols, rows, out)
}

/// Unnormalized DFT of every column (the transform runs down the row index).
pub(crate) fn fft_columns(m: &mut DMatrix<Complex64>, direction: FftDirection) {
    let len = m.nrows();
    if len <= 1 || m.ncols() == 0 {
        return;
    }
    let fft = FftPlanner::new().plan_fft(len, direction);
    fft.process(m.as_mut_slice());
}

/// Unnormalized DFT of every row (the transform runs along the column index).
pub(crate) fn fft_rows(m: &mut DMatrix<Complex64>, direction: FftDirection) {
    if m.ncols() <= 1 {
        return;
    }
    let mut t = transpose(m);
    fft_columns(&mut t, direction);
    *m = transpose(&t);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::max_modulus;
    use std::f64::consts::PI;

    fn naive_dft_columns(m: &DMatrix<Complex64>, sign: f64) -> DMatrix<Complex64> {
        let n = m.nrows();
        DMatrix::from_fn(n, m.ncols(), |k, c| {
            (0..n)
                .map(|x| m[(x, c)] * Complex64::from_polar(1.0, sign * 2.0 * PI * (k * x) as f64 / n as f64))
                .sum()
        })
    }

    #[test]
    fn transpose_non_square() {
        let m = DMatrix::from_fn(37, 70, |r, c| Complex64::new(r as f64, c as f64));
        let t = transpose(&m);
        assert_eq!(t, m.transpose());
    }

    #[test]
    fn column_and_row_ffts_match_naive_sums() {
        let m = DMatrix::from_fn(6, 5, |r, c| Complex64::new((r * 5 + c) as f64 * 0.3, (r as f64 - c as f64).sin()));
        let mut a = m.clone();
        fft_columns(&mut a, FftDirection::Forward);
        assert!(max_modulus(&(a - naive_dft_columns(&m, -1.0))) < 1e-12);

        let mut b = m.clone();
        fft_rows(&mut b, FftDirection::Inverse);
        let expected = naive_dft_columns(&m.transpose(), 1.0).transpose();
        assert!(max_modulus(&(b - expected)) < 1e-12);
    }
}
