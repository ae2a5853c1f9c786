//! Divide-and-conquer SVD (`dgesdd`) from the system LAPACK.

use std::os::raw::{c_char, c_int};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
// Carries the link directive for the system OpenBLAS.
use openblas_src as _;

use crate::error::{Error, Result};

fn dim(v: usize) -> Result<c_int> {
    c_int::try_from(v).map_err(|_| Error::InvalidArgument(format!("dimension {v} exceeds the LAPACK index range")))
}

/// Thin SVD `a = U diag(s) Vᵀ`, singular values descending. Returns `(s, U, V)`.
pub(crate) fn gesdd(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let (m, n) = a.shape();
    let r = m.min(n);
    if r == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(m, 0), DMatrix::zeros(n, 0)));
    }
    let (mi, ni, ri) = (dim(m)?, dim(n)?, dim(r)?);
    // nalgebra storage is column-major, as LAPACK expects.
    let mut work_a = a.as_slice().to_vec();
    let mut s = vec![0.0; r];
    let mut u = vec![0.0; m * r];
    let mut vt = vec![0.0; r * n];
    let mut iwork = vec![0 as c_int; 8 * r];
    let jobz = b'S' as c_char;
    let mut info: c_int = 0;

    let mut query = [0.0f64];
    // SAFETY: every buffer is sized per the dgesdd contract for JOBZ = 'S';
    // lwork = -1 only writes the optimal size into `query`.
    unsafe {
        lapack_sys::dgesdd_(
            &jobz,
            &mi,
            &ni,
            work_a.as_mut_ptr(),
            &mi,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            &mi,
            vt.as_mut_ptr(),
            &ri,
            query.as_mut_ptr(),
            &-1,
            iwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::InvariantViolation(format!("dgesdd workspace query failed (info {info})")));
    }
    let lwork = query[0].max(1.0) as usize;
    let mut work = vec![0.0; lwork];
    let lwork_i = dim(lwork)?;
    // SAFETY: as above, with a workspace of the queried size.
    unsafe {
        lapack_sys::dgesdd_(
            &jobz,
            &mi,
            &ni,
            work_a.as_mut_ptr(),
            &mi,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            &mi,
            vt.as_mut_ptr(),
            &ri,
            work.as_mut_ptr(),
            &lwork_i,
            iwork.as_mut_ptr(),
            &mut info,
        );
    }
    match info {
        0 => {}
        i if i > 0 => return Err(Error::NoConvergence(format!("dgesdd, {m}x{n} (info {i})"))),
        i => return Err(Error::InvariantViolation(format!("dgesdd rejected argument {}", -i))),
    }
    let vt = DMatrix::from_column_slice(r, n, &vt);
    Ok((
        DVector::from_vec(s),
        DMatrix::from_column_slice(m, r, &u),
        vt.transpose(),
    ))
}

/// Whether the linked library returns correct decompositions. Some OpenBLAS
/// builds pick a kernel for the host CPU that silently corrupts results, so
/// the first call runs a few fixed matrices through [`gesdd`] and checks
/// orthonormality and reconstruction.
pub(crate) fn usable() -> bool {
    static USABLE: OnceLock<bool> = OnceLock::new();
    *USABLE.get_or_init(|| {
        let ok = self_test();
        if !ok {
            log::warn!(
                "system LAPACK failed its SVD self-test; using the built-in SVD \
                 (for OpenBLAS, setting OPENBLAS_CORETYPE may help)"
            );
        }
        ok
    })
}

fn self_test() -> bool {
    [(7, 7), (64, 64), (160, 160), (40, 25)].into_iter().all(|(m, n)| {
        let a = DMatrix::from_fn(m, n, |i, j| {
            ((i * 31 + j * 17) % 23) as f64 / 23.0 + if i == j { 0.5 } else { 0.0 }
        });
        let Ok((s, u, v)) = gesdd(&a) else {
            return false;
        };
        let r = s.len();
        let tol = 1e-10 * (m.max(n) as f64);
        let eye = DMatrix::<f64>::identity(r, r);
        (&u * DMatrix::from_diagonal(&s) * v.transpose() - &a).amax() <= tol * s[0]
            && (u.transpose() * &u - &eye).amax() <= tol
            && (v.transpose() * &v - &eye).amax() <= tol
    })
}
