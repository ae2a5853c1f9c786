//! Reference computations: brute-force row distances, the symmetric
//! spectral form, singular-basis coefficients and the FFT-vs-SVD timing
//! comparison.

use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{forward_transform, inverse_transform_complex, truncate, Basis, BasisKind, CoefficientGrid, TensorBasis};
use crate::diffusion::DiffusionTime;
use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

/// Largest `max |K - Kᵀ|` admitted by [`SpectralDecomp::new`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// `K^t` by `t - 1` successive multiplications.
pub fn matrix_power_repeated(k: &DMatrix<f64>, t: DiffusionTime) -> DMatrix<f64> {
    let mut out = k.clone();
    for _ in 1..t.get() {
        out = &out * k;
    }
    out
}

/// `Σ_z (a[x][z] - b[y][z])²`.
pub fn cross_row_distance_sq(a: &DMatrix<f64>, x: usize, b: &DMatrix<f64>, y: usize) -> f64 {
    (0..a.ncols()).map(|z| (a[(x, z)] - b[(y, z)]).powi(2)).sum()
}

fn check_pair(n: usize, x: usize, y: usize) -> Result<()> {
    for index in [x, y] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    Ok(())
}

/// `‖k^t(x,·) - k^t(y,·)‖²`.
pub fn brute_distance_sq(k: &KernelMatrix, t: DiffusionTime, x: usize, y: usize) -> Result<f64> {
    check_pair(k.n(), x, y)?;
    let kt = matrix_power_repeated(k.entries(), t);
    Ok(cross_row_distance_sq(&kt, x, &kt, y))
}

/// `‖k_γ^t(x,·) - k_β^t(y,·)‖²`.
pub fn brute_dynamic_distance_sq(
    k_gamma: &KernelMatrix,
    k_beta: &KernelMatrix,
    t: DiffusionTime,
    x: usize,
    y: usize,
) -> Result<f64> {
    check_same_size(k_gamma, k_beta)?;
    check_pair(k_gamma.n(), x, y)?;
    let g = matrix_power_repeated(k_gamma.entries(), t);
    let b = matrix_power_repeated(k_beta.entries(), t);
    Ok(cross_row_distance_sq(&g, x, &b, y))
}

/// All pairwise `‖k^t(x,·) - k^t(y,·)‖²`.
pub fn brute_distance_matrix(k: &KernelMatrix, t: DiffusionTime) -> DMatrix<f64> {
    let kt = matrix_power_repeated(k.entries(), t);
    let n = k.n();
    DMatrix::from_fn(n, n, |x, y| cross_row_distance_sq(&kt, x, &kt, y))
}

/// `‖K_γ^t - K_β^t‖_F²`.
pub fn brute_global_distance_sq(k_gamma: &KernelMatrix, k_beta: &KernelMatrix, t: DiffusionTime) -> Result<f64> {
    check_same_size(k_gamma, k_beta)?;
    let diff = matrix_power_repeated(k_gamma.entries(), t) - matrix_power_repeated(k_beta.entries(), t);
    Ok(diff.norm_squared())
}

fn check_same_size(a: &KernelMatrix, b: &KernelMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}

fn iteration_cap(n: usize) -> usize {
    1000 * n.max(1) + 10_000
}

/// Which power of `λ` weights the spectral sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralExponent {
    /// `λ^{2t}`: exact against the row-difference distance.
    #[default]
    Doubled,
    /// `λ^t`, the exponent as printed in the original formula.
    Printed,
}

/// Eigenpairs of a symmetric kernel, sorted by descending `|λ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomp {
    eigenvalues: DVector<f64>,
    /// Column `j` is `φ_j`.
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomp {
    pub fn new(k: &KernelMatrix) -> Result<Self> {
        let deviation = k.asymmetry();
        if deviation > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { deviation });
        }
        let n = k.n();
        let eig = SymmetricEigen::try_new(k.entries().clone(), f64::EPSILON, iteration_cap(n))
            .ok_or_else(|| Error::NoConvergence(format!("symmetric eigensolver, n={n}")))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&j| eig.eigenvalues[j]));
        let mut eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        // Fix signs so the largest-magnitude entry of each vector is positive.
        for mut col in eigenvectors.column_iter_mut() {
            let pivot = col.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            if pivot < 0.0 {
                col.neg_mut();
            }
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// The eigenvectors as a real orthonormal basis.
    pub fn basis(&self) -> Result<Basis> {
        Basis::from_real(BasisKind::Eigen, &self.eigenvectors)
    }

    /// `Σ_j λ_j^e (φ_j(x) - φ_j(y))²` with `e = 2t` or `t`.
    pub fn distance_sq(&self, t: DiffusionTime, x: usize, y: usize, exponent: SpectralExponent) -> Result<f64> {
        check_pair(self.n(), x, y)?;
        let e = match exponent {
            SpectralExponent::Doubled => 2 * t.get(),
            SpectralExponent::Printed => t.get(),
        } as i32;
        Ok((0..self.n())
            .map(|j| self.eigenvalues[j].powi(e) * (self.eigenvectors[(x, j)] - self.eigenvectors[(y, j)]).powi(2))
            .sum())
    }

    /// The diffusion map `x ↦ (λ_j^t φ_j(x))_{j < dims}`.
    pub fn diffusion_map(&self, t: DiffusionTime, dims: usize) -> DMatrix<f64> {
        let dims = dims.min(self.n());
        let scale: Vec<f64> = (0..dims).map(|j| self.eigenvalues[j].powi(t.get() as i32)).collect();
        DMatrix::from_fn(self.n(), dims, |x, j| scale[j] * self.eigenvectors[(x, j)])
    }
}

/// See [`SpectralDecomp::distance_sq`].
pub fn spectral_distance_sq(
    s: &SpectralDecomp,
    t: DiffusionTime,
    x: usize,
    y: usize,
    exponent: SpectralExponent,
) -> Result<f64> {
    s.distance_sq(t, x, y, exponent)
}

/// `A = Σ c_i L_i R_iᵀ`, singular values descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdDecomp {
    singular_values: DVector<f64>,
    /// Column `i` is `L_i`.
    left: DMatrix<f64>,
    /// Column `i` is `R_i`.
    right: DMatrix<f64>,
}

impl SvdDecomp {
    /// Uses LAPACK `dgesdd` with the `lapack` feature when the linked library
    /// passes its self-test, nalgebra's SVD otherwise.
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        #[cfg(feature = "lapack")]
        let (singular_values, left, right) = if crate::lapack::usable() {
            crate::lapack::gesdd(a)?
        } else {
            native_svd(a)?
        };
        #[cfg(not(feature = "lapack"))]
        let (singular_values, left, right) = native_svd(a)?;
        Ok(Self {
            singular_values,
            left,
            right,
        })
    }

    pub fn singular_values(&self) -> &DVector<f64> {
        &self.singular_values
    }

    pub fn left(&self) -> &DMatrix<f64> {
        &self.left
    }

    pub fn right(&self) -> &DMatrix<f64> {
        &self.right
    }

    /// `Σ_{i<r} c_i L_i R_iᵀ`.
    pub fn rank_truncation(&self, r: usize) -> DMatrix<f64> {
        let r = r.min(self.singular_values.len());
        let l = self.left.columns(0, r);
        let scaled = DMatrix::from_fn(r, self.right.nrows(), |i, y| self.singular_values[i] * self.right[(y, i)]);
        l * scaled
    }

    /// `√(Σ_{i>=r} c_i²)`: the Frobenius error of the rank-`r` truncation.
    pub fn tail_norm(&self, r: usize) -> f64 {
        self.singular_values.iter().skip(r).map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Row basis `{L_i}` and column basis `{R_i}`.
    pub fn tensor_basis(&self) -> Result<TensorBasis> {
        TensorBasis::new(
            Basis::from_real(BasisKind::SingularLeft, &self.left)?,
            Basis::from_real(BasisKind::SingularRight, &self.right)?,
        )
    }
}

fn native_svd(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let svd = SVD::try_new_unordered(a.clone(), true, true, f64::EPSILON, iteration_cap(n))
        .ok_or_else(|| Error::NoConvergence(format!("SVD, n={n}")))?;
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::NoConvergence("SVD returned no singular vectors".into()));
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    Ok((
        DVector::from_iterator(order.len(), order.iter().map(|&i| svd.singular_values[i])),
        DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]),
        DMatrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)]),
    ))
}

/// Singular-basis coefficients and what it took to get them.
#[derive(Debug, Clone)]
pub struct SvdCoefficients {
    /// Diagonal, `a(i, i) = c_i`.
    pub grid: CoefficientGrid,
    pub basis: TensorBasis,
    pub decomp: SvdDecomp,
    /// Wall-clock seconds of the decomposition.
    pub seconds: f64,
}

pub fn svd_coefficients(k: &KernelMatrix) -> Result<SvdCoefficients> {
    let start = Instant::now();
    let decomp = SvdDecomp::new(k.entries())?;
    let seconds = start.elapsed().as_secs_f64();
    let basis = decomp.tensor_basis()?;
    let n = k.n();
    let coeffs = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(decomp.singular_values[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let grid = CoefficientGrid::from_parts(coeffs, &basis)?;
    Ok(SvdCoefficients {
        grid,
        basis,
        decomp,
        seconds,
    })
}

/// Warm-up runs are discarded; the reported time is the minimum over repeats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingProtocol {
    pub warmup: usize,
    pub repeats: usize,
}

impl Default for TimingProtocol {
    fn default() -> Self {
        Self { warmup: 1, repeats: 3 }
    }
}

impl TimingProtocol {
    /// Runs `f` under the protocol; returns the best time and the last result.
    pub fn measure<T>(&self, mut f: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
        for _ in 0..self.warmup {
            f()?;
        }
        let mut best = f64::INFINITY;
        let mut last = None;
        for _ in 0..self.repeats.max(1) {
            let start = Instant::now();
            let out = f()?;
            best = best.min(start.elapsed().as_secs_f64());
            last = Some(out);
        }
        Ok((best, last.expect("at least one repeat")))
    }
}

/// `"lapack"` when [`SvdDecomp`] runs on the system LAPACK, `"nalgebra"` otherwise.
pub fn svd_backend() -> &'static str {
    #[cfg(feature = "lapack")]
    if crate::lapack::usable() {
        return "lapack";
    }
    "nalgebra"
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineInfo {
    pub os: String,
    pub arch: String,
    pub available_parallelism: usize,
    pub clock: String,
    /// See [`svd_backend`].
    pub svd_backend: String,
}

impl MachineInfo {
    pub fn current() -> Self {
        Self {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            available_parallelism: std::thread::available_parallelism().map_or(1, |p| p.get()),
            clock: "monotonic (std::time::Instant)".into(),
            svd_backend: svd_backend().into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationPath {
    Fft,
    Svd,
}

/// One row of the comparison: `M_B = E · seconds / N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeEntry {
    pub order: usize,
    pub path: RepresentationPath,
    pub seconds: f64,
    pub l2_error: f64,
    #[serde(rename = "M_B")]
    pub m_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeReport {
    pub n: usize,
    pub protocol: TimingProtocol,
    pub machine: MachineInfo,
    /// Best time of the full 2-D FFT coefficient computation.
    pub fft_coefficient_seconds: f64,
    /// Best time of the full SVD.
    pub svd_coefficient_seconds: f64,
    pub entries: Vec<TimeEntry>,
}

impl TimeReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `n,order,path,seconds,l2_error,M_B` rows.
    pub fn to_csv(&self, header: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str("n,order,path,seconds,l2_error,M_B\n");
        }
        for e in &self.entries {
            let path = match e.path {
                RepresentationPath::Fft => "fft",
                RepresentationPath::Svd => "svd",
            };
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{:e}\n",
                self.n, e.order, path, e.seconds, e.l2_error, e.m_b
            ));
        }
        out
    }
}

/// `M_B = E · t / N`.
pub fn performance_metric(error: f64, seconds: f64, n: usize) -> f64 {
    if error == 0.0 {
        return 0.0;
    }
    error * seconds / n as f64
}

/// Best-of-protocol times for the full Fourier coefficients and the full SVD.
pub fn time_coefficients(k: &KernelMatrix, protocol: &TimingProtocol) -> Result<(f64, f64)> {
    let basis = TensorBasis::fourier(k.n())?;
    let (fft, _) = protocol.measure(|| forward_transform(k, &basis))?;
    let (svd, _) = protocol.measure(|| SvdDecomp::new(k.entries()))?;
    Ok((fft, svd))
}

/// For each order `r`: the Fourier path keeps the full `m1` range and
/// `|m2| <= r`, the SVD path keeps rank `2r + 1`; both are timed end to end
/// and their reconstructions compared with `K` in Frobenius norm.
pub fn time_comparison(k: &KernelMatrix, orders: &[usize], protocol: &TimingProtocol) -> Result<TimeReport> {
    if orders.is_empty() {
        return Err(Error::InvalidArgument("time comparison needs at least one order".into()));
    }
    let n = k.n();
    let basis = TensorBasis::fourier(n)?;
    for &r in orders {
        basis.col().check_radius(r)?;
    }
    let full = basis.max_radius();
    let target = k.entries().map(|v| Complex64::new(v, 0.0));

    let (fft_coefficient_seconds, grid) = protocol.measure(|| forward_transform(k, &basis))?;
    let (svd_coefficient_seconds, decomp) = protocol.measure(|| SvdDecomp::new(k.entries()))?;

    let mut entries = Vec::with_capacity(2 * orders.len());
    for &r in orders {
        let (tail, recon) = protocol.measure(|| {
            let kept = truncate(&grid, &basis, full, r)?;
            inverse_transform_complex(&kept, &basis)
        })?;
        let err = (&target - recon).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let seconds = fft_coefficient_seconds + tail;
        entries.push(TimeEntry {
            order: r,
            path: RepresentationPath::Fft,
            seconds,
            l2_error: err,
            m_b: performance_metric(err, seconds, n),
        });

        let rank = (2 * r + 1).min(n);
        let (tail, recon) = protocol.measure(|| Ok(decomp.rank_truncation(rank)))?;
        let err = (k.entries() - recon).norm();
        let seconds = svd_coefficient_seconds + tail;
        entries.push(TimeEntry {
            order: r,
            path: RepresentationPath::Svd,
            seconds,
            l2_error: err,
            m_b: performance_metric(err, seconds, n),
        });
    }
    Ok(TimeReport {
        n,
        protocol: *protocol,
        machine: MachineInfo::current(),
        fft_coefficient_seconds,
        svd_coefficient_seconds,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::random_kernel;
    use proptest::prelude::*;

    fn t(v: u32) -> DiffusionTime {
        DiffusionTime::new(v).unwrap()
    }

    fn symmetric(n: usize, seed: u64) -> KernelMatrix {
        let r = random_kernel(n, seed).unwrap();
        KernelMatrix::raw(r.entries() + r.entries().transpose()).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let k = KernelMatrix::raw(DMatrix::identity(3, 3) * 2.0).unwrap();
        assert_eq!(brute_distance_sq(&k, t(2), 0, 1).unwrap(), 32.0);
        assert_eq!(brute_distance_sq(&k, t(2), 1, 1).unwrap(), 0.0);
        let id = KernelMatrix::raw(DMatrix::identity(4, 4)).unwrap();
        for s in 1..5 {
            assert_eq!(brute_distance_sq(&id, t(s), 0, 3).unwrap(), 2.0);
        }
        assert!(brute_distance_sq(&id, t(1), 0, 4).is_err());
    }

    #[test]
    fn spectral_doubled_exponent_is_exact() {
        let k = symmetric(8, 4);
        let s = SpectralDecomp::new(&k).unwrap();
        for time in [1, 2, 3] {
            for (x, y) in [(0, 1), (2, 7), (5, 5)] {
                let brute = brute_distance_sq(&k, t(time), x, y).unwrap();
                let spec = spectral_distance_sq(&s, t(time), x, y, SpectralExponent::Doubled).unwrap();
                assert!((brute - spec).abs() <= 1e-8 * brute.max(1.0), "t={time}: {brute} vs {spec}");
            }
        }
        let id = SpectralDecomp::new(&KernelMatrix::raw(DMatrix::identity(5, 5)).unwrap()).unwrap();
        assert!(id.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-12));
        assert!((id.distance_sq(t(3), 1, 4, SpectralExponent::Printed).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_invariants_and_guard() {
        let k = symmetric(10, 8);
        let s = SpectralDecomp::new(&k).unwrap();
        let phi = s.eigenvectors();
        assert!((phi.transpose() * phi - DMatrix::identity(10, 10)).amax() < 1e-10);
        for j in 0..10 {
            let residual = (k.entries() * phi.column(j) - phi.column(j) * s.eigenvalues()[j]).amax();
            assert!(residual <= 1e-8 * k.entries().norm());
        }
        for w in s.eigenvalues().as_slice().windows(2) {
            assert!(w[0].abs() >= w[1].abs());
        }
        let asym = random_kernel(4, 1).unwrap();
        assert!(matches!(SpectralDecomp::new(&asym), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn svd_examples() {
        let id = svd_coefficients(&KernelMatrix::raw(DMatrix::identity(4, 4)).unwrap()).unwrap();
        assert!(id.decomp.singular_values().iter().all(|&c| (c - 1.0).abs() < 1e-12));

        let u = DVector::from_vec(vec![1.0, 2.0, 0.5]);
        let v = DVector::from_vec(vec![3.0, 0.0, 1.0]);
        let rank_one = KernelMatrix::raw(&u * v.transpose()).unwrap();
        let svd = svd_coefficients(&rank_one).unwrap();
        let c = svd.decomp.singular_values();
        assert!((c[0] - u.norm() * v.norm()).abs() < 1e-12);
        assert!(c[1].abs() < 1e-12 && c[2].abs() < 1e-12);
    }

    #[test]
    fn svd_reconstruction_and_eckart_young() {
        let k = random_kernel(12, 3).unwrap();
        let svd = SvdDecomp::new(k.entries()).unwrap();
        let norm = k.entries().norm();
        assert!((k.entries() - svd.rank_truncation(12)).norm() <= 1e-8 * norm);
        for r in 0..12 {
            let err = (k.entries() - svd.rank_truncation(r)).norm();
            assert!((err - svd.tail_norm(r)).abs() <= 1e-8 * norm);
        }
        let coeffs = svd_coefficients(&k).unwrap();
        let back = crate::basis::inverse_transform(&coeffs.grid, &coeffs.basis).unwrap();
        assert!((back.values - k.entries()).amax() <= 1e-10);
    }

    #[test]
    fn svd_distances_match_brute_force() {
        let k = random_kernel(9, 21).unwrap();
        let coeffs = svd_coefficients(&k).unwrap();
        let p = crate::basis::TruncationParams::full(9);
        for (x, y) in [(0, 8), (3, 4)] {
            let repr = crate::diffusion::diffusion_distance_sq_repr(&coeffs.grid, &coeffs.basis, x, y, &p).unwrap();
            let brute = brute_distance_sq(&k, t(1), x, y).unwrap();
            assert!((repr - brute).abs() <= 1e-8 * brute);
        }
    }

    #[test]
    fn time_comparison_reports_exact_full_order() {
        let k = random_kernel(16, 2).unwrap();
        let protocol = TimingProtocol { warmup: 0, repeats: 1 };
        let report = time_comparison(&k, &[0, 3, 8], &protocol).unwrap();
        assert_eq!(report.entries.len(), 6);
        for e in report.entries.iter().filter(|e| e.order == 8) {
            assert!(e.l2_error <= 1e-8, "{e:?}");
        }
        for e in report.entries.iter().filter(|e| e.order == 0) {
            assert!(e.l2_error > 0.0 && e.m_b > 0.0);
        }
        assert!(report.to_csv(true).starts_with("n,order,path,seconds,l2_error,M_B\n16,0,fft,"));
        assert!(report.to_json().unwrap().contains("\"M_B\""));
        assert!(time_comparison(&k, &[], &protocol).is_err());
        assert!(time_comparison(&k, &[9], &protocol).is_err());
        assert_eq!(performance_metric(0.0, 3.0, 10), 0.0);
    }

    proptest! {
        #[test]
        fn brute_distance_is_a_squared_pseudometric(seed in any::<u64>(), x in 0usize..6, y in 0usize..6, z in 0usize..6) {
            let k = random_kernel(6, seed).unwrap();
            let d = brute_distance_matrix(&k, t(2));
            prop_assert_eq!(d[(x, x)], 0.0);
            prop_assert!((d[(x, y)] - d[(y, x)]).abs() <= 1e-12 * d[(x, y)].max(1.0));
            prop_assert!(d[(x, z)].sqrt() <= d[(x, y)].sqrt() + d[(y, z)].sqrt() + 1e-9);
        }
    }
}
