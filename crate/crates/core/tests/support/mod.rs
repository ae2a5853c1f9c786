//! Naive references written from the definitions, independent of the library
//! code paths they check.

#![allow(dead_code)]

use std::f64::consts::PI;

use asymdiff::dataset::{generate_sphere, ScalarGrid};
use asymdiff::kernel::{gaussian_kernel, image_kernel, markov_normalize, random_kernel, temperature_kernel};
use asymdiff::{DatasetSpec, KernelMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// `e^{2πimx/n}/√n`.
pub fn fourier(n: usize, x: usize, m: usize) -> Complex64 {
    let phase = 2.0 * PI * ((m * x) % n) as f64 / n as f64;
    Complex64::from_polar(1.0 / (n as f64).sqrt(), phase)
}

/// Signed frequency of index `m`: `m` below `(n+1)/2`, `m - n` above.
pub fn centered(m: usize, n: usize) -> i64 {
    if m < n.div_ceil(2) {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// `C(m1, m2) = Σ_x Σ_y k(x, y) conj(W_m1(x)) conj(W_m2(y))`.
pub fn naive_coefficients(k: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = k.nrows();
    let w = DMatrix::from_fn(n, n, |x, m| fourier(n, x, m).conj());
    DMatrix::from_fn(n, n, |m1, m2| {
        let mut s = Complex64::new(0.0, 0.0);
        for x in 0..n {
            for y in 0..n {
                s += k[(x, y)] * w[(x, m1)] * w[(y, m2)];
            }
        }
        s
    })
}

/// `k(x, y) = Σ_{m1} Σ_{m2} C(m1, m2) W_m1(x) W_m2(y)`.
pub fn naive_synthesis(c: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = c.nrows();
    let w = DMatrix::from_fn(n, n, |x, m| fourier(n, x, m));
    DMatrix::from_fn(n, n, |x, y| {
        let mut s = Complex64::new(0.0, 0.0);
        for m1 in 0..n {
            for m2 in 0..n {
                s += c[(m1, m2)] * w[(x, m1)] * w[(y, m2)];
            }
        }
        s
    })
}

/// Zeroes every coefficient outside `|m1| <= k1`, `|m2| <= k2`.
pub fn box_truncate(c: &DMatrix<Complex64>, k1: usize, k2: usize) -> DMatrix<Complex64> {
    let n = c.nrows();
    DMatrix::from_fn(n, n, |m1, m2| {
        if centered(m1, n).unsigned_abs() as usize <= k1 && centered(m2, n).unsigned_abs() as usize <= k2 {
            c[(m1, m2)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn real_power(k: &DMatrix<f64>, t: u32) -> DMatrix<f64> {
    let mut out = k.clone();
    for _ in 1..t {
        let mut next = DMatrix::zeros(k.nrows(), k.ncols());
        for i in 0..k.nrows() {
            for j in 0..k.ncols() {
                next[(i, j)] = (0..k.ncols()).map(|l| out[(i, l)] * k[(l, j)]).sum();
            }
        }
        out = next;
    }
    out
}

pub fn complex_power(k: &DMatrix<Complex64>, t: u32) -> DMatrix<Complex64> {
    let mut out = k.clone();
    for _ in 1..t {
        let mut next = DMatrix::zeros(k.nrows(), k.ncols());
        for i in 0..k.nrows() {
            for j in 0..k.ncols() {
                next[(i, j)] = (0..k.ncols()).map(|l| out[(i, l)] * k[(l, j)]).sum();
            }
        }
        out = next;
    }
    out
}

/// `Σ_z (a(x, z) - b(y, z))²`.
pub fn cross_rows(a: &DMatrix<f64>, x: usize, b: &DMatrix<f64>, y: usize) -> f64 {
    (0..a.ncols()).map(|z| (a[(x, z)] - b[(y, z)]).powi(2)).sum()
}

pub fn cross_rows_complex(a: &DMatrix<Complex64>, x: usize, b: &DMatrix<Complex64>, y: usize) -> f64 {
    (0..a.ncols()).map(|z| (a[(x, z)] - b[(y, z)]).norm_sqr()).sum()
}

/// All-pairs `‖k^t(x, ·) - k^t(y, ·)‖²`.
pub fn brute_distances(k: &DMatrix<f64>, t: u32) -> DMatrix<f64> {
    let kt = real_power(k, t);
    let n = k.nrows();
    DMatrix::from_fn(n, n, |x, y| cross_rows(&kt, x, &kt, y))
}

/// `max |a - b| / max |b|`.
pub fn max_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(f64::MIN_POSITIVE)
}

pub fn max_abs_complex(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

/// Smooth 32×32 test image with a bright disk, values in `(0, 1]`.
pub fn test_image(n: usize) -> ScalarGrid {
    ScalarGrid::dense(DMatrix::from_fn(n, n, |r, c| {
        let (y, x) = (r as f64 / n as f64, c as f64 / n as f64);
        let disk = if (y - 0.4).hypot(x - 0.6) < 0.25 { 0.3 } else { 0.0 };
        (0.35 + 0.2 * (5.0 * x).sin() * (3.0 * y).cos() + 0.1 * y + disk).clamp(0.05, 1.0)
    }))
    .expect("finite image")
}

/// A small masked temperature field: fewer than `side²` valid cells.
pub fn temperature_fixture(side: usize) -> KernelMatrix {
    let grid = asymdiff::dataset::synth_temperature_field(side, side, "2012", 11).expect("valid size");
    temperature_kernel(&grid, 650.0).expect("valid grid")
}

pub struct Fixture {
    pub name: String,
    pub kernel: KernelMatrix,
}

fn fixture(name: impl Into<String>, kernel: KernelMatrix) -> Fixture {
    Fixture {
        name: name.into(),
        kernel,
    }
}

/// Sphere Markov 64, Möbius sign 64, random asymmetric 8/16/32, image 32×32,
/// plus a masked temperature field.
pub fn fixture_families() -> Vec<Fixture> {
    let mut out = vec![
        fixture("sphere-64", DatasetSpec::sphere(64, 0).unwrap().build_kernel().unwrap()),
        fixture("mobius-64", DatasetSpec::mobius(64, 0).unwrap().build_kernel().unwrap()),
    ];
    for n in [8, 16, 32] {
        out.push(fixture(format!("random-{n}"), random_kernel(n, n as u64).unwrap()));
    }
    out.push(fixture(
        "image-32",
        markov_normalize(&image_kernel(&test_image(32)).unwrap()).unwrap(),
    ));
    out.push(fixture("temperature", temperature_fixture(8)));
    out
}

/// Asymmetric kernels with at most 32 points.
pub fn asymmetric_small() -> Vec<Fixture> {
    let mut out: Vec<Fixture> = [8, 16, 32]
        .into_iter()
        .map(|n| fixture(format!("random-{n}"), random_kernel(n, 100 + n as u64).unwrap()))
        .collect();
    out.push(fixture("mobius-32", DatasetSpec::mobius(32, 1).unwrap().build_kernel().unwrap()));
    out.push(fixture("temperature", temperature_fixture(6)));
    out
}

/// Symmetric Markov-normalized kernels with at most 64 points.
pub fn symmetric_markov() -> Vec<Fixture> {
    let gaussian = |n: usize, seed: u64, s: f64| {
        markov_normalize(&gaussian_kernel(&generate_sphere(n, seed).unwrap(), s).unwrap()).unwrap()
    };
    vec![
        fixture("sphere-64", DatasetSpec::sphere(64, 0).unwrap().build_kernel().unwrap()),
        fixture("sphere-32", DatasetSpec::sphere(32, 5).unwrap().build_kernel().unwrap()),
        fixture("unsorted-gaussian-48", gaussian(48, 9, 0.5)),
    ]
}
