//! Orthonormal bases of functions on `n` points and the tensor-product
//! coefficient transform.
//!
//! A basis is stored as (or implied by) a unitary matrix `U` with
//! `U[x][m] = W_m(x)`. Coefficients of a kernel use conjugation on both
//! factors,
//!
//! ```text
//! a(m1, m2) = Σ_{x,y} k(x, y) conj(W_m1(x)) conj(W_m2(y))   (C = Uᴴ K conj(U))
//! k(x, y)   = Σ a(m1, m2) W_m1(x) W_m2(y)                  (K = U C Uᵀ)
//! ```
//!
//! so reconstruction uses the plain product of basis values. Kernel
//! composition in coefficient space is then `C ∘ C' = C G C'` with the Gram
//! twist `G = U_colᵀ U_row`: the identity for real bases and the
//! frequency-negation permutation for the Fourier basis.
//!
//! Truncation radii refer to an index *order*. For the Fourier basis, the
//! order of index `m` is `|m|` under centered frequencies
//! `{-⌊n/2⌋, …, ⌈n/2⌉-1}`; for explicit bases, index `j` has order `⌈j/2⌉`.
//! Either way a radius `k` retains `min(2k+1, n)` indices, and `⌊n/2⌋`
//! retains all of them.

mod coefficients;
pub(crate) mod fft;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coefficients::{
    forward_transform, inverse_transform, inverse_transform_complex, truncate, truncation_residual,
    CoefficientGrid, Reconstruction,
};
pub(crate) use coefficients::synthesize_rows;

/// Tolerance on `UᴴU = I` for explicit bases.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Fourier,
    SingularLeft,
    SingularRight,
    Eigen,
}

impl BasisKind {
    pub(crate) fn tag(self) -> u8 {
        match self {
            BasisKind::Fourier => 0,
            BasisKind::SingularLeft => 1,
            BasisKind::SingularRight => 2,
            BasisKind::Eigen => 3,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            0 => BasisKind::Fourier,
            1 => BasisKind::SingularLeft,
            2 => BasisKind::SingularRight,
            3 => BasisKind::Eigen,
            _ => return Err(Error::MalformedContainer(format!("unknown basis tag {tag}"))),
        })
    }

    pub fn index_convention(self) -> IndexConvention {
        match self {
            BasisKind::Fourier => IndexConvention::Centered,
            _ => IndexConvention::Sequential,
        }
    }
}

/// How basis indices map to truncation orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// Index `m` is the frequency `m` (or `m - n` above the midpoint).
    Centered,
    /// Index `j` has order `⌈j/2⌉`.
    Sequential,
}

/// An orthonormal basis `{W_m}` of functions on `n` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    n: usize,
    kind: BasisKind,
    /// Explicit `U[x][m]`; `None` for the Fourier basis.
    vectors: Option<DMatrix<Complex64>>,
    real: bool,
}

impl Basis {
    /// `W_m(x) = e^{2πi m x / n} / √n`.
    pub fn fourier(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("basis size must be positive".into()));
        }
        Ok(Self {
            n,
            kind: BasisKind::Fourier,
            vectors: None,
            real: n <= 2,
        })
    }

    /// Wraps explicit column vectors, checking orthonormality.
    pub fn explicit(kind: BasisKind, vectors: DMatrix<Complex64>) -> Result<Self> {
        if kind == BasisKind::Fourier {
            return Err(Error::InvalidArgument("use Basis::fourier for the Fourier basis".into()));
        }
        let n = vectors.nrows();
        if n == 0 || vectors.ncols() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: vectors.ncols(),
            });
        }
        let deviation = max_modulus(&(vectors.adjoint() * &vectors - DMatrix::<Complex64>::identity(n, n)));
        if deviation > ORTHONORMALITY_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        let real = vectors.iter().all(|z| z.im == 0.0);
        Ok(Self {
            n,
            kind,
            vectors: Some(vectors),
            real,
        })
    }

    /// Explicit basis from real orthonormal columns.
    pub fn from_real(kind: BasisKind, vectors: &DMatrix<f64>) -> Result<Self> {
        Self::explicit(kind, vectors.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn is_fourier(&self) -> bool {
        self.kind == BasisKind::Fourier
    }

    /// True when every basis function is real-valued.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn index_convention(&self) -> IndexConvention {
        self.kind.index_convention()
    }

    /// `W_m(x)`.
    pub fn value(&self, x: usize, m: usize) -> Complex64 {
        match &self.vectors {
            Some(u) => u[(x, m)],
            None => {
                let phase = 2.0 * PI * ((m * x) % self.n) as f64 / self.n as f64;
                Complex64::from_polar(1.0 / (self.n as f64).sqrt(), phase)
            }
        }
    }

    /// The matrix `U` with `U[x][m] = W_m(x)`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        match &self.vectors {
            Some(u) => u.clone(),
            None => DMatrix::from_fn(self.n, self.n, |x, m| self.value(x, m)),
        }
    }

    pub(crate) fn explicit_vectors(&self) -> Option<&DMatrix<Complex64>> {
        self.vectors.as_ref()
    }

    /// `M` with `|W_m(x)| <= M` for all `m`, `x`.
    pub fn uniform_bound(&self) -> f64 {
        match &self.vectors {
            Some(u) => u.iter().map(|z| z.norm()).fold(0.0, f64::max),
            None => 1.0 / (self.n as f64).sqrt(),
        }
    }

    /// Largest meaningful truncation radius, `⌊n/2⌋`.
    pub fn max_radius(&self) -> usize {
        self.n / 2
    }

    /// Centered frequency of index `m` (Fourier convention).
    pub fn centered(&self, m: usize) -> i64 {
        let m = m as i64;
        let n = self.n as i64;
        if m < (n + 1) / 2 {
            m
        } else {
            m - n
        }
    }

    /// Truncation order of index `m`.
    pub fn order(&self, m: usize) -> usize {
        match self.index_convention() {
            IndexConvention::Centered => self.centered(m).unsigned_abs() as usize,
            IndexConvention::Sequential => m.div_ceil(2),
        }
    }

    pub fn in_radius(&self, m: usize, k: usize) -> bool {
        self.order(m) <= k
    }

    /// Indices of order `<= k`, ascending.
    pub fn indices_within(&self, k: usize) -> Vec<usize> {
        (0..self.n).filter(|&m| self.in_radius(m, k)).collect()
    }

    /// Basis index occupying signed slot `s` of an embedding, or `None` when
    /// the slot has no distinct index of its own. Fourier slots are
    /// frequencies (for even `n`, slot `+n/2` aliases `-n/2` and is empty);
    /// sequential slots run `0, +1, -1, +2, -2, …` over indices `0, 1, 2, …`.
    pub fn slot_index(&self, s: i64) -> Option<usize> {
        let n = self.n as i64;
        match self.index_convention() {
            IndexConvention::Centered => {
                let m = s.rem_euclid(n) as usize;
                (self.centered(m) == s).then_some(m)
            }
            IndexConvention::Sequential => {
                let j = if s > 0 { 2 * s - 1 } else { -2 * s };
                (j < n).then_some(j as usize)
            }
        }
    }

    pub(crate) fn check_radius(&self, k: usize) -> Result<()> {
        if k > self.max_radius() {
            return Err(Error::RadiusTooLarge {
                radius: k,
                max: self.max_radius(),
            });
        }
        Ok(())
    }
}

/// Largest entry modulus of a complex matrix.
pub fn max_modulus(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `W_m(x) = e^{2πi m x / n} / √n`.
pub fn fourier_basis(n: usize) -> Result<Basis> {
    Basis::fourier(n)
}

/// The matrix `G = U_colᵀ U_row` (plain transpose) that turns kernel
/// composition into `C G C'` in coefficient space.
#[derive(Debug, Clone, PartialEq)]
pub enum GramTwist {
    Identity(usize),
    /// `G[j][perm[j]] = 1`, zero elsewhere.
    Permutation(Vec<usize>),
    Dense(DMatrix<Complex64>),
}

impl GramTwist {
    pub fn between(row: &Basis, col: &Basis) -> Result<Self> {
        if row.n() != col.n() {
            return Err(Error::SizeMismatch {
                expected: row.n(),
                found: col.n(),
            });
        }
        let n = row.n();
        if row.is_fourier() && col.is_fourier() {
            return Ok(GramTwist::Permutation((0..n).map(|j| (n - j) % n).collect()));
        }
        let g = col.matrix().transpose() * row.matrix();
        if max_modulus(&(&g - DMatrix::<Complex64>::identity(n, n))) <= 1e-12 {
            Ok(GramTwist::Identity(n))
        } else {
            Ok(GramTwist::Dense(g))
        }
    }

    pub fn n(&self) -> usize {
        match self {
            GramTwist::Identity(n) => *n,
            GramTwist::Permutation(p) => p.len(),
            GramTwist::Dense(g) => g.nrows(),
        }
    }

    /// `G · m`.
    pub fn apply(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        match self {
            GramTwist::Identity(_) => m.clone(),
            GramTwist::Permutation(p) => DMatrix::from_fn(m.nrows(), m.ncols(), |j, c| m[(p[j], c)]),
            GramTwist::Dense(g) => g * m,
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        match self {
            GramTwist::Identity(n) => DMatrix::identity(*n, *n),
            GramTwist::Permutation(p) => {
                let mut g = DMatrix::zeros(p.len(), p.len());
                for (j, &l) in p.iter().enumerate() {
                    g[(j, l)] = Complex64::new(1.0, 0.0);
                }
                g
            }
            GramTwist::Dense(g) => g.clone(),
        }
    }
}

/// `G = Uᵀ U` for a single basis used on both tensor factors.
pub fn gram_twist(b: &Basis) -> GramTwist {
    GramTwist::between(b, b).expect("same basis has matching size")
}

/// The tensor basis `W_m1(x) W_m2(y)` built from a row basis and a column basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorBasis {
    row: Basis,
    col: Basis,
    twist: GramTwist,
}

impl TensorBasis {
    pub fn new(row: Basis, col: Basis) -> Result<Self> {
        let twist = GramTwist::between(&row, &col)?;
        Ok(Self { row, col, twist })
    }

    pub fn uniform(b: Basis) -> Self {
        let twist = gram_twist(&b);
        Self {
            col: b.clone(),
            row: b,
            twist,
        }
    }

    pub fn fourier(n: usize) -> Result<Self> {
        Ok(Self::uniform(Basis::fourier(n)?))
    }

    pub fn n(&self) -> usize {
        self.row.n()
    }

    pub fn row(&self) -> &Basis {
        &self.row
    }

    pub fn col(&self) -> &Basis {
        &self.col
    }

    pub fn gram_twist(&self) -> &GramTwist {
        &self.twist
    }

    pub fn max_radius(&self) -> usize {
        self.row.max_radius()
    }

    pub fn kinds(&self) -> (BasisKind, BasisKind) {
        (self.row.kind(), self.col.kind())
    }
}

/// Radii for the `m1` sums (`k1`), the `m2` sums (`k2`) and the inner sums
/// of coefficient powers (`k3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub k1: usize,
    pub k2: usize,
    pub k3: usize,
}

impl TruncationParams {
    pub fn new(k1: usize, k2: usize, k3: usize) -> Self {
        Self { k1, k2, k3 }
    }

    /// Every radius at `⌊n/2⌋`: no truncation.
    pub fn full(n: usize) -> Self {
        let k = n / 2;
        Self { k1: k, k2: k, k3: k }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let max = n / 2;
        for radius in [self.k1, self.k2, self.k3] {
            if radius > max {
                return Err(Error::RadiusTooLarge { radius, max });
            }
        }
        Ok(())
    }

    /// Embedding dimension `2·k2 + 1`.
    pub fn embedding_dim(&self) -> usize {
        2 * self.k2 + 1
    }
}
