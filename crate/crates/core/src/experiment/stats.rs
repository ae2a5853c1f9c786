//! Summary statistics used to compare embeddings.

use nalgebra::{DMatrix, Matrix3, Vector3};

/// Pearson correlation; `None` when either input is constant or lengths differ.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}

/// Circular-linear correlation between angles `theta` and values `z`: the
/// multiple correlation of `z` on `(cos θ, sin θ)`, in `[0, 1]`. Zero when
/// `z` is constant.
pub fn circular_linear_correlation(theta: &[f64], z: &[f64]) -> f64 {
    assert_eq!(theta.len(), z.len(), "angle and value lengths differ");
    let n = z.len();
    if n < 3 {
        return 0.0;
    }
    let nf = n as f64;
    let cols: [Vec<f64>; 3] = [vec![1.0; n], theta.iter().map(|t| t.cos()).collect(), theta.iter().map(|t| t.sin()).collect()];
    let mut ata = Matrix3::<f64>::zeros();
    let mut atz = Vector3::<f64>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            ata[(i, j)] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
        }
        atz[i] = cols[i].iter().zip(z).map(|(a, b)| a * b).sum();
    }
    let mean = z.iter().sum::<f64>() / nf;
    let total: f64 = z.iter().map(|v| (v - mean).powi(2)).sum();
    if total <= f64::MIN_POSITIVE {
        return 0.0;
    }
    let Some(beta) = ata.lu().solve(&atz) else {
        return 0.0;
    };
    let residual: f64 = (0..n)
        .map(|i| (z[i] - beta[0] - beta[1] * cols[1][i] - beta[2] * cols[2][i]).powi(2))
        .sum();
    (1.0 - residual / total).clamp(0.0, 1.0).sqrt()
}

/// Euclidean distances between rows, upper triangle in row-major order.
pub fn upper_triangle_distances(points: &DMatrix<f64>) -> Vec<f64> {
    let n = points.nrows();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((points.row(i) - points.row(j)).norm());
        }
    }
    out
}

/// Pearson correlation of the pairwise-distance matrices of two point sets.
pub fn distance_matrix_correlation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<f64> {
    pearson(&upper_triangle_distances(a), &upper_triangle_distances(b))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| *v <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}
