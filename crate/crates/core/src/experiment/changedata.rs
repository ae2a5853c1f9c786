use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basis::{forward_transform, CoefficientGrid, TensorBasis, TruncationParams};
use crate::dataset::ScalarGrid;
use crate::diffusion::{coeff_power, embed_powered, global_distance_sq, DiffusionTime, Embedding};
use crate::error::{Error, Result};
use crate::kernel::{temperature_kernel, KernelMatrix, DEFAULT_TEMPERATURE_TWO_SIGMA_SQ};
use crate::oracle::performance_metric;

#[derive(Debug, Clone)]
pub struct ChangeConfig {
    pub two_sigma_sq: f64,
    pub t: DiffusionTime,
    /// `m2` radii for the dynamic maps; `{5, 100}` (where they fit) when empty.
    /// The full radius is always appended.
    pub k2_sweep: Vec<usize>,
    /// Radius of the inner sums when `t > 1`; full when unset.
    pub k3: Option<usize>,
}

impl Default for ChangeConfig {
    fn default() -> Self {
        Self {
            two_sigma_sq: DEFAULT_TEMPERATURE_TWO_SIGMA_SQ,
            t: DiffusionTime::ONE,
            k2_sweep: Vec::new(),
            k3: None,
        }
    }
}

/// Per-cell `D^t(x_ref, x_γ)²` at one `m2` radius, in valid-cell order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicMap {
    pub comparison: String,
    pub k2: usize,
    pub dist_sq: Vec<f64>,
    /// `dist_sq` where the field rose (`T_γ > T_ref`), zero elsewhere.
    pub increase_only: Vec<f64>,
}

/// Cost of an approximate map: `M_B = E · seconds / N` with
/// `E = Σ_x |approx(x) - exact(x)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapCost {
    pub comparison: String,
    pub k2: usize,
    pub seconds: f64,
    pub l1_error: f64,
    #[serde(rename = "M_B")]
    pub m_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalEntry {
    pub reference: String,
    pub comparison: String,
    pub t: DiffusionTime,
    /// Square root of `global_distance_sq`, in field units.
    pub global_distance: f64,
    pub global_distance_sq: f64,
}

#[derive(Debug, Clone)]
pub struct ChangeResult {
    pub reference: String,
    /// Valid cells `(row, col)` in point order.
    pub cells: Vec<(usize, usize)>,
    pub kernels: Vec<KernelMatrix>,
    pub maps: Vec<DynamicMap>,
    pub costs: Vec<MapCost>,
    pub globals: Vec<GlobalEntry>,
}

impl ChangeResult {
    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn map(&self, comparison: &str, k2: usize) -> Option<&DynamicMap> {
        self.maps.iter().find(|m| m.comparison == comparison && m.k2 == k2)
    }
}

fn sweep(cfg: &ChangeConfig, max: usize) -> Result<Vec<usize>> {
    let mut radii: Vec<usize> = if cfg.k2_sweep.is_empty() {
        [5, 100].into_iter().filter(|&r| r < max).collect()
    } else {
        if let Some(&bad) = cfg.k2_sweep.iter().find(|&&r| r > max) {
            return Err(Error::RadiusTooLarge { radius: bad, max });
        }
        cfg.k2_sweep.clone()
    };
    radii.push(max);
    radii.sort_unstable();
    radii.dedup();
    Ok(radii)
}

fn point_distances(a: &Embedding, b: &Embedding) -> Vec<f64> {
    (0..a.n())
        .map(|x| {
            (0..a.dim())
                .map(|i| (a.component(x, i) - b.component(x, i)).norm_sqr())
                .sum()
        })
        .collect()
}

/// Dynamic and global distances of each comparison field against the reference.
pub fn run_changedata(
    reference: (&str, &ScalarGrid),
    comparisons: &[(String, ScalarGrid)],
    cfg: &ChangeConfig,
) -> Result<ChangeResult> {
    if comparisons.is_empty() {
        return Err(Error::InvalidArgument("need at least one comparison field".into()));
    }
    let (ref_tag, ref_grid) = reference;
    for (i, (_, g)) in comparisons.iter().enumerate() {
        if g.mask() != ref_grid.mask() {
            return Err(Error::MaskMismatch { index: i + 1 });
        }
    }
    let cells = ref_grid.valid_cells();
    let n = cells.len();
    let basis = TensorBasis::fourier(n)?;
    let full = basis.max_radius();
    let k3 = cfg.k3.unwrap_or(full);
    basis.col().check_radius(k3)?;
    let radii = sweep(cfg, full)?;

    let mut kernels = vec![temperature_kernel(ref_grid, cfg.two_sigma_sq)?];
    for (_, g) in comparisons {
        kernels.push(temperature_kernel(g, cfg.two_sigma_sq)?);
    }
    let grids: Vec<CoefficientGrid> = kernels
        .iter()
        .map(|k| forward_transform(k, &basis))
        .collect::<Result<_>>()?;
    let powered: Vec<CoefficientGrid> = grids
        .iter()
        .map(|c| coeff_power(c, &basis, cfg.t, k3))
        .collect::<Result<_>>()?;

    let mut maps = Vec::new();
    let mut costs = Vec::new();
    let mut globals = Vec::new();
    for (j, (tag, g)) in comparisons.iter().enumerate() {
        let rose: Vec<bool> = cells
            .iter()
            .map(|&(r, c)| g.value(r, c) > ref_grid.value(r, c))
            .collect();
        let mut timed = Vec::with_capacity(radii.len());
        for &k2 in &radii {
            let p = TruncationParams::new(full, k2, k3);
            let start = Instant::now();
            let a = embed_powered(&powered[0], &basis, cfg.t, &p)?;
            let b = embed_powered(&powered[j + 1], &basis, cfg.t, &p)?;
            let dist_sq = point_distances(&a, &b);
            timed.push((k2, start.elapsed().as_secs_f64(), dist_sq));
        }
        let exact = timed.last().expect("sweep holds the full radius").2.clone();
        for (k2, seconds, dist_sq) in timed {
            let l1_error: f64 = dist_sq.iter().zip(&exact).map(|(a, b)| (a - b).abs()).sum();
            costs.push(MapCost {
                comparison: tag.clone(),
                k2,
                seconds,
                l1_error,
                m_b: performance_metric(l1_error, seconds, n),
            });
            let increase_only = dist_sq.iter().zip(&rose).map(|(&d, &up)| if up { d } else { 0.0 }).collect();
            maps.push(DynamicMap {
                comparison: tag.clone(),
                k2,
                dist_sq,
                increase_only,
            });
        }
        let sq = global_distance_sq(&grids[0], &grids[j + 1], &basis, cfg.t)?;
        globals.push(GlobalEntry {
            reference: ref_tag.to_string(),
            comparison: tag.clone(),
            t: cfg.t,
            global_distance: sq.sqrt(),
            global_distance_sq: sq,
        });
    }

    Ok(ChangeResult {
        reference: ref_tag.to_string(),
        cells,
        kernels,
        maps,
        costs,
        globals,
    })
}
