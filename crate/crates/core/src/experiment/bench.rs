use super::stats::loglog_slope;
use crate::error::{Error, Result};
use crate::kernel::random_kernel;
use crate::oracle::{time_comparison, TimeReport, TimingProtocol};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    /// Radii compared at every size; `{n/4, n/2}` when empty. Radii beyond
    /// `n/2` are clipped.
    pub orders: Vec<usize>,
    pub seed: u64,
    pub protocol: TimingProtocol,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![256, 512, 1024, 2048],
            orders: Vec::new(),
            seed: 0,
            protocol: TimingProtocol::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchResult {
    pub reports: Vec<TimeReport>,
    /// Log-log slope of coefficient time against `n`; `None` with fewer than two sizes.
    pub fft_slope: Option<f64>,
    pub svd_slope: Option<f64>,
}

/// FFT-vs-SVD timing over random kernels, one size at a time.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchResult> {
    if cfg.sizes.is_empty() {
        return Err(Error::InvalidArgument("bench needs at least one size".into()));
    }
    let mut reports = Vec::with_capacity(cfg.sizes.len());
    for (i, &n) in cfg.sizes.iter().enumerate() {
        let kernel = random_kernel(n, cfg.seed.wrapping_add(i as u64))?;
        let mut orders: Vec<usize> = if cfg.orders.is_empty() {
            vec![n / 4, n / 2]
        } else {
            cfg.orders.iter().map(|&r| r.min(n / 2)).collect()
        };
        orders.dedup();
        log::info!("bench n={n}");
        reports.push(time_comparison(&kernel, &orders, &cfg.protocol)?);
    }
    let ns: Vec<f64> = reports.iter().map(|r| r.n as f64).collect();
    let fft: Vec<f64> = reports.iter().map(|r| r.fft_coefficient_seconds).collect();
    let svd: Vec<f64> = reports.iter().map(|r| r.svd_coefficient_seconds).collect();
    Ok(BenchResult {
        fft_slope: loglog_slope(&ns, &fft),
        svd_slope: loglog_slope(&ns, &svd),
        reports,
    })
}
