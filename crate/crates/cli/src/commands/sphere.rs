use std::io::Write;
use std::time::Instant;

use asymdiff::experiment::{run_sphere, SphereConfig};
use asymdiff::oracle::{performance_metric, MachineInfo, TimingProtocol};
use asymdiff::{run_algorithm1, DatasetSpec, TruncationParams};
use serde::Serialize;

use super::{no_inputs, params, single_n, time};
use crate::args::RunArgs;
use crate::error::CliResult;
use crate::output::{curve_csv, CurveRow, OutputDir, Timings};
use crate::selfcheck::{check_kernel, enabled, SelfCheck};

#[derive(Serialize)]
struct SweepError {
    n: usize,
    fourier_l2_error: f64,
    eigen_l2_error: f64,
}

#[derive(Serialize)]
struct Diagnostics {
    command: &'static str,
    n: usize,
    t: u32,
    seed: u64,
    params: TruncationParams,
    truncation_residual: f64,
    map_truncation_residual: f64,
    kernel_relative_asymmetry: f64,
    /// Pearson correlation of the eigen and Fourier maps' pairwise distances.
    distance_correlation: Option<f64>,
    sweep: Vec<SweepError>,
    self_check: SelfCheck,
}

/// Sizes for the error/time curves: powers of two from 64 up to `n`, plus `n`.
fn sweep_sizes(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(64usize), |s| Some(s * 2))
        .take_while(|&s| s < n)
        .collect();
    out.push(n);
    out
}

pub fn run(args: &RunArgs) -> CliResult<()> {
    no_inputs(args, "sphere")?;
    let start = Instant::now();
    let n = single_n(args, 512)?;
    let t = time(args)?;
    let p = params(args, n, 1)?;
    let protocol = TimingProtocol::default();

    let result = run_sphere(&SphereConfig {
        n,
        seed: args.seed,
        t,
        sweep: sweep_sizes(n),
        protocol,
    })?;
    let custom = if p == TruncationParams::new(n / 2, 1.min(n / 2), n / 2) {
        None
    } else {
        Some(run_algorithm1(&DatasetSpec::sphere(n, args.seed)?, t, &p)?)
    };
    let (embedding, residual) = match &custom {
        Some(out) => (&out.embedding, out.diagnostics.truncation_residual),
        None => (&result.fourier_embedding, result.truncation_residual),
    };

    let self_check = if enabled(n, args.no_self_check) {
        check_kernel(&result.kernel, t)?
    } else {
        SelfCheck::skipped()
    };

    let out = OutputDir::create(&args.out)?;
    embedding.write_csv(out.writer("embedding.csv")?, Some(&result.cloud))?;
    let mut w = out.writer("maps.csv")?;
    writeln!(w, "point_index,u,v,eigen_1,eigen_2,fourier_re,fourier_im")?;
    for x in 0..n {
        let l = &result.cloud.labels()[x];
        let e2 = if result.eigen_map.ncols() > 1 { result.eigen_map[(x, 1)] } else { 0.0 };
        writeln!(
            w,
            "{x},{:e},{:e},{:e},{:e},{:e},{:e}",
            l[0],
            l[1],
            result.eigen_map[(x, 0)],
            e2,
            result.fourier_map[(x, 0)],
            result.fourier_map[(x, 1)]
        )?;
    }
    w.flush()?;
    out.square_matrix("distances.csv", &embedding.pairwise_sq_distances())?;

    let curves: Vec<CurveRow> = result
        .sweep
        .iter()
        .flat_map(|r| {
            [
                CurveRow {
                    n: r.n,
                    order: 1,
                    path: "fft",
                    seconds: r.fourier_seconds,
                    l2_error: r.fourier_l2_error,
                    m_b: performance_metric(r.fourier_l2_error, r.fourier_seconds, r.n),
                },
                CurveRow {
                    n: r.n,
                    order: 1,
                    path: "eigen",
                    seconds: r.eigen_seconds,
                    l2_error: r.eigen_l2_error,
                    m_b: performance_metric(r.eigen_l2_error, r.eigen_seconds, r.n),
                },
            ]
        })
        .collect();
    out.text("bench.csv", &curve_csv(&curves))?;

    out.json(
        "diagnostics.json",
        &Diagnostics {
            command: "sphere",
            n,
            t: t.get(),
            seed: args.seed,
            params: p,
            truncation_residual: residual,
            map_truncation_residual: result.truncation_residual,
            kernel_relative_asymmetry: result.kernel.relative_asymmetry(),
            distance_correlation: result.distance_correlation,
            sweep: result
                .sweep
                .iter()
                .map(|r| SweepError {
                    n: r.n,
                    fourier_l2_error: r.fourier_l2_error,
                    eigen_l2_error: r.eigen_l2_error,
                })
                .collect(),
            self_check,
        },
    )?;
    out.json(
        "timings.json",
        &Timings {
            machine: MachineInfo::current(),
            protocol,
            total_seconds: start.elapsed().as_secs_f64(),
            details: curves,
        },
    )?;
    log::info!("sphere: wrote {}", args.out.display());
    Ok(())
}
