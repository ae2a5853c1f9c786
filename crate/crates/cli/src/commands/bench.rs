use std::time::Instant;

use asymdiff::experiment::{run_bench, BenchConfig};
use asymdiff::kernel::random_kernel;
use asymdiff::oracle::{MachineInfo, RepresentationPath, TimeReport, TimingProtocol};
use asymdiff::DiffusionTime;
use serde::Serialize;

use crate::args::RunArgs;
use crate::error::{usage, CliResult};
use crate::output::{curve_csv, CurveRow, OutputDir, Timings};
use crate::selfcheck::{check_kernel, enabled, SelfCheck};

#[derive(Serialize)]
struct EntryError {
    n: usize,
    order: usize,
    path: &'static str,
    l2_error: f64,
}

#[derive(Serialize)]
struct Diagnostics {
    command: &'static str,
    sizes: Vec<usize>,
    orders: Vec<usize>,
    seed: u64,
    errors: Vec<EntryError>,
    self_checks: Vec<SelfCheck>,
}

#[derive(Serialize)]
struct Details<'a> {
    fft_slope: Option<f64>,
    svd_slope: Option<f64>,
    reports: &'a [TimeReport],
}

fn path_name(p: RepresentationPath) -> &'static str {
    match p {
        RepresentationPath::Fft => "fft",
        RepresentationPath::Svd => "svd",
    }
}

pub fn run(args: &RunArgs) -> CliResult<()> {
    let start = Instant::now();
    if args.n.is_empty() {
        return Err(usage("bench needs a size sweep, e.g. --n 256,512,1024"));
    }
    if args.n.contains(&0) {
        return Err(usage("bench sizes must be positive"));
    }
    if !args.input.is_empty() || args.k1.is_some() || args.k3.is_some() || args.t != 1 {
        return Err(usage("bench takes only --n, --k2, --seed, --out and --no-self-check"));
    }
    let protocol = TimingProtocol::default();
    let cfg = BenchConfig {
        sizes: args.n.clone(),
        orders: args.k2.clone(),
        seed: args.seed,
        protocol,
    };

    let mut self_checks = Vec::new();
    for (i, &n) in cfg.sizes.iter().enumerate() {
        if enabled(n, args.no_self_check) {
            let k = random_kernel(n, cfg.seed.wrapping_add(i as u64))?;
            self_checks.push(check_kernel(&k, DiffusionTime::ONE)?);
        }
    }
    let result = run_bench(&cfg)?;

    let rows: Vec<CurveRow> = result
        .reports
        .iter()
        .flat_map(|r| {
            r.entries.iter().map(move |e| CurveRow {
                n: r.n,
                order: e.order,
                path: path_name(e.path),
                seconds: e.seconds,
                l2_error: e.l2_error,
                m_b: e.m_b,
            })
        })
        .collect();

    let out = OutputDir::create(&args.out)?;
    out.text("bench.csv", &curve_csv(&rows))?;
    let mut orders: Vec<usize> = rows.iter().map(|r| r.order).collect();
    orders.sort_unstable();
    orders.dedup();
    out.json(
        "diagnostics.json",
        &Diagnostics {
            command: "bench",
            sizes: cfg.sizes.clone(),
            orders,
            seed: cfg.seed,
            errors: rows
                .iter()
                .map(|r| EntryError {
                    n: r.n,
                    order: r.order,
                    path: r.path,
                    l2_error: r.l2_error,
                })
                .collect(),
            self_checks,
        },
    )?;
    out.json(
        "timings.json",
        &Timings {
            machine: MachineInfo::current(),
            protocol,
            total_seconds: start.elapsed().as_secs_f64(),
            details: Details {
                fft_slope: result.fft_slope,
                svd_slope: result.svd_slope,
                reports: &result.reports,
            },
        },
    )?;
    if let (Some(f), Some(s)) = (result.fft_slope, result.svd_slope) {
        println!("log-log slope: fft {f:.3}, svd {s:.3}");
    }
    for r in &result.reports {
        println!(
            "n={:>5}  fft {:.3e} s  svd {:.3e} s",
            r.n, r.fft_coefficient_seconds, r.svd_coefficient_seconds
        );
    }
    Ok(())
}
