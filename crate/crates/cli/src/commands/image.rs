use std::time::Instant;

use asymdiff::dataset::{load_grayscale_image, save_grayscale_image};
use asymdiff::experiment::{run_image, ImageConfig};
use asymdiff::oracle::{MachineInfo, RepresentationPath, TimingProtocol};
use serde::Serialize;

use super::radius;
use crate::args::RunArgs;
use crate::error::{usage, CliResult};
use crate::output::{curve_csv, CurveRow, OutputDir, Timings};
use crate::selfcheck::{check_kernel, enabled, SelfCheck};

#[derive(Serialize)]
struct CurvePoint {
    order: usize,
    path: &'static str,
    l2_error: f64,
}

#[derive(Serialize)]
struct Diagnostics {
    command: &'static str,
    input: String,
    n: usize,
    k2: usize,
    fourier_l2_error: f64,
    svd_l2_error: f64,
    curve: Vec<CurvePoint>,
    self_check: SelfCheck,
}

fn path_name(p: RepresentationPath) -> &'static str {
    match p {
        RepresentationPath::Fft => "fft",
        RepresentationPath::Svd => "svd",
    }
}

pub fn run(args: &RunArgs) -> CliResult<()> {
    let start = Instant::now();
    let [input] = args.input.as_slice() else {
        return Err(usage("image needs exactly one --input PGM file"));
    };
    if !args.n.is_empty() || args.k1.is_some() || args.k3.is_some() || args.t != 1 {
        return Err(usage("image takes only --input, --k2, --out and --no-self-check"));
    }
    let grid = load_grayscale_image(input)?;
    let n = grid.width();
    let k2 = args.k2.first().map(|&r| radius(r, n));
    let sweep = if args.k2.len() > 1 {
        args.k2.iter().map(|&r| radius(r, n)).collect()
    } else {
        Vec::new()
    };
    let protocol = TimingProtocol::default();
    let result = run_image(&grid, &ImageConfig { k2, sweep, protocol })?;

    let self_check = if enabled(n, args.no_self_check) {
        check_kernel(&result.kernel, asymdiff::DiffusionTime::ONE)?
    } else {
        SelfCheck::skipped()
    };

    let out = OutputDir::create(&args.out)?;
    save_grayscale_image(&result.recon_fourier, out.path("recon_fourier.pgm"), 255)?;
    save_grayscale_image(&result.recon_svd, out.path("recon_svd.pgm"), 255)?;
    let rows: Vec<CurveRow> = result
        .report
        .entries
        .iter()
        .map(|e| CurveRow {
            n,
            order: e.order,
            path: path_name(e.path),
            seconds: e.seconds,
            l2_error: e.l2_error,
            m_b: e.m_b,
        })
        .collect();
    out.text("bench.csv", &curve_csv(&rows))?;
    out.json(
        "diagnostics.json",
        &Diagnostics {
            command: "image",
            input: input.display().to_string(),
            n,
            k2: result.k2,
            fourier_l2_error: result.fourier_l2_error,
            svd_l2_error: result.svd_l2_error,
            curve: rows
                .iter()
                .map(|r| CurvePoint {
                    order: r.order,
                    path: r.path,
                    l2_error: r.l2_error,
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
            details: &result.report,
        },
    )?;
    Ok(())
}
