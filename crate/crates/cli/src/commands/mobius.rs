use std::io::Write;
use std::time::Instant;

use asymdiff::diffusion::BasisChoice;
use asymdiff::experiment::{run_mobius, MobiusConfig};
use asymdiff::oracle::{MachineInfo, TimingProtocol};
use asymdiff::{run_algorithm1, DatasetSpec, TruncationParams};
use serde::Serialize;

use super::{no_inputs, params, single_n, time};
use crate::args::RunArgs;
use crate::error::CliResult;
use crate::output::{OutputDir, Timings};
use crate::selfcheck::{check_kernel, enabled, SelfCheck};

#[derive(Serialize)]
struct Diagnostics {
    command: &'static str,
    n: usize,
    t: u32,
    seed: u64,
    params: TruncationParams,
    raw_relative_asymmetry: f64,
    relative_asymmetry: f64,
    fourier_circular_correlation: f64,
    svd_circular_correlation: f64,
    self_check: SelfCheck,
}

pub fn run(args: &RunArgs) -> CliResult<()> {
    no_inputs(args, "mobius")?;
    let start = Instant::now();
    let n = single_n(args, 300)?;
    let t = time(args)?;
    let p = params(args, n, 1)?;

    let result = run_mobius(&MobiusConfig { n, seed: args.seed, t })?;
    let (fourier, svd) = if p == TruncationParams::new(n / 2, 1.min(n / 2), n / 2) {
        (result.fourier_embedding.clone(), result.svd_embedding.clone())
    } else {
        let spec = DatasetSpec::mobius(n, args.seed)?;
        let f = run_algorithm1(&spec, t, &p)?.embedding;
        let s = run_algorithm1(&spec.with_basis(BasisChoice::Singular), t, &p)?.embedding;
        (f, s)
    };

    let self_check = if enabled(n, args.no_self_check) {
        check_kernel(&result.kernel, t)?
    } else {
        SelfCheck::skipped()
    };

    let out = OutputDir::create(&args.out)?;
    fourier.write_csv(out.writer("embedding.csv")?, Some(&result.cloud))?;
    svd.write_csv(out.writer("embedding_svd.csv")?, Some(&result.cloud))?;
    let mut w = out.writer("maps.csv")?;
    writeln!(w, "point_index,u,v,fourier_re,fourier_im,svd_1,svd_2")?;
    for x in 0..n {
        let l = &result.cloud.labels()[x];
        writeln!(
            w,
            "{x},{:e},{:e},{:e},{:e},{:e},{:e}",
            l[0],
            l[1],
            result.fourier_map[(x, 0)],
            result.fourier_map[(x, 1)],
            result.svd_map[(x, 0)],
            result.svd_map[(x, 1)]
        )?;
    }
    w.flush()?;
    out.text("kernel.csv", &result.kernel.to_csv())?;
    let gram = result.gram();
    let mut w = out.writer("gram.csv")?;
    for row in gram.row_iter() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    out.square_matrix("distances.csv", &fourier.pairwise_sq_distances())?;

    out.json(
        "diagnostics.json",
        &Diagnostics {
            command: "mobius",
            n,
            t: t.get(),
            seed: args.seed,
            params: p,
            raw_relative_asymmetry: result.raw_relative_asymmetry,
            relative_asymmetry: result.relative_asymmetry,
            fourier_circular_correlation: result.fourier_circular_correlation,
            svd_circular_correlation: result.svd_circular_correlation,
            self_check,
        },
    )?;
    out.json(
        "timings.json",
        &Timings {
            machine: MachineInfo::current(),
            protocol: TimingProtocol { warmup: 0, repeats: 1 },
            total_seconds: start.elapsed().as_secs_f64(),
            details: (),
        },
    )?;
    Ok(())
}
