use std::io::Write;
use std::time::Instant;

use asymdiff::dataset::{load_scalar_csv, synth_temperature_field, write_scalar_csv};
use asymdiff::experiment::{run_changedata, ChangeConfig, ChangeResult};
use asymdiff::kernel::DEFAULT_TEMPERATURE_TWO_SIGMA_SQ;
use asymdiff::oracle::{brute_dynamic_distance_sq, MachineInfo, TimingProtocol};
use asymdiff::{Error, ScalarGrid};
use serde::Serialize;

use super::{radius, single_n, time};
use crate::args::RunArgs;
use crate::error::{usage, CliResult};
use crate::output::{OutputDir, Timings};
use crate::selfcheck::{enabled, SelfCheck};

const SYNTH_TAGS: [&str; 3] = ["2000", "2010", "2018"];
const DEFAULT_SIDE: usize = 48;
const DIST_TOL: f64 = 1e-8;

#[derive(Serialize)]
struct MapError {
    comparison: String,
    k2: usize,
    l1_error: f64,
}

#[derive(Serialize)]
struct Diagnostics {
    command: &'static str,
    reference: String,
    comparisons: Vec<String>,
    cells: usize,
    t: u32,
    two_sigma_sq: f64,
    k2_sweep: Vec<usize>,
    k3: usize,
    map_errors: Vec<MapError>,
    self_check: SelfCheck,
}

fn tag_of(path: &std::path::Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Full-radius maps against brute-force cross-row norms, relative to the largest value.
fn check_maps(result: &ChangeResult, t: asymdiff::DiffusionTime) -> CliResult<SelfCheck> {
    let full = result.n() / 2;
    let mut worst = 0.0f64;
    for (j, m) in result.maps.iter().filter(|m| m.k2 == full).enumerate() {
        let brute: Vec<f64> = (0..result.n())
            .map(|x| brute_dynamic_distance_sq(&result.kernels[0], &result.kernels[j + 1], t, x, x))
            .collect::<Result<_, _>>()?;
        let scale = brute.iter().copied().fold(f64::MIN_POSITIVE, f64::max);
        for (a, b) in m.dist_sq.iter().zip(&brute) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    if worst > DIST_TOL {
        return Err(Error::InvariantViolation(format!("self-check: dynamic map error {worst:e} exceeds {DIST_TOL:e}")).into());
    }
    Ok(SelfCheck {
        performed: true,
        distance_max_rel: Some(worst),
        ..SelfCheck::default()
    })
}

pub fn run(args: &RunArgs) -> CliResult<()> {
    let start = Instant::now();
    let t = time(args)?;
    if args.k1.is_some() {
        return Err(usage("changedata always keeps the full row range; drop --k1"));
    }
    let fields: Vec<(String, ScalarGrid)> = if args.input.is_empty() {
        let side = single_n(args, DEFAULT_SIDE)?;
        SYNTH_TAGS
            .iter()
            .map(|&tag| Ok((tag.to_string(), synth_temperature_field(side, side, tag, args.seed)?)))
            .collect::<CliResult<_>>()?
    } else {
        if !args.n.is_empty() {
            return Err(usage("--n sets the synthetic grid side; it cannot be combined with --input"));
        }
        if args.input.len() < 2 {
            return Err(usage("changedata needs a reference and at least one comparison --input"));
        }
        args.input
            .iter()
            .map(|p| Ok((tag_of(p), load_scalar_csv(p)?)))
            .collect::<CliResult<_>>()?
    };
    let (reference, comparisons) = fields.split_first().expect("at least two fields");
    let n = reference.1.valid_count();
    let two_sigma_sq = args.two_sigma_sq.unwrap_or(DEFAULT_TEMPERATURE_TWO_SIGMA_SQ);
    if !(two_sigma_sq.is_finite() && two_sigma_sq > 0.0) {
        return Err(usage("--two-sigma-sq must be positive"));
    }
    let cfg = ChangeConfig {
        two_sigma_sq,
        t,
        k2_sweep: args.k2.iter().map(|&r| radius(r, n)).collect(),
        k3: args.k3.map(|r| radius(r, n)),
    };
    let result = run_changedata((&reference.0, &reference.1), comparisons, &cfg)?;

    let self_check = if enabled(n, args.no_self_check) {
        check_maps(&result, t)?
    } else {
        SelfCheck::skipped()
    };

    let out = OutputDir::create(&args.out)?;
    if args.input.is_empty() {
        for (tag, grid) in &fields {
            write_scalar_csv(grid, out.path(&format!("field_{tag}.csv")))?;
        }
    }
    let mut w = out.writer("distances.csv")?;
    writeln!(w, "comparison,k2,cell_index,row,col,dist_sq,increase_only")?;
    for m in &result.maps {
        for (i, &(r, c)) in result.cells.iter().enumerate() {
            writeln!(
                w,
                "{},{},{i},{r},{c},{:e},{:e}",
                m.comparison, m.k2, m.dist_sq[i], m.increase_only[i]
            )?;
        }
    }
    w.flush()?;
    out.json("global.json", &result.globals)?;

    let mut k2_sweep: Vec<usize> = result.maps.iter().map(|m| m.k2).collect();
    k2_sweep.sort_unstable();
    k2_sweep.dedup();
    out.json(
        "diagnostics.json",
        &Diagnostics {
            command: "changedata",
            reference: reference.0.clone(),
            comparisons: comparisons.iter().map(|(t, _)| t.clone()).collect(),
            cells: n,
            t: t.get(),
            two_sigma_sq,
            k2_sweep,
            k3: cfg.k3.unwrap_or(n / 2),
            map_errors: result
                .costs
                .iter()
                .map(|c| MapError {
                    comparison: c.comparison.clone(),
                    k2: c.k2,
                    l1_error: c.l1_error,
                })
                .collect(),
            self_check,
        },
    )?;
    out.json(
        "timings.json",
        &Timings {
            machine: MachineInfo::current(),
            protocol: TimingProtocol { warmup: 0, repeats: 1 },
            total_seconds: start.elapsed().as_secs_f64(),
            details: &result.costs,
        },
    )?;
    Ok(())
}
