mod bench;
mod changedata;
mod image;
mod mobius;
mod sphere;

use asymdiff::{DiffusionTime, TruncationParams};

use crate::args::{Command, RunArgs};
use crate::error::{usage, CliResult};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Sphere(a) => sphere::run(&a),
        Command::Mobius(a) => mobius::run(&a),
        Command::Image(a) => image::run(&a),
        Command::Changedata(a) => changedata::run(&a),
        Command::Bench(a) => bench::run(&a),
    }
}

/// The single `--n`, or `default` when absent.
fn single_n(args: &RunArgs, default: usize) -> CliResult<usize> {
    match args.n.as_slice() {
        [] => Ok(default),
        [n] if *n > 0 => Ok(*n),
        [_] => Err(usage("--n must be positive")),
        _ => Err(usage("--n takes a single value for this command")),
    }
}

fn time(args: &RunArgs) -> CliResult<DiffusionTime> {
    DiffusionTime::new(args.t).map_err(|_| usage("--t must be at least 1"))
}

/// A radius of `n` (the size of the index set) means no truncation.
fn radius(r: usize, n: usize) -> usize {
    if r == n {
        n / 2
    } else {
        r
    }
}

/// `--k1`, first `--k2` and `--k3`, defaulting to `(full, k2_default, full)`.
fn params(args: &RunArgs, n: usize, k2_default: usize) -> CliResult<TruncationParams> {
    let full = n / 2;
    let p = TruncationParams::new(
        args.k1.map_or(full, |r| radius(r, n)),
        args.k2.first().map_or(k2_default.min(full), |&r| radius(r, n)),
        args.k3.map_or(full, |r| radius(r, n)),
    );
    p.validate(n)?;
    Ok(p)
}

fn no_inputs(args: &RunArgs, command: &str) -> CliResult<()> {
    if args.input.is_empty() {
        Ok(())
    } else {
        Err(usage(format!("{command} takes no --input")))
    }
}
