use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "asymdiff", version, about = "Diffusion distances for asymmetric kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvector and Fourier embeddings of a Markov-normalized sphere sample.
    Sphere(RunArgs),
    /// Fourier and singular-basis embeddings of the sign-weighted Möbius kernel.
    Mobius(RunArgs),
    /// Fourier and SVD reconstructions of a grayscale image kernel.
    Image(RunArgs),
    /// Dynamic and global distances between scalar fields on a shared mask.
    Changedata(RunArgs),
    /// FFT versus SVD coefficient timings over random kernels.
    Bench(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Number of points; a comma-separated size list for `bench`, the grid
    /// side for synthetic `changedata` fields.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,

    /// Diffusion time.
    #[arg(long, default_value_t = 1)]
    pub t: u32,

    /// Radius of the row index box; `n` means full.
    #[arg(long)]
    pub k1: Option<usize>,

    /// Radii of the column index box, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub k2: Vec<usize>,

    /// Radius of the inner sums when powering coefficients.
    #[arg(long)]
    pub k3: Option<usize>,

    /// Bandwidth `2σ²` of the temperature kernel.
    #[arg(long)]
    pub two_sigma_sq: Option<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Input file; repeat for several (`changedata`: reference first).
    #[arg(long)]
    pub input: Vec<PathBuf>,

    /// Output directory, created when missing.
    #[arg(long, default_value = "asymdiff-out")]
    pub out: PathBuf,

    /// Skip the oracle comparison done before writing at n <= 64.
    #[arg(long)]
    pub no_self_check: bool,
}
