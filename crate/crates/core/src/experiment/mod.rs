//! Desk-scale versions of the four experiments plus the timing sweep. Each
//! function returns plain data; writing files is left to the caller.

mod bench;
mod changedata;
mod image;
mod mobius;
mod sphere;
pub mod stats;

use nalgebra::DMatrix;

use crate::diffusion::Embedding;

pub use bench::{run_bench, BenchConfig, BenchResult};
pub use changedata::{run_changedata, ChangeConfig, ChangeResult, DynamicMap, GlobalEntry, MapCost};
pub use image::{run_image, ImageConfig, ImageResult};
pub use mobius::{run_mobius, MobiusConfig, MobiusResult};
pub use sphere::{run_sphere, SphereConfig, SphereResult, SphereSweepRow};

/// `(Re, Im)` of embedding slot `s` for every point, as an `n × 2` matrix.
pub fn slot_plane(e: &Embedding, s: i64) -> DMatrix<f64> {
    DMatrix::from_fn(e.n(), 2, |x, c| {
        let z = e.slot(x, s);
        if c == 0 {
            z.re
        } else {
            z.im
        }
    })
}
