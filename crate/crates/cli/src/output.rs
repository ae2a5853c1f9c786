use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use asymdiff::oracle::{MachineInfo, TimingProtocol};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::CliResult;

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn writer(&self, name: &str) -> CliResult<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }

    pub fn text(&self, name: &str, body: &str) -> CliResult<()> {
        fs::write(self.path(name), body)?;
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut body = serde_json::to_string_pretty(value).map_err(asymdiff::Error::from)?;
        body.push('\n');
        self.text(name, &body)
    }

    /// Square matrix with a `point_index` column and `d_<y>` headers.
    pub fn square_matrix(&self, name: &str, m: &DMatrix<f64>) -> CliResult<()> {
        let mut w = self.writer(name)?;
        write!(w, "point_index")?;
        for y in 0..m.ncols() {
            write!(w, ",d_{y}")?;
        }
        writeln!(w)?;
        for x in 0..m.nrows() {
            write!(w, "{x}")?;
            for y in 0..m.ncols() {
                write!(w, ",{:e}", m[(x, y)])?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One timed point of an error/time curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub order: usize,
    pub path: &'static str,
    pub seconds: f64,
    pub l2_error: f64,
    #[serde(rename = "M_B")]
    pub m_b: f64,
}

/// `bench.csv`: the curve rows with base-10 log columns for log-scale plots.
pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("n,order,path,seconds,l2_error,M_B,log10_seconds,log10_l2_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:e},{:e},{:e},{:e},{:e}\n",
            r.n,
            r.order,
            r.path,
            r.seconds,
            r.l2_error,
            r.m_b,
            r.seconds.log10(),
            r.l2_error.log10()
        ));
    }
    out
}

/// Envelope for `timings.json`.
#[derive(Debug, Serialize)]
pub struct Timings<T: Serialize> {
    pub machine: MachineInfo,
    pub protocol: TimingProtocol,
    pub total_seconds: f64,
    pub details: T,
}
