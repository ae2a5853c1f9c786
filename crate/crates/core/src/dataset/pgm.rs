//! Netpbm graymaps (`P2` ASCII and `P5` binary).

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use super::ScalarGrid;
use crate::error::{Error, Result};

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    binary: bool,
    data_start: usize,
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::MalformedImage {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Reads whitespace-separated header tokens, skipping `#` comments.
fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

fn parse_header(path: &Path, bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 {
        return Err(malformed(path, "missing magic number"));
    }
    let magic = &bytes[..2];
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        [b'P', b'1'..=b'7'] => {
            return Err(Error::NotGrayscale {
                path: path.to_path_buf(),
                magic: String::from_utf8_lossy(magic).into_owned(),
            })
        }
        _ => return Err(malformed(path, "missing magic number")),
    };
    let mut pos = 2;
    let mut field = |name: &str| -> Result<u64> {
        let tok = next_token(bytes, &mut pos).ok_or_else(|| malformed(path, format!("missing {name}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| malformed(path, format!("invalid {name}")))
    };
    let width = field("width")? as usize;
    let height = field("height")? as usize;
    let maxval = field("maxval")?;
    if width == 0 || height == 0 {
        return Err(malformed(path, "zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(malformed(path, format!("maxval {maxval} outside 1..=65535")));
    }
    // Exactly one whitespace byte separates the header from binary data.
    if binary {
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(malformed(path, "missing raster data"));
        }
        pos += 1;
    }
    Ok(Header {
        width,
        height,
        maxval: maxval as u32,
        binary,
        data_start: pos,
    })
}

/// Loads a graymap as values in `[0, 1]` (pixel / maxval), every cell valid.
/// Row `r`, column `c` of the grid is pixel row `r` (top first), column `c`.
pub fn load_grayscale_image(path: impl AsRef<Path>) -> Result<ScalarGrid> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let header = parse_header(path, &bytes)?;
    let count = header.width * header.height;
    let maxval = f64::from(header.maxval);
    let mut samples = Vec::with_capacity(count);
    if header.binary {
        let wide = header.maxval > 255;
        let stride = if wide { 2 } else { 1 };
        let data = &bytes[header.data_start..];
        if data.len() < count * stride {
            return Err(malformed(path, "truncated raster data"));
        }
        for i in 0..count {
            let raw = if wide {
                u32::from(u16::from_be_bytes([data[2 * i], data[2 * i + 1]]))
            } else {
                u32::from(data[i])
            };
            samples.push(raw);
        }
    } else {
        let mut pos = header.data_start;
        for _ in 0..count {
            let tok = next_token(&bytes, &mut pos).ok_or_else(|| malformed(path, "truncated raster data"))?;
            let raw = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| malformed(path, "invalid sample"))?;
            samples.push(raw);
        }
    }
    if let Some(bad) = samples.iter().find(|&&s| s > header.maxval) {
        return Err(malformed(path, format!("sample {bad} exceeds maxval {}", header.maxval)));
    }
    let values = DMatrix::from_row_iterator(
        header.height,
        header.width,
        samples.into_iter().map(|s| f64::from(s) / maxval),
    );
    ScalarGrid::dense(values)
}

/// Writes a binary (`P5`) graymap, quantizing `value * maxval` to the nearest
/// integer after clamping to `[0, 1]`. Invalid cells are written as 0.
pub fn save_grayscale_image(grid: &ScalarGrid, path: impl AsRef<Path>, maxval: u16) -> Result<()> {
    if maxval == 0 {
        return Err(Error::InvalidArgument("maxval must be positive".into()));
    }
    let mut out = Vec::new();
    write!(out, "P5\n{} {}\n{}\n", grid.width(), grid.height(), maxval)?;
    for r in 0..grid.height() {
        for c in 0..grid.width() {
            let v = if grid.is_valid(r, c) { grid.value(r, c).clamp(0.0, 1.0) } else { 0.0 };
            let q = (v * f64::from(maxval)).round() as u16;
            if maxval > 255 {
                out.extend_from_slice(&q.to_be_bytes());
            } else {
                out.push(q as u8);
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, bytes: &[u8]) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, bytes).unwrap();
        p
    }

    #[test]
    fn binary_two_by_two() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 255, 0]);
        let grid = load_grayscale_image(write(&dir, "a.pgm", &bytes)).unwrap();
        assert_eq!(grid.values(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert!(grid.is_fully_valid());
    }

    #[test]
    fn ascii_with_comments_and_odd_maxval() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.pgm", b"P2\n# made by hand\n3 1 # inline\n100\n0 33\n100\n");
        let grid = load_grayscale_image(p).unwrap();
        assert_eq!(grid.width(), 3);
        assert_eq!(grid.value(0, 1), 0.33);
        assert_eq!(grid.value(0, 2), 1.0);
    }

    #[test]
    fn sixteen_bit_samples_are_big_endian() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = b"P5 1 1 65535\n".to_vec();
        bytes.extend_from_slice(&[0x80, 0x00]);
        let grid = load_grayscale_image(write(&dir, "a.pgm", &bytes)).unwrap();
        assert_eq!(grid.value(0, 0), 32768.0 / 65535.0);
    }

    #[test]
    fn error_paths() {
        let dir = tempfile::tempdir().unwrap();
        let empty = write(&dir, "empty.pgm", b"");
        assert!(matches!(load_grayscale_image(empty), Err(Error::MalformedImage { .. })));
        let color = write(&dir, "c.ppm", b"P6\n1 1\n255\n\0\0\0");
        assert!(matches!(load_grayscale_image(color), Err(Error::NotGrayscale { .. })));
        let short = write(&dir, "s.pgm", b"P5\n2 2\n255\n\0\0");
        assert!(matches!(load_grayscale_image(short), Err(Error::MalformedImage { .. })));
        let big = write(&dir, "b.pgm", b"P2\n1 1\n10\n11\n");
        assert!(matches!(load_grayscale_image(big), Err(Error::MalformedImage { .. })));
        let missing = dir.path().join("nope.pgm");
        assert!(matches!(load_grayscale_image(missing), Err(Error::Io(_))));
    }

    #[test]
    fn save_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = b"P5\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 17, 34, 200, 254, 255]);
        let grid = load_grayscale_image(write(&dir, "a.pgm", &bytes)).unwrap();
        let out = dir.path().join("b.pgm");
        save_grayscale_image(&grid, &out, 255).unwrap();
        assert_eq!(load_grayscale_image(&out).unwrap(), grid);
        save_grayscale_image(&grid, &out, 65535).unwrap();
        let wide = load_grayscale_image(&out).unwrap();
        assert!((wide.values() - grid.values()).amax() < 1e-5);
    }
}
