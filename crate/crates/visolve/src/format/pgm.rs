//! Binary greyscale PGM (`P5`). Pixels are mapped to `[0, 1]` by `1/maxval`.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub rows: usize,
    pub cols: usize,
    /// Row-major intensities in `[0, 1]`.
    pub data: Vec<f64>,
}

pub fn decode_pgm(path: &Path, bytes: &[u8]) -> Result<GrayImage> {
    let bad = |m: &str| Error::parse(path, 0, m.to_string());
    let mut pos = 0;
    // header tokens separated by whitespace, `#` comments run to end of line
    let mut token = || -> Option<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        (pos > start).then(|| String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token().as_deref() != Some("P5") {
        return Err(bad("not a binary PGM (magic P5)"));
    }
    let mut int = |what: &str| -> Result<usize> {
        token().and_then(|t| t.parse().ok()).ok_or_else(|| bad(&format!("bad {what}")))
    };
    let cols = int("width")?;
    let rows = int("height")?;
    let maxval = int("maxval")?;
    if !(1..=255).contains(&maxval) {
        return Err(bad("only 8-bit PGM (maxval 1..=255) is supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let raster = bytes.get(pos..pos + rows * cols).ok_or_else(|| bad("truncated raster"))?;
    let data = raster.iter().map(|&b| b as f64 / maxval as f64).collect();
    Ok(GrayImage { rows, cols, data })
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(path, &bytes)
}

/// Values are clamped to `[0, 1]` and rounded to the nearest level.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols, img.rows).into_bytes();
    out.extend(img.data.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    std::fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact_on_byte_levels() {
        let data: Vec<f64> = (0..12).map(|i| (i * 20) as f64 / 255.0).collect();
        let img = GrayImage { rows: 3, cols: 4, data };
        let back = decode_pgm(Path::new("m"), &encode_pgm(&img)).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn header_comments_and_maxval() {
        let mut bytes = b"P5 # made by hand\n2 1\n# levels\n15\n".to_vec();
        bytes.extend([0u8, 15]);
        let img = decode_pgm(Path::new("m"), &bytes).unwrap();
        assert_eq!(img.data, vec![0.0, 1.0]);
    }

    #[test]
    fn rejects_other_formats() {
        assert!(decode_pgm(Path::new("m"), b"P2\n1 1\n255\n0").is_err());
        assert!(decode_pgm(Path::new("m"), b"P5\n4 4\n255\n\x00").is_err());
        assert!(decode_pgm(Path::new("m"), b"P5\n1 1\n65535\n\x00\x00").is_err());
    }
}
