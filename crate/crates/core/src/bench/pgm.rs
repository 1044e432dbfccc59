//! Minimal PGM (P2 ASCII / P5 binary) grayscale reader and writer.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{DualSvdError, Result};

fn malformed(msg: impl Into<String>) -> DualSvdError {
    DualSvdError::Pgm(msg.into())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&[u8]> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token().ok_or_else(|| malformed(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(format!("bad {what}: {:?}", String::from_utf8_lossy(tok))))
    }
}

/// Parses a PGM image into a `height x width` matrix scaled to `[0, 1]`.
pub fn parse_pgm(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.token().ok_or_else(|| malformed("empty file"))?.to_vec();
    let binary = match magic.as_slice() {
        b"P5" => true,
        b"P2" => false,
        other => return Err(malformed(format!("unsupported magic {:?}", String::from_utf8_lossy(other)))),
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(malformed("zero image dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(malformed(format!("maxval {maxval} outside 1..=65535")));
    }
    let scale = 1.0 / maxval as f64;
    let count = width * height;
    let mut values = Vec::with_capacity(count);

    if binary {
        // exactly one whitespace byte separates the header from the raster
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(malformed("missing separator before raster"));
        }
        let data = &bytes[cur.pos + 1..];
        let sample = if maxval > 255 { 2 } else { 1 };
        if data.len() < count * sample {
            return Err(malformed(format!(
                "truncated raster: need {} bytes, have {}",
                count * sample,
                data.len()
            )));
        }
        for k in 0..count {
            let v = if sample == 2 {
                u16::from_be_bytes([data[2 * k], data[2 * k + 1]]) as usize
            } else {
                data[k] as usize
            };
            if v > maxval {
                return Err(malformed(format!("sample {v} exceeds maxval {maxval}")));
            }
            values.push(v as f64 * scale);
        }
    } else {
        for k in 0..count {
            let v = cur.number("sample").map_err(|_| {
                malformed(format!("truncated raster: got {k} of {count} samples"))
            })?;
            if v > maxval {
                return Err(malformed(format!("sample {v} exceeds maxval {maxval}")));
            }
            values.push(v as f64 * scale);
        }
    }
    Ok(DMatrix::from_row_slice(height, width, &values))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    parse_pgm(&std::fs::read(path)?)
}

/// Encodes `img` (values in `[0, 1]`, clamped) with the given `maxval`.
pub fn encode_pgm(img: &DMatrix<f64>, maxval: u16, binary: bool) -> Vec<u8> {
    let (h, w) = (img.nrows(), img.ncols());
    let mut out = format!("{}\n{} {}\n{}\n", if binary { "P5" } else { "P2" }, w, h, maxval).into_bytes();
    let quant = |x: f64| (x.clamp(0.0, 1.0) * maxval as f64).round() as u16;
    for i in 0..h {
        for j in 0..w {
            let v = quant(img[(i, j)]);
            if binary {
                if maxval > 255 {
                    out.extend_from_slice(&v.to_be_bytes());
                } else {
                    out.push(v as u8);
                }
            } else {
                out.extend_from_slice(v.to_string().as_bytes());
                out.push(if j + 1 == w { b'\n' } else { b' ' });
            }
        }
    }
    out
}

pub fn write_pgm(path: impl AsRef<Path>, img: &DMatrix<f64>, maxval: u16, binary: bool) -> Result<()> {
    std::fs::write(path, encode_pgm(img, maxval, binary))?;
    Ok(())
}
