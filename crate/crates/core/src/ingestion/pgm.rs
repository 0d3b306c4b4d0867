//! Netpbm graymap reader for the binary (P5) and ASCII (P2) variants.

use std::path::Path;

use super::{read_file, IngestError};
use crate::descriptors::GrayImage;

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, IngestError> {
    parse_pgm(&read_file(path.as_ref())?)
}

/// Parses PGM bytes. Sample values are kept as stored; `maxval` may not
/// exceed 255.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, IngestError> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => {
            return Err(IngestError::UnsupportedFormat(
                "not a P5 or P2 graymap".into(),
            ))
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(IngestError::CorruptHeader(format!(
            "image size {width}x{height}"
        )));
    }
    if maxval == 0 {
        return Err(IngestError::CorruptHeader("maxval 0".into()));
    }
    if maxval > 255 {
        return Err(IngestError::UnsupportedFormat(format!(
            "16-bit graymap (maxval {maxval})"
        )));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| IngestError::CorruptHeader("image size overflows".into()))?;

    let pixels = if binary {
        // exactly one whitespace byte separates the header from the raster
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => {
                return Err(IngestError::CorruptHeader(
                    "missing separator after maxval".into(),
                ))
            }
        }
        let raster = bytes
            .get(cur.pos..cur.pos + count)
            .ok_or_else(|| IngestError::CorruptData(format!("expected {count} bytes of pixels")))?;
        raster.to_vec()
    } else {
        let mut v = Vec::with_capacity(count);
        for k in 0..count {
            let s = cur.token().ok_or_else(|| {
                IngestError::CorruptData(format!("expected {count} samples, found {k}"))
            })?;
            let x: usize = std::str::from_utf8(s)
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    IngestError::CorruptData(format!("bad sample {:?}", String::from_utf8_lossy(s)))
                })?;
            if x > maxval {
                return Err(IngestError::CorruptData(format!(
                    "sample {x} above maxval {maxval}"
                )));
            }
            v.push(x as u8);
        }
        v
    };
    if let Some(&x) = pixels.iter().find(|&&x| x as usize > maxval) {
        return Err(IngestError::CorruptData(format!(
            "sample {x} above maxval {maxval}"
        )));
    }
    GrayImage::new(width, height, pixels).map_err(|e| IngestError::CorruptData(e.to_string()))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Next whitespace-separated token, skipping `#` comments.
    fn token(&mut self) -> Option<&'a [u8]> {
        loop {
            match self.bytes.get(self.pos)? {
                b'#' => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<usize, IngestError> {
        let tok = self
            .token()
            .ok_or_else(|| IngestError::CorruptHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                IngestError::CorruptHeader(format!("bad {what} {:?}", String::from_utf8_lossy(tok)))
            })
    }
}
