//! PGM (portable graymap) reading and writing.
//!
//! Reads binary `P5` and ASCII `P2` files with `maxval <= 255`; `#` comments
//! are accepted anywhere whitespace is. Sample values are kept as stored (no
//! rescaling to 255). Writing always produces binary `P5` with maxval 255 and
//! a single newline after the maxval.

use std::path::Path;

use lbpx_core::{GrayImage, LbpMap};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PgmError {
    #[error("not a PGM file: magic {0:?} (expected P5 or P2)")]
    BadMagic(String),
    #[error("malformed PGM header: {0}")]
    BadHeader(String),
    #[error("PGM maxval {0} exceeds 255")]
    MaxvalTooLarge(u32),
    #[error("truncated PGM payload: expected {expected} samples, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("malformed PGM sample {index}: {msg}")]
    BadSample { index: usize, msg: String },
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token, or `None` at end of input.
    fn number(&mut self) -> std::result::Result<Option<u32>, String> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.bytes.get(self.pos) {
                None => Ok(None),
                Some(&b) => Err(format!("unexpected byte {:?} at offset {}", b as char, self.pos)),
            };
        }
        let token = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        token.parse::<u32>().map(Some).map_err(|_| format!("number {token} out of range"))
    }

    fn header_field(&mut self, name: &str) -> std::result::Result<u32, PgmError> {
        match self.number() {
            Ok(Some(v)) => Ok(v),
            Ok(None) => Err(PgmError::BadHeader(format!("missing {name}"))),
            Err(e) => Err(PgmError::BadHeader(format!("{name}: {e}"))),
        }
    }
}

/// Parses a `P5` or `P2` graymap.
pub fn load_pgm(bytes: &[u8]) -> std::result::Result<GrayImage, PgmError> {
    let magic = bytes.get(..2).unwrap_or(bytes);
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => return Err(PgmError::BadMagic(String::from_utf8_lossy(magic).into_owned())),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::BadHeader("no whitespace after magic".to_string()));
    }
    let width = cur.header_field("width")? as usize;
    let height = cur.header_field("height")? as usize;
    let maxval = cur.header_field("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::BadHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval == 0 {
        return Err(PgmError::BadHeader("maxval 0".to_string()));
    }
    if maxval > 255 {
        return Err(PgmError::MaxvalTooLarge(maxval));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| PgmError::BadHeader(format!("dimensions {width}x{height} overflow")))?;

    let data = if binary {
        // exactly one whitespace byte separates maxval from the payload
        match cur.bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(PgmError::BadHeader("no whitespace after maxval".to_string())),
        }
        let payload = &bytes[cur.pos..];
        if payload.len() < expected {
            return Err(PgmError::Truncated { expected, got: payload.len() });
        }
        let data = payload[..expected].to_vec();
        if let Some(index) = data.iter().position(|&v| v as u32 > maxval) {
            return Err(PgmError::BadSample { index, msg: format!("value {} > maxval {maxval}", data[index]) });
        }
        data
    } else {
        let mut data = Vec::with_capacity(expected);
        while data.len() < expected {
            let index = data.len();
            match cur.number() {
                Ok(Some(v)) if v <= maxval => data.push(v as u8),
                Ok(Some(v)) => {
                    return Err(PgmError::BadSample { index, msg: format!("value {v} > maxval {maxval}") })
                }
                Ok(None) => return Err(PgmError::Truncated { expected, got: index }),
                Err(msg) => return Err(PgmError::BadSample { index, msg }),
            }
        }
        data
    };
    Ok(GrayImage::new(width, height, data).expect("dimensions checked"))
}

/// Encodes `img` as binary `P5`, maxval 255.
pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_pgm(&bytes).map_err(|source| Error::Pgm { path: path.to_path_buf(), source })
}

pub fn write_pgm_file(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, save_pgm(img)).map_err(|e| Error::io(path, e))
}

/// Label map as a viewable graymap, labels clamped to 255.
///
/// Only label spaces of at most 256 labels are accepted (raw P=8 and the
/// compact mappings with small P), so clamping never merges labels.
pub fn label_map_image(map: &LbpMap) -> Result<GrayImage> {
    if map.label_count() > 256 {
        return Err(Error::Core(lbpx_core::Error::InvalidParameter(format!(
            "label map with {} labels cannot be written as an 8-bit PGM",
            map.label_count()
        ))));
    }
    let data = map.labels().iter().map(|&l| l.min(255) as u8).collect();
    Ok(GrayImage::new(map.width(), map.height(), data)?)
}
