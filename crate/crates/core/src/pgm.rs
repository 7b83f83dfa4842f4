//! Netpbm grayscale (PGM) reading and writing, plain (`P2`) and raw (`P5`).
//! Raw samples wider than one byte are big-endian.

use crate::error::{Error, Result};
use crate::lattice::GridDims;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    dims: GridDims,
    maxval: u16,
    /// Row-major.
    pixels: Vec<u16>,
}

impl GrayImage {
    pub fn new(dims: GridDims, maxval: u16, pixels: Vec<u16>) -> Result<Self> {
        GridDims::new(dims.height, dims.width)?;
        if maxval == 0 {
            return Err(parse_err(0, "maxval must be at least 1"));
        }
        if pixels.len() != dims.node_count() {
            return Err(Error::Shape {
                matrix: "pixel",
                expected: format!("{}x{}", dims.height, dims.width),
                actual: format!("{} entries", pixels.len()),
            });
        }
        if let Some(k) = pixels.iter().position(|&p| p > maxval) {
            return Err(Error::InvalidCost {
                matrix: "pixel",
                row: k / dims.width,
                col: k % dims.width,
                value: f64::from(pixels[k]),
            });
        }
        Ok(Self { dims, maxval, pixels })
    }

    pub fn from_rows(maxval: u16, rows: &[Vec<u16>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let dims = GridDims::new(rows.len(), width)?;
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Shape {
                matrix: "pixel",
                expected: format!("rows of {width}"),
                actual: "ragged rows".into(),
            });
        }
        Self::new(dims, maxval, rows.concat())
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.pixels[row * self.dims.width + col]
    }

    pub fn transposed(&self) -> Self {
        let GridDims { height, width } = self.dims;
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for j in 0..width {
            pixels.extend((0..height).map(|i| self.get(i, j)));
        }
        Self {
            dims: self.dims.transposed(),
            maxval: self.maxval,
            pixels,
        }
    }
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n' && c != b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.bytes.get(self.pos) {
                None => parse_err(start, format!("unexpected end of data, expected {what}")),
                Some(&b) => parse_err(start, format!("expected {what}, found byte 0x{b:02x}")),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(start, format!("{what} is too large")))
    }
}

pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        Some(m) => {
            return Err(parse_err(
                0,
                format!("unsupported magic {:?}; expected P2 or P5", String::from_utf8_lossy(m)),
            ))
        }
        None => return Err(parse_err(0, "missing magic number")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(parse_err(2, "expected whitespace after magic number"));
    }
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    cur.skip_space_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if !(1..=65535).contains(&maxval) {
        return Err(parse_err(maxval_at, format!("maxval {maxval} outside 1..=65535")));
    }
    let maxval = maxval as u16;
    let dims = GridDims::new(height, width).map_err(|e| parse_err(maxval_at, e.to_string()))?;
    let n = dims.node_count();

    let mut pixels = Vec::with_capacity(n);
    if binary {
        if !cur.bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(parse_err(cur.pos, "expected a single whitespace byte before raster"));
        }
        let start = cur.pos + 1;
        let sample = if maxval > 255 { 2 } else { 1 };
        let need = n * sample;
        let data = bytes.get(start..start + need).ok_or_else(|| {
            parse_err(
                bytes.len(),
                format!(
                    "truncated raster: need {need} bytes, found {}",
                    bytes.len() - start.min(bytes.len())
                ),
            )
        })?;
        for (k, chunk) in data.chunks_exact(sample).enumerate() {
            let v = match chunk {
                [b] => u16::from(*b),
                [hi, lo] => u16::from_be_bytes([*hi, *lo]),
                _ => unreachable!(),
            };
            if v > maxval {
                return Err(parse_err(
                    start + k * sample,
                    format!("sample {v} exceeds maxval {maxval}"),
                ));
            }
            pixels.push(v);
        }
    } else {
        for _ in 0..n {
            cur.skip_space_and_comments();
            let at = cur.pos;
            let v = cur.number("sample")?;
            if v > u32::from(maxval) {
                return Err(parse_err(at, format!("sample {v} exceeds maxval {maxval}")));
            }
            pixels.push(v as u16);
        }
    }
    GrayImage::new(dims, maxval, pixels)
}

/// Serializes as raw `P5` when `binary`, plain `P2` otherwise.
pub fn write_pgm(img: &GrayImage, binary: bool) -> Vec<u8> {
    let GridDims { height, width } = img.dims;
    let magic = if binary { "P5" } else { "P2" };
    let mut out = format!("{magic}\n{width} {height}\n{}\n", img.maxval).into_bytes();
    if binary {
        for &p in &img.pixels {
            if img.maxval > 255 {
                out.extend_from_slice(&p.to_be_bytes());
            } else {
                out.push(p as u8);
            }
        }
    } else {
        for row in img.pixels.chunks(width) {
            let line: Vec<String> = row.iter().map(u16::to_string).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}
