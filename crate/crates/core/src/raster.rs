//! Binary field files.
//!
//! Both formats are an 8-byte magic, `H` and `W` as little-endian `u32`, then
//! `H*W` little-endian 8-byte values in row-major order.
//!
//! * `ANYDIST1`: `f64` distances, `+inf` for unreached nodes.
//! * `ANYPRED1`: `i64` column-major linear predecessor indices, `-1` for none.

use crate::error::{Error, Result};
use crate::lattice::{Grid, GridDims};
use crate::sweep::NO_PRED;

pub const DIST_MAGIC: &[u8; 8] = b"ANYDIST1";
pub const PRED_MAGIC: &[u8; 8] = b"ANYPRED1";
const HEADER_LEN: usize = 16;

fn header(magic: &[u8; 8], dims: GridDims) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * dims.node_count());
    out.extend_from_slice(magic);
    out.extend_from_slice(&(dims.height as u32).to_le_bytes());
    out.extend_from_slice(&(dims.width as u32).to_le_bytes());
    out
}

pub fn encode_distances(field: &Grid<f64>) -> Vec<u8> {
    let mut out = header(DIST_MAGIC, field.dims());
    for v in field.to_row_major() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn encode_predecessors(field: &Grid<u32>) -> Vec<u8> {
    let mut out = header(PRED_MAGIC, field.dims());
    for p in field.to_row_major() {
        let v: i64 = if p == NO_PRED { -1 } else { i64::from(p) };
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn parse_header<'a>(bytes: &'a [u8], magic: &[u8; 8]) -> Result<(GridDims, &'a [u8])> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("header needs {HEADER_LEN} bytes"),
        });
    }
    if &bytes[..8] != magic {
        return Err(Error::Parse {
            offset: 0,
            message: format!("expected magic {:?}", String::from_utf8_lossy(magic)),
        });
    }
    let h = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let dims = GridDims::new(h, w).map_err(|e| Error::Parse {
        offset: 8,
        message: e.to_string(),
    })?;
    let payload = &bytes[HEADER_LEN..];
    let expected = 8 * dims.node_count();
    if payload.len() != expected {
        return Err(Error::Parse {
            offset: HEADER_LEN + payload.len().min(expected),
            message: format!("payload is {} bytes, expected {expected}", payload.len()),
        });
    }
    Ok((dims, payload))
}

pub fn decode_distances(bytes: &[u8]) -> Result<Grid<f64>> {
    let (dims, payload) = parse_header(bytes, DIST_MAGIC)?;
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Grid::from_row_major(dims, &values))
}

pub fn decode_predecessors(bytes: &[u8]) -> Result<Grid<u32>> {
    let (dims, payload) = parse_header(bytes, PRED_MAGIC)?;
    let n = dims.node_count() as i64;
    let mut values = Vec::with_capacity(dims.node_count());
    for (k, c) in payload.chunks_exact(8).enumerate() {
        let v = i64::from_le_bytes(c.try_into().unwrap());
        if !(-1..n).contains(&v) {
            return Err(Error::Parse {
                offset: HEADER_LEN + 8 * k,
                message: format!("predecessor {v} outside [-1, {n})"),
            });
        }
        values.push(if v < 0 { NO_PRED } else { v as u32 });
    }
    Ok(Grid::from_row_major(dims, &values))
}
