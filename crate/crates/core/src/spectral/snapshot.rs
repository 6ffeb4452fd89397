//! Binary snapshot files.
//!
//! Layout (all little-endian):
//!
//! ```text
//! "CWI1" | n: u32 | L: f64 | time: f64 | s: f64 | N: f64
//! n³ × (re: f64, im: f64)   coefficients of u
//! n³ × (re: f64, im: f64)   coefficients of ∂ₜu
//! ```
//!
//! Coefficient blocks are row-major in `(k₀, k₁, k₂)` with each component
//! running from `−n/2` to `n/2 − 1`. Coefficients use the unitary
//! normalization of [`SpectralField`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid3;
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CWI1";
pub const HEADER_BYTES: usize = 4 + 4 + 8 * 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub n: u32,
    pub box_length: f64,
    pub time: f64,
    pub s: f64,
    pub cutoff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub u: SpectralField,
    pub ut: SpectralField,
}

/// Storage index for the `j`-th entry of the k-ordered block.
fn storage_index(grid: &Grid3, j: usize) -> usize {
    let n = grid.n();
    let half = (n / 2) as i64;
    let [a, b, c] = grid.split(j);
    grid.index_of([a as i64 - half, b as i64 - half, c as i64 - half])
}

pub fn encode_snapshot(header: &SnapshotHeader, u: &SpectralField, ut: &SpectralField) -> Vec<u8> {
    let grid = u.grid();
    let mut out = Vec::with_capacity(HEADER_BYTES + 32 * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&header.n.to_le_bytes());
    for v in [header.box_length, header.time, header.s, header.cutoff] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for field in [u, ut] {
        let c = field.coefficients();
        for j in 0..grid.len() {
            let z = c[storage_index(grid, j)];
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_BYTES || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing CWI1 magic".into()));
    }
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let header = SnapshotHeader {
        n,
        box_length: f64_at(8),
        time: f64_at(16),
        s: f64_at(24),
        cutoff: f64_at(32),
    };
    let grid = Grid3::new(n as usize, header.box_length)
        .map_err(|e| Error::Format(format!("bad header: {e}")))?;
    let expected = HEADER_BYTES + 2 * 16 * grid.len();
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for n = {n}, found {}",
            bytes.len()
        )));
    }
    let mut fields = Vec::with_capacity(2);
    let mut offset = HEADER_BYTES;
    for _ in 0..2 {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for j in 0..grid.len() {
            coeffs[storage_index(&grid, j)] = Complex64::new(f64_at(offset), f64_at(offset + 8));
            offset += 16;
        }
        fields.push(SpectralField::from_coefficients(grid, coeffs)?);
    }
    let ut = fields.pop().unwrap();
    let u = fields.pop().unwrap();
    Ok(Snapshot { header, u, ut })
}

pub fn write_snapshot(
    path: &Path,
    header: &SnapshotHeader,
    u: &SpectralField,
    ut: &SpectralField,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_snapshot(header, u, ut))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes)
}
