//! Binary field snapshots: little-endian `(i32 n1, i32 n2, f64 re, f64 im)`
//! records for every non-Nyquist mode, with a JSON sidecar.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use liouville_core::{Field, Grid};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

const RECORD: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub m: usize,
    pub t: f64,
    pub step: usize,
    pub label: String,
    pub seed: u64,
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_snapshot(path: &Path, field: &Field, meta: &SnapshotMeta) -> io::Result<()> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(grid.len() * RECORD);
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let (n1, n2) = grid.mode(idx);
        let c = field.coeffs()[idx];
        buf.extend_from_slice(&(n1 as i32).to_le_bytes());
        buf.extend_from_slice(&(n2 as i32).to_le_bytes());
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::File::create(path)?.write_all(&buf)?;
    fs::write(sidecar(path), serde_json::to_string_pretty(meta)?)
}

pub fn read_snapshot(path: &Path) -> io::Result<(Field, SnapshotMeta)> {
    let meta: SnapshotMeta = serde_json::from_str(&fs::read_to_string(sidecar(path))?)?;
    let grid = Grid::new(meta.m).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() % RECORD != 0 {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "truncated snapshot record"));
    }
    let mut coeffs = vec![Complex::new(0.0, 0.0); grid.len()];
    let half = (meta.m / 2) as i64;
    for rec in bytes.chunks_exact(RECORD) {
        let n1 = i32::from_le_bytes(rec[0..4].try_into().unwrap()) as i64;
        let n2 = i32::from_le_bytes(rec[4..8].try_into().unwrap()) as i64;
        if n1.abs() >= half || n2.abs() >= half {
            return Err(io::Error::new(io::ErrorKind::InvalidData, format!("mode ({n1}, {n2}) off the grid")));
        }
        let re = f64::from_le_bytes(rec[8..16].try_into().unwrap());
        let im = f64::from_le_bytes(rec[16..24].try_into().unwrap());
        coeffs[grid.index(n1, n2)] = Complex::new(re, im);
    }
    let field = Field::from_coeffs(&grid, coeffs, 1e-12)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    Ok((field, meta))
}
