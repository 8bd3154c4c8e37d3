//! Grid function serialization.
//!
//! CSV: header `x_1,y_1,...,x_n,y_n,value`, one row per node that carries a value,
//! floats in shortest round-trip form.
//!
//! Binary: a 16-byte header followed by every node value (exterior nodes
//! included, as NaN) as little-endian f64 in row-major order:
//!
//! | bytes | content                                       |
//! |-------|-----------------------------------------------|
//! | 0..4  | magic `MHGF`                                  |
//! | 4..8  | complex dimension n, u32 LE                   |
//! | 8..12 | nodes per axis, u32 LE                        |
//! | 12..16| topology tag, u32 LE (0 ball, 1 cube, 2 torus) |

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridFunction, Topology};

pub const BINARY_MAGIC: [u8; 4] = *b"MHGF";

pub fn csv_header(n: usize) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * n + 1);
    for j in 1..=n {
        cols.push(format!("x_{j}"));
        cols.push(format!("y_{j}"));
    }
    cols.push("value".to_string());
    cols
}

pub fn write_csv<W: Write>(u: &GridFunction, out: W) -> Result<()> {
    let d = u.domain();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(d.n()))?;
    let mut row: Vec<String> = Vec::with_capacity(d.axes() + 1);
    for i in 0..d.len() {
        if !d.is_active(i) {
            continue;
        }
        row.clear();
        row.extend(d.coords(i).iter().map(|c| format!("{c}")));
        row.push(format!("{}", u.get(i)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`] onto `domain`. Rows are matched to
/// nodes by coordinates; every interior and boundary node must be present.
pub fn read_csv<R: Read>(domain: &Arc<GridDomain>, input: R) -> Result<GridFunction> {
    let mut r = csv::Reader::from_reader(input);
    let want = csv_header(domain.n());
    let header: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if header != want {
        return Err(Error::Format(format!(
            "expected columns {want:?}, found {header:?}"
        )));
    }
    let mut values = vec![f64::NAN; domain.len()];
    let mut seen = vec![false; domain.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parsed: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("row {}: {e}", line + 1)))?;
        let (x, v) = parsed.split_at(domain.axes());
        let i = domain
            .locate(x)
            .ok_or_else(|| Error::Format(format!("row {}: coordinates off the grid", line + 1)))?;
        let snapped = domain.coords(i);
        let tol = 1e-6 * domain.h();
        if !domain.is_periodic() && x.iter().zip(snapped.iter()).any(|(a, b)| (a - b).abs() > tol) {
            return Err(Error::Format(format!(
                "row {}: coordinates not on a grid node",
                line + 1
            )));
        }
        values[i] = v[0];
        seen[i] = true;
    }
    if let Some(i) = (0..domain.len()).find(|&i| domain.is_active(i) && !seen[i]) {
        return Err(Error::Format(format!("missing value for node {i}")));
    }
    GridFunction::from_values(domain.clone(), values)
}

fn topology_tag(t: Topology) -> u32 {
    match t {
        Topology::Ball { .. } => 0,
        Topology::Cube { .. } => 1,
        Topology::Torus { .. } => 2,
    }
}

pub fn write_binary<W: Write>(u: &GridFunction, mut out: W) -> Result<()> {
    let d = u.domain();
    out.write_all(&BINARY_MAGIC)?;
    out.write_all(&(d.n() as u32).to_le_bytes())?;
    out.write_all(&(d.nodes_per_axis() as u32).to_le_bytes())?;
    out.write_all(&topology_tag(d.topology()).to_le_bytes())?;
    for v in u.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a binary block onto `domain`, which must match the header.
pub fn read_binary<R: Read>(domain: &Arc<GridDomain>, mut input: R) -> Result<GridFunction> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if header[0..4] != BINARY_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(header[k..k + 4].try_into().unwrap()) as usize;
    let (n, nodes, tag) = (word(4), word(8), word(12) as u32);
    if n != domain.n() || nodes != domain.nodes_per_axis() || tag != topology_tag(domain.topology()) {
        return Err(Error::Format(format!(
            "header (n={n}, nodes={nodes}, topology={tag}) does not match the domain"
        )));
    }
    let mut values = Vec::with_capacity(domain.len());
    let mut buf = [0u8; 8];
    for _ in 0..domain.len() {
        input.read_exact(&mut buf)?;
        values.push(f64::from_le_bytes(buf));
    }
    GridFunction::from_values(domain.clone(), values)
}
