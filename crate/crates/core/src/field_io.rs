//! CSV and binary serialization of surface and cylinder data.
//!
//! CSV columns are `i,j,x1,t,f,g` for surface data and `i,x,f,g` on the
//! cylinder. The binary layout is a 16-byte header holding two
//! little-endian `u64` dimensions (`(n, 1)` for 1-D data), followed by all
//! of `f` and then all of `g` as little-endian `f64`, row-major.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::wave_cylinder::{CylinderData, CylinderGrid};
use crate::wave_mixed::{SurfaceData, SurfaceGrid};

#[derive(Serialize, Deserialize)]
struct SurfaceRow {
    i: usize,
    j: usize,
    x1: f64,
    t: f64,
    f: f64,
    g: f64,
}

#[derive(Serialize, Deserialize)]
struct CylinderRow {
    i: usize,
    x: f64,
    f: f64,
    g: f64,
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_surface_csv<W: Write>(data: &SurfaceData, w: W) -> Result<()> {
    let grid = data.grid;
    let mut wtr = csv_writer(w);
    for i in 0..grid.n1() {
        for j in 0..grid.nt() {
            let k = grid.index(i, j);
            wtr.serialize(SurfaceRow {
                i,
                j,
                x1: grid.x1(i),
                t: grid.t(j),
                f: data.f[k],
                g: data.g[k],
            })?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads surface data onto `grid`. Every grid point must appear exactly once.
pub fn read_surface_csv<R: Read>(grid: SurfaceGrid, r: R) -> Result<SurfaceData> {
    let mut f = vec![f64::NAN; grid.len()];
    let mut g = vec![f64::NAN; grid.len()];
    let mut seen = vec![false; grid.len()];
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: SurfaceRow = row?;
        if row.i >= grid.n1() || row.j >= grid.nt() {
            return Err(crate::Error::Index(format!(
                "row ({}, {}) outside {}×{} grid",
                row.i,
                row.j,
                grid.n1(),
                grid.nt()
            )));
        }
        let k = grid.index(row.i, row.j);
        if std::mem::replace(&mut seen[k], true) {
            return Err(validation(format!("duplicate row ({}, {})", row.i, row.j)));
        }
        f[k] = row.f;
        g[k] = row.g;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(validation(format!(
            "missing row ({}, {})",
            k / grid.nt(),
            k % grid.nt()
        )));
    }
    SurfaceData::new(grid, f, g)
}

pub fn write_cylinder_csv<W: Write>(data: &CylinderData, w: W) -> Result<()> {
    let grid = data.grid;
    let mut wtr = csv_writer(w);
    for i in 0..grid.n() {
        wtr.serialize(CylinderRow {
            i,
            x: grid.x(i),
            f: data.f[i],
            g: data.g[i],
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_cylinder_csv<R: Read>(grid: CylinderGrid, r: R) -> Result<CylinderData> {
    let n = grid.n();
    let mut f = vec![f64::NAN; n];
    let mut g = vec![f64::NAN; n];
    let mut seen = vec![false; n];
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: CylinderRow = row?;
        if row.i >= n {
            return Err(crate::Error::Index(format!(
                "row {} outside {n}-point grid",
                row.i
            )));
        }
        if std::mem::replace(&mut seen[row.i], true) {
            return Err(validation(format!("duplicate row {}", row.i)));
        }
        f[row.i] = row.f;
        g[row.i] = row.g;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(validation(format!("missing row {i}")));
    }
    CylinderData::new(grid, f, g)
}

fn write_binary<W: Write>(mut w: W, dims: (usize, usize), f: &[f64], g: &[f64]) -> Result<()> {
    w.write_all(&(dims.0 as u64).to_le_bytes())?;
    w.write_all(&(dims.1 as u64).to_le_bytes())?;
    for v in f.iter().chain(g) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_binary<R: Read>(mut r: R, dims: (usize, usize)) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut word = [0u8; 8];
    let mut header = [0u64; 2];
    for h in &mut header {
        r.read_exact(&mut word)?;
        *h = u64::from_le_bytes(word);
    }
    if header != [dims.0 as u64, dims.1 as u64] {
        return Err(validation(format!(
            "header dimensions {}×{} do not match grid {}×{}",
            header[0], header[1], dims.0, dims.1
        )));
    }
    let len = dims.0 * dims.1;
    let mut values = Vec::with_capacity(2 * len);
    for _ in 0..2 * len {
        r.read_exact(&mut word)?;
        values.push(f64::from_le_bytes(word));
    }
    let g = values.split_off(len);
    Ok((values, g))
}

pub fn write_surface_binary<W: Write>(data: &SurfaceData, w: W) -> Result<()> {
    write_binary(w, (data.grid.n1(), data.grid.nt()), &data.f, &data.g)
}

pub fn read_surface_binary<R: Read>(grid: SurfaceGrid, r: R) -> Result<SurfaceData> {
    let (f, g) = read_binary(r, (grid.n1(), grid.nt()))?;
    SurfaceData::new(grid, f, g)
}

pub fn write_cylinder_binary<W: Write>(data: &CylinderData, w: W) -> Result<()> {
    write_binary(w, (data.grid.n(), 1), &data.f, &data.g)
}

pub fn read_cylinder_binary<R: Read>(grid: CylinderGrid, r: R) -> Result<CylinderData> {
    let (f, g) = read_binary(r, (grid.n(), 1))?;
    CylinderData::new(grid, f, g)
}
