//! Snapshot streams.
//!
//! Binary layout, little-endian throughout:
//!
//! ```text
//! magic   8 bytes  "NWSNAP01"
//! n       u32      spatial dimension
//! points  u32 × n  points per axis
//! h       f64      grid spacing
//! dt      f64      time step
//! t0      f64      initial time
//! then, until end of file, one record per snapshot:
//! index   u64
//! t       f64
//! u       f64 × Πpoints   (axis 1 slowest)
//! u_t     f64 × Πpoints
//! ```

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::grid::GridSpec;
use crate::solver::Snapshot;

pub const MAGIC: &[u8; 8] = b"NWSNAP01";

#[derive(Debug, Error)]
pub enum SnapError {
    #[error("not a snapshot stream (bad magic)")]
    Magic,
    #[error("snapshot stream is truncated")]
    Truncated,
    #[error("snapshot has {got} cells, header says {expected}")]
    Length { got: usize, expected: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub points: Vec<usize>,
    pub h: f64,
    pub dt: f64,
    pub t0: f64,
}

impl Header {
    pub fn new(grid: &GridSpec, dt: f64, t0: f64) -> Header {
        Header { points: grid.points().to_vec(), h: grid.h(), dt, t0 }
    }

    pub fn cells(&self) -> usize {
        self.points.iter().product()
    }
}

pub struct SnapshotWriter<W: Write> {
    out: W,
    cells: usize,
    written: usize,
}

impl<W: Write> SnapshotWriter<W> {
    pub fn new(mut out: W, header: &Header) -> Result<SnapshotWriter<W>, SnapError> {
        out.write_all(MAGIC)?;
        out.write_all(&(header.points.len() as u32).to_le_bytes())?;
        for p in &header.points {
            out.write_all(&(*p as u32).to_le_bytes())?;
        }
        for x in [header.h, header.dt, header.t0] {
            out.write_all(&x.to_le_bytes())?;
        }
        Ok(SnapshotWriter { out, cells: header.cells(), written: 0 })
    }

    pub fn push(&mut self, s: &Snapshot) -> Result<(), SnapError> {
        for v in [&s.u, &s.ut] {
            if v.len() != self.cells {
                return Err(SnapError::Length { got: v.len(), expected: self.cells });
            }
        }
        self.out.write_all(&(s.index as u64).to_le_bytes())?;
        self.out.write_all(&s.t.to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.cells);
        for x in s.u.iter().chain(&s.ut) {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        self.out.write_all(&buf)?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.written
    }

    pub fn finish(mut self) -> Result<W, SnapError> {
        self.out.flush()?;
        Ok(self.out)
    }
}

fn read_exact_or(r: &mut impl Read, buf: &mut [u8]) -> Result<bool, SnapError> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..])? {
            0 if filled == 0 => return Ok(false),
            0 => return Err(SnapError::Truncated),
            k => filled += k,
        }
    }
    Ok(true)
}

fn u32_at(r: &mut impl Read) -> Result<u32, SnapError> {
    let mut b = [0u8; 4];
    if !read_exact_or(r, &mut b)? {
        return Err(SnapError::Truncated);
    }
    Ok(u32::from_le_bytes(b))
}

fn f64_at(r: &mut impl Read) -> Result<f64, SnapError> {
    let mut b = [0u8; 8];
    if !read_exact_or(r, &mut b)? {
        return Err(SnapError::Truncated);
    }
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshots(mut r: impl Read) -> Result<(Header, Vec<Snapshot>), SnapError> {
    let mut magic = [0u8; 8];
    if !read_exact_or(&mut r, &mut magic)? || &magic != MAGIC {
        return Err(SnapError::Magic);
    }
    let n = u32_at(&mut r)? as usize;
    let points = (0..n).map(|_| u32_at(&mut r).map(|p| p as usize)).collect::<Result<Vec<_>, _>>()?;
    let header = Header { points, h: f64_at(&mut r)?, dt: f64_at(&mut r)?, t0: f64_at(&mut r)? };
    let cells = header.cells();
    let mut out = Vec::new();
    loop {
        let mut idx = [0u8; 8];
        if !read_exact_or(&mut r, &mut idx)? {
            break;
        }
        let t = f64_at(&mut r)?;
        let mut body = vec![0u8; 16 * cells];
        if !read_exact_or(&mut r, &mut body)? {
            return Err(SnapError::Truncated);
        }
        let vals: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        out.push(Snapshot { index: u64::from_le_bytes(idx) as usize, t, u: vals[..cells].to_vec(), ut: vals[cells..].to_vec() });
    }
    Ok((header, out))
}

/// `index,t,x1[,x2],u,ut` rows.
pub fn write_csv(out: &mut impl Write, snaps: &[Snapshot], grid: &GridSpec) -> io::Result<()> {
    let coords = (1..=grid.n()).map(|a| format!("x{}", a)).collect::<Vec<_>>().join(",");
    writeln!(out, "index,t,{},u,ut", coords)?;
    for s in snaps {
        for idx in 0..grid.len() {
            let x = grid.position(idx);
            write!(out, "{},{:e}", s.index, s.t)?;
            for xa in x.iter().take(grid.n()) {
                write!(out, ",{:e}", xa)?;
            }
            writeln!(out, ",{:e},{:e}", s.u[idx], s.ut[idx])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let grid = GridSpec::cube(2, 4.0, 8).unwrap();
        let snaps: Vec<Snapshot> = (0..3)
            .map(|k| Snapshot {
                index: 5 * k,
                t: 1.0 + k as f64 * 0.1,
                u: (0..64).map(|i| (i * k) as f64 * 0.5).collect(),
                ut: (0..64).map(|i| -(i as f64) / 3.0).collect(),
            })
            .collect();
        let mut w = SnapshotWriter::new(Vec::new(), &Header::new(&grid, 0.1, 1.0)).unwrap();
        for s in &snaps {
            w.push(s).unwrap();
        }
        assert_eq!(w.written(), 3);
        let bytes = w.finish().unwrap();
        assert_eq!(&bytes[..8], MAGIC);
        let (h, back) = read_snapshots(&bytes[..]).unwrap();
        assert_eq!(h, Header::new(&grid, 0.1, 1.0));
        assert_eq!(back, snaps);
        assert!(matches!(read_snapshots(&bytes[..bytes.len() - 3]), Err(SnapError::Truncated)));
        assert!(matches!(read_snapshots(&b"NOTSNAP!"[..]), Err(SnapError::Magic)));
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let grid = GridSpec::cube(1, 2.0, 8).unwrap();
        let s = Snapshot { index: 0, t: 0.0, u: vec![1.0; 8], ut: vec![0.0; 8] };
        let mut out = Vec::new();
        write_csv(&mut out, &[s], &grid).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 9);
        assert!(text.starts_with("index,t,x1,u,ut\n"));
    }
}
