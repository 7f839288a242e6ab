//! Reading and writing fields.
//!
//! Binary layout (little endian):
//!
//! ```text
//! b"APME1"          magic
//! u32               dimension n
//! u64 × n           node counts
//! f64 × n           half-widths
//! f64 × n           spacings (informational, recomputed on read)
//! f64 × n           exponents m_i
//! f64               time
//! u8                frame (0 original, 1 rescaled)
//! f64 × Π sizes     values, row-major
//! ```
//!
//! One-dimensional fields can also be written as CSV: `# key=value` header
//! lines (`m`, `time`, `frame`, `half_width`, `size`) followed by `x,value`.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::solver::{Field, Frame, Grid, SolverError};

const MAGIC: &[u8; 5] = b"APME1";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed snapshot: {0}")]
    Format(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A field together with the exponents it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: Field,
    pub m: Vec<f64>,
}

pub fn write_binary<W: Write>(w: &mut W, field: &Field, m: &[f64]) -> Result<(), SnapshotError> {
    let g = field.grid();
    if m.len() != g.dim() {
        return Err(SnapshotError::Format(format!(
            "{} exponents for a {}-d field",
            m.len(),
            g.dim()
        )));
    }
    w.write_all(MAGIC)?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    for &s in g.sizes() {
        w.write_all(&(s as u64).to_le_bytes())?;
    }
    for arr in [g.half_widths(), g.spacings(), m] {
        for v in arr {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.write_all(&field.time().to_le_bytes())?;
    w.write_all(&[field.frame().tag()])?;
    let mut buf = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(r: &mut R) -> Result<Snapshot, SnapshotError> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SnapshotError::Format("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    if n == 0 || n > crate::params::MAX_DIM {
        return Err(SnapshotError::Format(format!("dimension {n}")));
    }
    let sizes = (0..n)
        .map(|_| read_u64(r).map(|s| s as usize))
        .collect::<io::Result<Vec<_>>>()?;
    let half = (0..n).map(|_| read_f64(r)).collect::<io::Result<Vec<_>>>()?;
    let _spacings = (0..n).map(|_| read_f64(r)).collect::<io::Result<Vec<_>>>()?;
    let m = (0..n).map(|_| read_f64(r)).collect::<io::Result<Vec<_>>>()?;
    let time = read_f64(r)?;
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let frame =
        Frame::from_tag(tag[0]).ok_or_else(|| SnapshotError::Format(format!("frame tag {}", tag[0])))?;
    let grid = Grid::new(&sizes, &half)?;
    let count = grid.len();
    let mut raw = vec![0u8; 8 * count];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let field = Field::new(grid, values, time, frame)?;
    Ok(Snapshot { field, m })
}

pub fn write_csv<W: Write>(w: &mut W, field: &Field, m: &[f64]) -> Result<(), SnapshotError> {
    let g = field.grid();
    if g.dim() != 1 || m.len() != 1 {
        return Err(SnapshotError::Format("CSV output is for 1-d fields".into()));
    }
    writeln!(w, "# m={:e}", m[0])?;
    writeln!(w, "# time={:e}", field.time())?;
    writeln!(w, "# frame={}", field.frame())?;
    writeln!(w, "# half_width={:e}", g.half_widths()[0])?;
    writeln!(w, "# size={}", g.sizes()[0])?;
    writeln!(w, "x,value")?;
    for (k, v) in field.values().iter().enumerate() {
        writeln!(w, "{:e},{:e}", g.coord(0, k), v)?;
    }
    Ok(())
}

pub fn read_csv<R: Read>(r: &mut R) -> Result<Snapshot, SnapshotError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut m = None;
    let mut time = None;
    let mut frame = None;
    let mut half = None;
    let mut size = None;
    let mut values = Vec::new();
    let bad = |s: &str| SnapshotError::Format(s.to_string());
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line == "x,value" {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let (k, v) = h.trim().split_once('=').ok_or_else(|| bad(line))?;
            let v = v.trim();
            match k.trim() {
                "m" => m = Some(v.parse::<f64>().map_err(|_| bad(line))?),
                "time" => time = Some(v.parse::<f64>().map_err(|_| bad(line))?),
                "frame" => frame = Some(v.parse::<Frame>().map_err(|e| bad(&e))?),
                "half_width" => half = Some(v.parse::<f64>().map_err(|_| bad(line))?),
                "size" => size = Some(v.parse::<usize>().map_err(|_| bad(line))?),
                _ => return Err(bad(line)),
            }
            continue;
        }
        let (_, v) = line.split_once(',').ok_or_else(|| bad(line))?;
        values.push(v.trim().parse::<f64>().map_err(|_| bad(line))?);
    }
    let missing = |k: &str| SnapshotError::Format(format!("missing header '{k}'"));
    let grid = Grid::new(
        &[size.ok_or_else(|| missing("size"))?],
        &[half.ok_or_else(|| missing("half_width"))?],
    )?;
    let field = Field::new(
        grid,
        values,
        time.ok_or_else(|| missing("time"))?,
        frame.ok_or_else(|| missing("frame"))?,
    )?;
    Ok(Snapshot {
        field,
        m: vec![m.ok_or_else(|| missing("m"))?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let g = Grid::new(&[5, 4, 3], &[1.0, 2.0, 0.5]).unwrap();
        let f = Field::from_fn(g, 2.5, Frame::Rescaled, |p| p[0] * p[0] + p[1].abs() + p[2] + 1.0).unwrap();
        let mut buf = Vec::new();
        write_binary(&mut buf, &f, &[0.5, 1.0, 1.5]).unwrap();
        let s = read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(s.field, f);
        assert_eq!(s.m, vec![0.5, 1.0, 1.5]);
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid::new(&[11], &[1.0]).unwrap();
        let f = Field::from_fn(g, 0.125, Frame::Original, |p| (1.0 - p[0] * p[0]) / 3.0).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &f, &[2.0]).unwrap();
        let s = read_csv(&mut buf.as_slice()).unwrap();
        assert_eq!(s.field, f);
        assert_eq!(s.m, vec![2.0]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_binary(&mut &b"APMX1\0\0\0\0"[..]).is_err());
        assert!(read_binary(&mut &b"APME1"[..]).is_err());
        assert!(read_csv(&mut &b"# size=3\nx,value\n0,1\n"[..]).is_err());
    }
}
