//! The `PSQF` binary field format and CSV slice export.
//!
//! Layout, all little-endian: magic `PSQF`, version `u32 = 1`, `dim: u32`,
//! then for each of the `2·dim` axes `min: f64, max: f64, n: u64`, then
//! `ħ: f64, θ: f64`, then the values as interleaved `(re, im)` `f64` pairs in
//! row-major order with the last axis fastest.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{PsqmError, Result};
use crate::grid::{Axis, Field, PhaseGrid};

pub const MAGIC: &[u8; 4] = b"PSQF";
pub const VERSION: u32 = 1;

/// Serialise a field to bytes.
pub fn encode_field(field: &Field) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(16 + 24 * grid.naxes() + 16 + 16 * field.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for a in grid.axes() {
        out.extend_from_slice(&a.min.to_le_bytes());
        out.extend_from_slice(&a.max.to_le_bytes());
        out.extend_from_slice(&(a.n as u64).to_le_bytes());
    }
    out.extend_from_slice(&grid.hbar().to_le_bytes());
    out.extend_from_slice(&grid.theta().to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| PsqmError::Format(format!("truncated header while reading {what}")))?;
        self.pos = end;
        Ok(bytes.try_into().expect("length checked"))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(what)?))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(what)?))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(what)?))
    }
}

/// Parse a field from bytes.
pub fn decode_field(buf: &[u8]) -> Result<Field> {
    let mut r = Reader { buf, pos: 0 };
    if &r.take::<4>("magic")? != MAGIC {
        return Err(PsqmError::Format("bad magic, not a PSQF file".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(PsqmError::Format(format!("unsupported version {version}")));
    }
    let dim = r.u32("dim")? as usize;
    if dim == 0 || dim > 16 {
        return Err(PsqmError::Format(format!("implausible dimension {dim}")));
    }
    let mut axes = Vec::with_capacity(2 * dim);
    for _ in 0..2 * dim {
        let min = r.f64("axis min")?;
        let max = r.f64("axis max")?;
        let n = r.u64("axis size")?;
        let n = usize::try_from(n)
            .map_err(|_| PsqmError::Format(format!("axis size {n} too large")))?;
        axes.push(Axis::new(min, max, n));
    }
    let hbar = r.f64("hbar")?;
    let theta = r.f64("theta")?;
    let grid = Arc::new(PhaseGrid::new(dim, axes, hbar, theta)?);
    let expected = 16 * grid.len();
    let payload = &buf[r.pos..];
    if payload.len() != expected {
        return Err(PsqmError::Format(format!(
            "payload is {} bytes, expected {expected}",
            payload.len()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Field::from_values(grid, values)
}

pub fn write_field(path: impl AsRef<Path>, field: &Field) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&encode_field(field))?;
    f.flush()?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<Field> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    decode_field(&buf)
}

/// Parse `"x=0,py=0.5"` into axis indices and values using the grid's axis names.
pub fn parse_slice_spec(grid: &PhaseGrid, spec: &str) -> Result<Vec<(usize, f64)>> {
    let names = grid.axis_names();
    let mut out: Vec<(usize, f64)> = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| {
            PsqmError::InvalidParameter(format!("slice entry `{part}` is not AXIS=VALUE"))
        })?;
        let axis = names.iter().position(|n| n == name.trim()).ok_or_else(|| {
            PsqmError::InvalidParameter(format!(
                "unknown axis `{}`; axes are {names:?}",
                name.trim()
            ))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            PsqmError::InvalidParameter(format!("bad value in slice entry `{part}`"))
        })?;
        if out.iter().any(|(a, _)| *a == axis) {
            return Err(PsqmError::InvalidParameter(format!(
                "axis `{}` fixed twice",
                name.trim()
            )));
        }
        out.push((axis, value));
    }
    Ok(out)
}

/// A 2D slice as CSV with header `a1,a2,re,im`. Every axis but two must be
/// fixed; fixed values snap to the nearest node.
pub fn slice_csv(field: &Field, fixed: &[(usize, f64)]) -> Result<String> {
    let grid = field.grid();
    let na = grid.naxes();
    let mut idx = vec![usize::MAX; na];
    for &(axis, value) in fixed {
        grid.check_axis(axis)?;
        let a = &grid.axes()[axis];
        let i = ((value - a.min) / a.spacing() - 0.5)
            .round()
            .clamp(0.0, (a.n - 1) as f64) as usize;
        idx[axis] = i;
    }
    let free: Vec<usize> = (0..na).filter(|&a| idx[a] == usize::MAX).collect();
    if free.len() != 2 {
        return Err(PsqmError::InvalidParameter(format!(
            "a slice needs exactly two free axes, got {}",
            free.len()
        )));
    }
    let names = grid.axis_names();
    let (a1, a2) = (free[0], free[1]);
    let mut out = format!("{},{},re,im\n", names[a1], names[a2]);
    for i in 0..grid.axes()[a1].n {
        for j in 0..grid.axes()[a2].n {
            idx[a1] = i;
            idx[a2] = j;
            let v = field.values()[grid.flat_index(&idx)];
            writeln!(
                out,
                "{},{},{:e},{:e}",
                grid.axes()[a1].node(i),
                grid.axes()[a2].node(j),
                v.re,
                v.im
            )
            .expect("writing to a String");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> Field {
        let g = Arc::new(PhaseGrid::uniform(1, 4.0, 8, 0.5, 0.0).unwrap());
        Field::sample(g, |u| Complex64::new(u[0].sin() * 1e-300, u[1] / 3.0)).unwrap()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let f = field();
        let g = decode_field(&encode_field(&f)).unwrap();
        assert_eq!(f.grid(), g.grid());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.psqf");
        write_field(&p, &field()).unwrap();
        assert_eq!(read_field(&p).unwrap(), field());
    }

    #[test]
    fn truncated_payload() {
        let b = encode_field(&field());
        let e = decode_field(&b[..b.len() - 3]).unwrap_err();
        assert!(
            matches!(&e, PsqmError::Format(m) if m.contains("payload")),
            "{e}"
        );
        let e = decode_field(&b[..10]).unwrap_err();
        assert!(
            matches!(&e, PsqmError::Format(m) if m.contains("truncated")),
            "{e}"
        );
    }

    #[test]
    fn bad_version_and_magic() {
        let mut b = encode_field(&field());
        b[4] = 2;
        let e = decode_field(&b).unwrap_err();
        assert!(
            matches!(&e, PsqmError::Format(m) if m.contains("unsupported version 2")),
            "{e}"
        );
        b[0] = b'X';
        assert!(matches!(decode_field(&b), Err(PsqmError::Format(m)) if m.contains("magic")));
    }

    #[test]
    fn csv_slice() {
        let g = Arc::new(PhaseGrid::uniform(2, 4.0, 8, 1.0, 0.0).unwrap());
        let f = Field::sample(g.clone(), |u| Complex64::new(u[0] + 10.0 * u[2], u[1])).unwrap();
        let fixed = parse_slice_spec(&g, "y=0.5, py=-0.5").unwrap();
        let csv = slice_csv(&f, &fixed).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,px,re,im");
        assert_eq!(lines.len(), 65);
        let first: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first, vec![-3.5, -3.5, -38.5, 0.5]);
        assert!(parse_slice_spec(&g, "z=1").is_err());
        assert!(parse_slice_spec(&g, "x").is_err());
        assert!(slice_csv(&f, &parse_slice_spec(&g, "y=0").unwrap()).is_err());
    }
}
