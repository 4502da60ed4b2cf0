//! Flat binary field snapshots: magic `PTHL`, `u32` version, `u32` n, `f64` L,
//! then `n²` row-major `f64` samples, all little-endian.

use std::io::{Read, Write};

use crate::error::{invalid, Result};

use super::grid::{Grid, ScalarField2D};

pub const MAGIC: &[u8; 4] = b"PTHL";
pub const VERSION: u32 = 1;

pub fn write_snapshot(f: &ScalarField2D, mut w: impl Write) -> std::io::Result<()> {
    let n = u32::try_from(f.grid.n).map_err(|_| std::io::Error::other("grid too large"))?;
    let mut buf = Vec::with_capacity(20 + 8 * f.values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&f.grid.l.to_le_bytes());
    for v in &f.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)
}

pub fn read_snapshot(mut r: impl Read) -> Result<ScalarField2D> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| invalid(format!("snapshot read: {e}")))?;
    if bytes.len() < 20 || &bytes[..4] != MAGIC {
        return Err(invalid("not a PTHL snapshot"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(invalid(format!("unsupported snapshot version {version}")));
    }
    let n = u32_at(8) as usize;
    let l = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let body = &bytes[20..];
    if body.len() != 8 * n * n {
        return Err(invalid(format!("expected {} samples, found {} bytes", n * n, body.len())));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    ScalarField2D::from_values(Grid::new(n, l)?, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_layout() {
        let g = Grid::new(4, 1.5).unwrap();
        let f = ScalarField2D::from_fn(g, |x, y| x - 2.0 * y);
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 20 + 8 * 16);
        assert_eq!(&buf[..4], b"PTHL");
        assert_eq!(&buf[8..12], &4u32.to_le_bytes());
        // second sample is (ix = 1, iy = 0): row-major with x fastest
        assert_eq!(f64::from_le_bytes(buf[28..36].try_into().unwrap()), f.at(1, 0));
        let back = read_snapshot(&buf[..]).unwrap();
        assert_eq!(back.values, f.values);
        assert_eq!(back.grid, g);
        assert!(read_snapshot(&buf[..30]).is_err());
    }
}
