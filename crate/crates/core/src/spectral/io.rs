use std::io::{Read, Write};

use super::{Grid, RealField, SpectralError};

pub const FGS1_MAGIC: [u8; 4] = *b"FGS1";
const MAX_SAMPLES: f64 = (1u64 << 30) as f64;

fn io_err(e: std::io::Error) -> SpectralError {
    SpectralError::Snapshot(e.to_string())
}

/// Magic, `u32 N`, `u32 M`, `f64 L`, `f64 α`, then the samples, all little-endian.
pub fn write_fgs1<W: Write>(u: &RealField, mut out: W) -> Result<(), SpectralError> {
    let grid = u.grid();
    let mut buf = Vec::with_capacity(28 + 8 * grid.len());
    buf.extend_from_slice(&FGS1_MAGIC);
    buf.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.points() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.half_length().to_le_bytes());
    buf.extend_from_slice(&grid.alpha().to_le_bytes());
    for v in u.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn read_fgs1<R: Read>(mut input: R) -> Result<RealField, SpectralError> {
    let mut header = [0u8; 28];
    input.read_exact(&mut header).map_err(io_err)?;
    if header[..4] != FGS1_MAGIC {
        return Err(SpectralError::Snapshot("bad magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().expect("4 bytes"));
    let real = |i: usize| f64::from_le_bytes(header[i..i + 8].try_into().expect("8 bytes"));
    let (dim, points) = (word(4) as usize, word(8) as usize);
    if !(1..=3).contains(&dim) || (points as f64).powi(dim as i32) > MAX_SAMPLES {
        return Err(SpectralError::Snapshot(format!("implausible header N = {dim}, M = {points}")));
    }
    let grid = Grid::new(dim, real(20), real(12), points)?;
    let mut body = Vec::new();
    input.read_to_end(&mut body).map_err(io_err)?;
    if body.len() != 8 * grid.len() {
        return Err(SpectralError::LengthMismatch {
            expected: grid.len(),
            got: body.len() / 8,
        });
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    RealField::new(&grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::gaussian_bump;

    #[test]
    fn round_trip_is_bitwise() {
        let grid = Grid::new(2, 0.75, 6.5, 16).unwrap();
        let u = gaussian_bump(&grid, &[0.1, -0.3], 1.1, std::f64::consts::PI);
        let mut bytes = Vec::new();
        write_fgs1(&u, &mut bytes).unwrap();
        assert_eq!(bytes.len(), 28 + 8 * 256);
        assert_eq!(&bytes[..4], b"FGS1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 16);
        assert_eq!(f64::from_le_bytes(bytes[12..20].try_into().unwrap()), 6.5);
        let back = read_fgs1(bytes.as_slice()).unwrap();
        assert!(back.grid().same_as(&grid));
        assert!(back.values().iter().zip(u.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn corrupt_snapshots_are_rejected() {
        let grid = Grid::new(1, 0.5, 4.0, 8).unwrap();
        let mut bytes = Vec::new();
        write_fgs1(&RealField::zeros(&grid), &mut bytes).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(read_fgs1(bad.as_slice()), Err(SpectralError::Snapshot(_))));
        assert!(matches!(read_fgs1(&bytes[..bytes.len() - 8]), Err(SpectralError::LengthMismatch { .. })));
        assert!(read_fgs1(&bytes[..10]).is_err());
    }
}
