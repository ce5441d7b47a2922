//! Binary field snapshots.
//!
//! Little-endian layout:
//!   magic  b"MVPS"
//!   version u32 (currently 1)
//!   cells   u32 x 3
//!   origin  f64 x 3
//!   extent  f64 x 3
//!   components u32 (1 = scalar, 3 = vector)
//!   data    f64 x (nx * ny * nz * components), row-major cells,
//!           components interleaved per cell.

use std::fs;
use std::path::Path;

use crate::error::{MvpsError, Result};
use crate::fields::{GridSpec, ScalarField, VectorField};
use crate::vec3::Vec3;

pub const MAGIC: [u8; 4] = *b"MVPS";
pub const VERSION: u32 = 1;

fn encode(grid: &GridSpec, components: u32, data: impl Iterator<Item = f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(48 + grid.len() * components as usize * 8);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for &c in &grid.cells {
        out.extend_from_slice(&(c as u32).to_le_bytes());
    }
    for v in [grid.origin, grid.extent] {
        for c in [v.x, v.y, v.z] {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out.extend_from_slice(&components.to_le_bytes());
    for value in data {
        out.extend_from_slice(&value.to_le_bytes());
    }
    out
}

pub fn scalar_to_bytes(field: &ScalarField) -> Vec<u8> {
    encode(&field.grid, 1, field.values.iter().copied())
}

pub fn vector_to_bytes(field: &VectorField) -> Vec<u8> {
    encode(
        &field.grid,
        3,
        field.values.iter().flat_map(|v| [v.x, v.y, v.z]),
    )
}

pub fn write_scalar(path: &Path, field: &ScalarField) -> Result<()> {
    fs::write(path, scalar_to_bytes(field))
        .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn write_vector(path: &Path, field: &VectorField) -> Result<()> {
    fs::write(path, vector_to_bytes(field))
        .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", path.display())))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| MvpsError::Config("snapshot truncated".into()))?;
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn decode_header(r: &mut Reader) -> Result<(GridSpec, u32)> {
    if r.take(4)? != MAGIC {
        return Err(MvpsError::Config("snapshot has wrong magic bytes".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(MvpsError::Config(format!(
            "snapshot version {version} unsupported (expected {VERSION})"
        )));
    }
    let cells = [r.u32()? as usize, r.u32()? as usize, r.u32()? as usize];
    let origin = Vec3::new(r.f64()?, r.f64()?, r.f64()?);
    let extent = Vec3::new(r.f64()?, r.f64()?, r.f64()?);
    let components = r.u32()?;
    Ok((GridSpec::new(origin, extent, cells)?, components))
}

pub fn read_scalar(bytes: &[u8]) -> Result<ScalarField> {
    let mut r = Reader { bytes, pos: 0 };
    let (grid, components) = decode_header(&mut r)?;
    if components != 1 {
        return Err(MvpsError::Config(format!(
            "expected scalar snapshot, found {components} components"
        )));
    }
    let values: Vec<f64> = (0..grid.len()).map(|_| r.f64()).collect::<Result<_>>()?;
    Ok(ScalarField { grid, values })
}

pub fn read_vector(bytes: &[u8]) -> Result<VectorField> {
    let mut r = Reader { bytes, pos: 0 };
    let (grid, components) = decode_header(&mut r)?;
    if components != 3 {
        return Err(MvpsError::Config(format!(
            "expected vector snapshot, found {components} components"
        )));
    }
    let values: Vec<Vec3> = (0..grid.len())
        .map(|_| Ok(Vec3::new(r.f64()?, r.f64()?, r.f64()?)))
        .collect::<Result<_>>()?;
    Ok(VectorField { grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_grid() -> GridSpec {
        GridSpec::new(Vec3::new(-1.0, 0.0, 2.0), Vec3::new(2.0, 3.0, 4.0), [3, 4, 2]).unwrap()
    }

    #[test]
    fn scalar_round_trip_is_bitwise() {
        let grid = sample_grid();
        let values: Vec<f64> = (0..grid.len()).map(|i| (i as f64).sin() * 1e3).collect();
        let field = ScalarField { grid, values };
        let back = read_scalar(&scalar_to_bytes(&field)).unwrap();
        assert_eq!(field, back);
    }

    #[test]
    fn vector_round_trip_is_bitwise() {
        let grid = sample_grid();
        let values: Vec<Vec3> = (0..grid.len())
            .map(|i| Vec3::new(i as f64, -(i as f64), 0.5 * i as f64))
            .collect();
        let field = VectorField { grid, values };
        let back = read_vector(&vector_to_bytes(&field)).unwrap();
        assert_eq!(field, back);
    }

    #[test]
    fn corrupt_magic_is_rejected() {
        let grid = sample_grid();
        let field = ScalarField { grid, values: vec![0.0; grid.len()] };
        let mut bytes = scalar_to_bytes(&field);
        bytes[0] = b'X';
        assert!(read_scalar(&bytes).is_err());
    }

    #[test]
    fn truncation_is_rejected() {
        let grid = sample_grid();
        let field = ScalarField { grid, values: vec![1.0; grid.len()] };
        let bytes = scalar_to_bytes(&field);
        assert!(read_scalar(&bytes[..bytes.len() - 4]).is_err());
    }
}
