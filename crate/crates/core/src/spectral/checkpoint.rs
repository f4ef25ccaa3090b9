use std::io::{Read, Write};

use super::field::{Layout, RealField};
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const FIELD_MAGIC: &[u8; 4] = b"EULB";
pub const FIELD_VERSION: u32 = 1;

/// Write `{magic, version, n, components}` followed by little-endian `f64`
/// samples, components in declared order, x fastest.
pub fn write_field<W: Write>(w: &mut W, f: &RealField) -> Result<()> {
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&FIELD_VERSION.to_le_bytes())?;
    w.write_all(&(f.grid().n() as u32).to_le_bytes())?;
    w.write_all(&(f.components() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(f.data().len() * 8);
    for v in f.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn read_field<R: Read>(r: &mut R) -> Result<RealField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Input("bad field magic".into()));
    }
    let version = read_u32(r)?;
    if version != FIELD_VERSION {
        return Err(Error::Input(format!("unsupported field version {version}")));
    }
    let grid = GridSpec::new(read_u32(r)? as usize)?;
    let layout = Layout::from_components(read_u32(r)? as usize)?;
    let count = grid.points() * layout.components();
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes)?;
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    RealField::from_vec(grid, layout, data)
}
