//! Binary and CSV export of lattice states.
//!
//! Binary layout (all little-endian):
//!
//! ```text
//! "LATS"  magic, 4 bytes
//! u32     version (1)
//! u32     n
//! i32     ell (−1 when unlabeled)
//! f64 ×2  re, im for each of the n³ sites in flat x-major order
//! ```

use std::io::{Read, Write};

use super::{Grid3, LatticeState};
use crate::error::{Error, Result};
use crate::linalg::C64;

const MAGIC: &[u8; 4] = b"LATS";
const VERSION: u32 = 1;

pub fn write_binary<W: Write>(state: &LatticeState, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(state.grid().n() as u32).to_le_bytes())?;
    let ell = state.ell().map(|l| l as i32).unwrap_or(-1);
    out.write_all(&ell.to_le_bytes())?;
    let mut buf = Vec::with_capacity(state.amps().len() * 16);
    for a in state.amps() {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut input: R) -> Result<LatticeState> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, expected LATS".into()));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let grid = Grid3::new(read_u32(&mut input)? as usize)?;
    let ell = read_u32(&mut input)? as i32;
    let ell = match ell {
        -1 => None,
        l if l >= 0 => Some(l as u32),
        l => return Err(Error::Format(format!("invalid ell {l}"))),
    };
    let mut raw = vec![0u8; grid.len() * 16];
    input.read_exact(&mut raw)?;
    let amps = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            C64::new(re, im)
        })
        .collect();
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after amplitude block".into()));
    }
    Ok(LatticeState::from_parts(grid, amps, ell))
}

/// CSV with columns `x,y,z,re,im` for every nonzero site.
pub fn write_csv<W: Write>(state: &LatticeState, mut out: W) -> Result<()> {
    writeln!(out, "x,y,z,re,im")?;
    let grid = state.grid();
    for (i, a) in state.amps().iter().enumerate() {
        if a.re != 0.0 || a.im != 0.0 {
            let [x, y, z] = grid.coords(i);
            writeln!(out, "{x},{y},{z},{:e},{:e}", a.re, a.im)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{sample_ylm_state, ShellSpec};

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let grid = Grid3::new(16).unwrap();
        let shell = ShellSpec::new(4.0, 2.0).unwrap();
        let s = sample_ylm_state(2, -1, grid, shell).unwrap();
        let mut buf = Vec::new();
        write_binary(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16 * grid.len());
        assert_eq!(&buf[..4], b"LATS");
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 16);
        assert_eq!(i32::from_le_bytes(buf[12..16].try_into().unwrap()), 2);
        let back = read_binary(&buf[..]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn binary_rejects_corruption() {
        let grid = Grid3::new(8).unwrap();
        let mut amps = vec![C64::from(0.0); grid.len()];
        amps[0] = C64::from(1.0);
        let s = LatticeState::new(grid, amps).unwrap();
        let mut buf = Vec::new();
        write_binary(&s, &mut buf).unwrap();
        assert_eq!(i32::from_le_bytes(buf[12..16].try_into().unwrap()), -1);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_binary(&bad[..]), Err(Error::Format(_))));
        let truncated = &buf[..buf.len() - 1];
        assert!(matches!(read_binary(truncated), Err(Error::Io(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(read_binary(&long[..]), Err(Error::Format(_))));
    }

    #[test]
    fn csv_lists_nonzero_sites() {
        let grid = Grid3::new(8).unwrap();
        let mut amps = vec![C64::from(0.0); grid.len()];
        amps[grid.index([1, 2, 3])] = C64::new(0.6, 0.0);
        amps[grid.index([4, 0, 7])] = C64::new(0.0, -0.8);
        let s = LatticeState::new(grid, amps).unwrap();
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec!["x,y,z,re,im", "1,2,3,6e-1,0e0", "4,0,7,0e0,-8e-1"]);
    }
}
