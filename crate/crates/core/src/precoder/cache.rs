//! On-disk precoder cache.
//!
//! Layout, all little-endian:
//!
//! | field        | type            |
//! |--------------|-----------------|
//! | magic        | `b"UCPP"`       |
//! | version      | u32 = 1         |
//! | N            | u32             |
//! | r            | u32             |
//! | mask         | N bytes (0/1, centered order) |
//! | `U_rΣ_r`     | N·r f64, row-major |
//! | `V_r`        | N·r f64, row-major |
//! | `P`          | N·N f64, row-major |
//!
//! Files are named by [`cache_file_name`], keyed by N and a hash of the mask.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::numerics::RealMatrix;
use crate::precoder::mask::SpectralMask;
use crate::precoder::synth::Precoder;

pub const MAGIC: &[u8; 4] = b"UCPP";
pub const VERSION: u32 = 1;

/// FNV-1a over the mask bits.
pub fn mask_hash(mask: &SpectralMask) -> u64 {
    mask.m().iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn cache_file_name(mask: &SpectralMask) -> String {
    format!("ucp-n{}-{:016x}.bin", mask.n_total(), mask_hash(mask))
}

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_matrix(buf: &mut Vec<u8>, m: &RealMatrix) {
    for v in m.to_row_major() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn encode(pre: &Precoder) -> Vec<u8> {
    let n = pre.n();
    let r = pre.rank();
    let mut buf = Vec::with_capacity(16 + n + 8 * (2 * n * r + n * n));
    buf.extend_from_slice(MAGIC);
    put_u32(&mut buf, VERSION);
    put_u32(&mut buf, n as u32);
    put_u32(&mut buf, r as u32);
    buf.extend_from_slice(&pre.mask().m());
    put_matrix(&mut buf, pre.us_r());
    put_matrix(&mut buf, pre.v_r());
    put_matrix(&mut buf, pre.p());
    buf
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| Error::Cache("file is truncated".into()))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("four bytes")))
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<RealMatrix> {
        let raw = self.take(8 * rows * cols)?;
        let vals: Vec<f64> = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes"))).collect();
        RealMatrix::from_row_major(rows, cols, &vals)
    }
}

pub fn decode(data: &[u8]) -> Result<Precoder> {
    let mut rd = Reader { data, pos: 0 };
    if rd.take(4)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = rd.u32()?;
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let n = rd.u32()? as usize;
    let r = rd.u32()? as usize;
    if n == 0 || r > n {
        return Err(Error::Cache(format!("invalid header N={n}, r={r}")));
    }
    let bits = rd.take(n)?.to_vec();
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::Cache("mask bytes must be 0 or 1".into()));
    }
    let half = n as i64 / 2;
    let active: Vec<i64> = bits.iter().enumerate().filter(|(_, &b)| b == 1).map(|(p, _)| p as i64 - half).collect();
    let mask = if active.len() == n { SpectralMask::all_active(n)? } else { SpectralMask::from_active_set(n, &active)? };
    let us_r = rd.matrix(n, r)?;
    let v_r = rd.matrix(n, r)?;
    let p = rd.matrix(n, n)?;
    if rd.pos != data.len() {
        return Err(Error::Cache("trailing bytes".into()));
    }
    Precoder::from_parts(&mask, p, Some((us_r, v_r)))
}

pub fn save(pre: &Precoder, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode(pre))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Precoder> {
    let mut data = Vec::new();
    fs::File::open(path)?.read_to_end(&mut data)?;
    decode(&data)
}

/// Loads the precoder for `mask` from `dir`, synthesising and storing it on a miss.
/// A cached file whose mask differs (hash collision) is ignored.
pub fn load_or_synthesize(mask: &SpectralMask, dir: Option<&Path>) -> Result<Precoder> {
    let Some(dir) = dir else {
        return Precoder::synthesize(mask);
    };
    let path: PathBuf = dir.join(cache_file_name(mask));
    if let Ok(pre) = load(&path) {
        if pre.mask().m() == mask.m() {
            return Ok(pre);
        }
    }
    let pre = Precoder::synthesize(mask)?;
    fs::create_dir_all(dir)?;
    save(&pre, &path)?;
    Ok(pre)
}
