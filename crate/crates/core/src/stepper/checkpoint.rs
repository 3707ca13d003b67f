//! Binary checkpoint of a [`SplitState`].
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      8 bytes  "NATCONV\0"
//! version    u32      1
//! hash_len   u32      length of the config hash string
//! hash       hash_len bytes, UTF-8
//! step       u64
//! t          f64
//! n_fine     u64
//! n_coarse   u64
//! u_x, u_y, u_z, theta   n_fine f64 each
//! p          n_coarse f64
//! ```

use std::io::{Read, Write};
use std::path::Path;

use crate::fem::VectorField;

use super::{SplitState, StepError};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"NATCONV\0";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint(path: &Path, hash: &str, state: &SplitState) -> Result<(), StepError> {
    let n = state.theta.len();
    let mut buf = Vec::with_capacity(48 + hash.len() + 8 * (4 * n + state.p.len()));
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(hash.len() as u32).to_le_bytes());
    buf.extend_from_slice(hash.as_bytes());
    buf.extend_from_slice(&state.step.to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&(state.p.len() as u64).to_le_bytes());
    for f in state
        .u
        .0
        .iter()
        .chain(std::iter::once(&state.theta))
        .chain(std::iter::once(&state.p))
    {
        for v in f {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    // write then rename so a crash never leaves a truncated checkpoint
    let tmp = path.with_extension("tmp");
    std::fs::File::create(&tmp)?.write_all(&buf)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], StepError> {
        if self.0.len() < n {
            return Err(StepError::Checkpoint("file is truncated".into()));
        }
        let (a, b) = self.0.split_at(n);
        self.0 = b;
        Ok(a)
    }

    fn u32(&mut self) -> Result<u32, StepError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, StepError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, StepError> {
        let bytes = self.take(8 * n)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Reads a checkpoint and returns the stored config hash with the state.
pub fn read_checkpoint(path: &Path) -> Result<(String, SplitState), StepError> {
    let mut data = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut data)?;
    let mut c = Cursor(&data);
    if c.take(8)? != CHECKPOINT_MAGIC {
        return Err(StepError::Checkpoint("not a checkpoint file".into()));
    }
    let version = c.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(StepError::Checkpoint(format!("unsupported version {version}")));
    }
    let len = c.u32()? as usize;
    let hash = String::from_utf8(c.take(len)?.to_vec())
        .map_err(|_| StepError::Checkpoint("config hash is not UTF-8".into()))?;
    let step = c.u64()?;
    let t = f64::from_bits(c.u64()?);
    let n = c.u64()? as usize;
    let nc = c.u64()? as usize;
    let u = VectorField([c.f64s(n)?, c.f64s(n)?, c.f64s(n)?]);
    let theta = c.f64s(n)?;
    let p = c.f64s(nc)?;
    if !c.0.is_empty() {
        return Err(StepError::Checkpoint("trailing bytes".into()));
    }
    Ok((hash, SplitState { u, theta, p, t, step }))
}
