//! Bit-exact model persistence.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic "TTGO" | version u32 | d u32 | d1 u32
//! per dimension: node count u64, node values f64...
//! rank chain: (d + 1) x u64
//! cores, dimension by dimension: f64 values, (left, node, right)
//!   row-major
//! beta f64 | transform id u8 | crc32 u32 over all preceding bytes
//! ```
//!
//! Indices are 0-based; core storage order matches the in-memory layout,
//! so save/load round-trips bitwise.

use std::fs;
use std::path::Path;

use ndarray::Array3;

use crate::error::{FormatError, Result, TtgoError};
use crate::grid::{Grid, TaskSplit};
use crate::pipeline::{Transform, TtgoModel};
use crate::tt::TensorTrain;

const MAGIC: &[u8; 4] = b"TTGO";
const VERSION: u32 = 1;

pub fn model_to_bytes(model: &TtgoModel<f64>) -> Vec<u8> {
    let d = model.grid.dim();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    out.extend_from_slice(&(model.split.d1 as u32).to_le_bytes());
    for k in 0..d {
        let nodes = model.grid.nodes(k);
        out.extend_from_slice(&(nodes.len() as u64).to_le_bytes());
        for &v in nodes {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for r in model.tt.ranks() {
        out.extend_from_slice(&(r as u64).to_le_bytes());
    }
    for core in model.tt.cores() {
        for &v in core.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.extend_from_slice(&model.beta.to_le_bytes());
    out.push(model.transform.id());
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn save_model(model: &TtgoModel<f64>, path: &Path) -> Result<()> {
    let bytes = model_to_bytes(model);
    fs::write(path, bytes).map_err(|e| TtgoError::io(path, e))
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> std::result::Result<&'a [u8], FormatError> {
        if self.pos + n > self.data.len() {
            return Err(FormatError::Truncated(format!(
                "needed {n} bytes for {what} at offset {}",
                self.pos
            )));
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u32(&mut self, what: &str) -> std::result::Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> std::result::Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> std::result::Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<TtgoModel<f64>> {
    // Trailing checksum first: everything else is untrusted until then.
    if bytes.len() < 4 {
        return Err(FormatError::Truncated("no room for a checksum".into()).into());
    }
    let (body, crc_bytes) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(crc_bytes.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(FormatError::CrcMismatch { stored, computed }.into());
    }

    let mut cur = Cursor {
        data: body,
        pos: 0,
    };
    let magic = cur.take(4, "magic")?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic.into());
    }
    let version = cur.u32("version")?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let d = cur.u32("dimension count")? as usize;
    let d1 = cur.u32("task dimension count")? as usize;
    if d == 0 || d1 >= d {
        return Err(FormatError::Inconsistent(format!(
            "dimension counts d = {d}, d1 = {d1}"
        ))
        .into());
    }
    let mut nodes = Vec::with_capacity(d);
    for k in 0..d {
        let n = cur.u64(&format!("node count of dimension {k}"))? as usize;
        if n < 2 {
            return Err(
                FormatError::Inconsistent(format!("dimension {k} stores {n} nodes")).into(),
            );
        }
        let mut col = Vec::with_capacity(n);
        for _ in 0..n {
            col.push(cur.f64("node value")?);
        }
        nodes.push(col);
    }
    let mut ranks = Vec::with_capacity(d + 1);
    for b in 0..=d {
        ranks.push(cur.u64(&format!("rank {b}"))? as usize);
    }
    if ranks[0] != 1 || ranks[d] != 1 || ranks.iter().any(|&r| r == 0) {
        return Err(FormatError::Inconsistent(format!("rank chain {ranks:?}")).into());
    }
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let (rl, n, rr) = (ranks[k], nodes[k].len(), ranks[k + 1]);
        let mut core = Array3::zeros((rl, n, rr));
        for a in 0..rl {
            for x in 0..n {
                for b in 0..rr {
                    core[[a, x, b]] = cur.f64("core value")?;
                }
            }
        }
        cores.push(core);
    }
    let beta = cur.f64("beta")?;
    let transform_id = cur.take(1, "transform id")?[0];
    let transform = Transform::from_id(transform_id)
        .ok_or(FormatError::UnknownTransform(transform_id))?;
    if cur.pos != body.len() {
        return Err(FormatError::Truncated(format!(
            "{} unexpected trailing bytes",
            body.len() - cur.pos
        ))
        .into());
    }

    let grid = Grid::from_nodes(nodes)?;
    let tt = TensorTrain::new(cores)?;
    let split = TaskSplit::new(d1, d - d1)?;
    Ok(TtgoModel {
        grid,
        tt,
        split,
        beta,
        transform,
        report: None,
        offline_ms: 0.0,
    })
}

pub fn load_model(path: &Path) -> Result<TtgoModel<f64>> {
    let bytes = fs::read(path).map_err(|e| TtgoError::io(path, e))?;
    model_from_bytes(&bytes)
}
