//! Binary container shared by model files and feature archives:
//!
//! ```text
//! "MABL" | version u32 | text length u32 | UTF-8 text | tensor count u32 |
//! per tensor: name length u32 | name | rank u32 | dims u32 × rank | f32 × ∏dims
//! ```
//!
//! All integers and floats are little-endian.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MABL";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct StoredTensor {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: Vec<f32>,
}

impl StoredTensor {
    pub fn from_f64(name: impl Into<String>, dims: Vec<usize>, data: &[f64]) -> Self {
        StoredTensor {
            name: name.into(),
            dims,
            data: data.iter().map(|&v| v as f32).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub text: String,
    pub tensors: Vec<StoredTensor>,
}

fn put_u32(out: &mut Vec<u8>, v: usize, what: &str) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Format(format!("{what} {v} does not fit in 32 bits")))?;
    out.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

impl Container {
    pub fn encode(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        put_u32(&mut out, self.text.len(), "text length")?;
        out.extend_from_slice(self.text.as_bytes());
        put_u32(&mut out, self.tensors.len(), "tensor count")?;
        for t in &self.tensors {
            let n: usize = t.dims.iter().product();
            if n != t.data.len() {
                return Err(Error::dims(format!("tensor `{}`", t.name), n, t.data.len()));
            }
            put_u32(&mut out, t.name.len(), "name length")?;
            out.extend_from_slice(t.name.as_bytes());
            put_u32(&mut out, t.dims.len(), "rank")?;
            for &d in &t.dims {
                put_u32(&mut out, d, "dimension")?;
            }
            out.reserve(4 * n);
            for v in &t.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Container> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4, "header").ok() != Some(&MAGIC[..]) {
            return Err(Error::Format("bad magic, not a MABL file".into()));
        }
        let version = r.u32("header")?;
        if version != VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {version}, expected {VERSION}"
            )));
        }
        let len = r.u32("header")? as usize;
        let text = std::str::from_utf8(r.take(len, "header")?)
            .map_err(|_| Error::Format("text block is not UTF-8".into()))?
            .to_string();
        let count = r.u32("header")? as usize;
        let mut tensors = Vec::with_capacity(count.min(1 << 16));
        for i in 0..count {
            let at = format!("#{i}");
            let len = r.u32(&at)? as usize;
            let name = String::from_utf8(r.take(len, &at)?.to_vec())
                .map_err(|_| Error::Format(format!("tensor {at} name is not UTF-8")))?;
            let rank = r.u32(&name)? as usize;
            let mut dims = Vec::with_capacity(rank.min(8));
            for _ in 0..rank {
                dims.push(r.u32(&name)? as usize);
            }
            let n = dims
                .iter()
                .try_fold(1usize, |a, &d| a.checked_mul(d))
                .and_then(|n| n.checked_mul(4))
                .ok_or_else(|| Error::Format(format!("tensor `{name}` is too large")))?;
            let payload = r.take(n, &name)?;
            let data = payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            tensors.push(StoredTensor { name, dims, data });
        }
        if r.pos != bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes after the last tensor",
                bytes.len() - r.pos
            )));
        }
        Ok(Container { text, tensors })
    }

    pub fn read(path: &Path) -> Result<Container> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place, so a failed write leaves nothing behind.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.encode()?)
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, tensor: &str) -> Result<&'a [u8]> {
        let left = self.bytes.len() - self.pos;
        if n > left {
            return Err(Error::Truncated {
                tensor: tensor.to_string(),
                expected: n,
                found: left,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, tensor: &str) -> Result<u32> {
        let b = self.take(4, tensor)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}
