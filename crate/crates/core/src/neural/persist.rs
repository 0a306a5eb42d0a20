//! Self-describing little-endian weight file.
//!
//! ```text
//! magic    8 bytes  "MGNNWT\r\n"
//! version  u32
//! n_dims   u32, then n_dims × u64 layer widths
//! layers   per layer: weights (outputs × inputs, row-major) then biases, f64
//! norm     input mean, input scale, output mean, output scale, f64
//! adam     step u64; beta1, beta2, epsilon, learning_rate f64;
//!          first moments then second moments in layer order, f64
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use super::{AdamState, ModelNormalizer, NetworkParams, Normalizer};
use crate::error::{Error, Result};

pub const WEIGHT_MAGIC: &[u8; 8] = b"MGNNWT\r\n";
pub const WEIGHT_VERSION: u32 = 1;

/// Everything needed to resume training or to run the controller.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: NetworkParams,
    pub normalizer: ModelNormalizer,
    pub adam: AdamState,
}

pub(crate) struct ByteWriter(pub Vec<u8>);

impl ByteWriter {
    pub fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    pub fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    pub fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    pub fn f64s(&mut self, v: &[f64]) {
        for x in v {
            self.f64(*x);
        }
    }
}

pub(crate) struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: PathBuf,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8], path: &Path) -> Self {
        Self {
            buf,
            pos: 0,
            path: path.to_path_buf(),
        }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::corrupt(&self.path, format!("truncated at byte {}", self.pos))),
        }
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn f64s(&mut self, out: &mut [f64]) -> Result<()> {
        let bytes = self.take(out.len() * 8)?;
        for (o, b) in out.iter_mut().zip(bytes.chunks_exact(8)) {
            *o = f64::from_le_bytes(b.try_into().unwrap());
        }
        Ok(())
    }
    pub fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::corrupt(
                &self.path,
                format!("{} trailing bytes", self.buf.len() - self.pos),
            ));
        }
        Ok(())
    }
    pub fn corrupt(&self, reason: impl Into<String>) -> Error {
        Error::corrupt(&self.path, reason)
    }
}

pub fn encode_checkpoint(ckpt: &Checkpoint) -> Vec<u8> {
    let mut w = ByteWriter(Vec::new());
    w.0.extend_from_slice(WEIGHT_MAGIC);
    w.u32(WEIGHT_VERSION);
    let dims = ckpt.params.layer_dims();
    w.u32(dims.len() as u32);
    for d in &dims {
        w.u64(*d as u64);
    }
    for t in ckpt.params.tensors() {
        w.f64s(t);
    }
    let n = &ckpt.normalizer;
    for v in [&n.input.mean, &n.input.scale, &n.output.mean, &n.output.scale] {
        w.f64s(v);
    }
    let a = &ckpt.adam;
    w.u64(a.step);
    for v in [a.beta1, a.beta2, a.epsilon, a.learning_rate] {
        w.f64(v);
    }
    for t in a.first_moment.tensors().chain(a.second_moment.tensors()) {
        w.f64s(t);
    }
    w.0
}

pub fn decode_checkpoint(bytes: &[u8], path: &Path) -> Result<Checkpoint> {
    let mut r = ByteReader::new(bytes, path);
    let magic = r.take(WEIGHT_MAGIC.len()).map_err(|_| Error::VersionMismatch {
        path: path.to_path_buf(),
        found: "file shorter than magic header".into(),
    })?;
    if magic != WEIGHT_MAGIC {
        return Err(Error::VersionMismatch {
            path: path.to_path_buf(),
            found: format!("magic {:?}", String::from_utf8_lossy(magic)),
        });
    }
    let version = r.u32()?;
    if version != WEIGHT_VERSION {
        return Err(Error::VersionMismatch {
            path: path.to_path_buf(),
            found: format!("version {version}"),
        });
    }
    let n_dims = r.u32()? as usize;
    if !(2..=64).contains(&n_dims) {
        return Err(r.corrupt(format!("implausible layer count {n_dims}")));
    }
    let mut dims = Vec::with_capacity(n_dims);
    for _ in 0..n_dims {
        let d = r.u64()?;
        if d == 0 || d > 1 << 20 {
            return Err(r.corrupt(format!("implausible layer width {d}")));
        }
        dims.push(d as usize);
    }
    let mut params = NetworkParams::zeros(&dims)?;
    for t in params.tensors_mut() {
        r.f64s(t)?;
    }
    let (i, o) = (dims[0], dims[n_dims - 1]);
    let mut read_vec = |n: usize| -> Result<Vec<f64>> {
        let mut v = vec![0.0; n];
        r.f64s(&mut v)?;
        Ok(v)
    };
    let normalizer = ModelNormalizer {
        input: Normalizer {
            mean: read_vec(i)?,
            scale: read_vec(i)?,
        },
        output: Normalizer {
            mean: read_vec(o)?,
            scale: read_vec(o)?,
        },
    };
    let mut adam = AdamState::new(&params, 0.0);
    adam.step = r.u64()?;
    adam.beta1 = r.f64()?;
    adam.beta2 = r.f64()?;
    adam.epsilon = r.f64()?;
    adam.learning_rate = r.f64()?;
    for t in adam.first_moment.tensors_mut().chain(adam.second_moment.tensors_mut()) {
        r.f64s(t)?;
    }
    r.finish()?;
    Ok(Checkpoint {
        params,
        normalizer,
        adam,
    })
}

pub fn save_params(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    fs::write(path, encode_checkpoint(ckpt)).map_err(|e| Error::io(format!("writing weights {}", path.display()), e))
}

pub fn load_params(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| Error::io(format!("reading weights {}", path.display()), e))?;
    decode_checkpoint(&bytes, path)
}
