use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Dataset, DatasetMeta};
use crate::error::{Error, Result};
use crate::neural::{ByteReader, ByteWriter, FEATURE_NAMES, FEATURE_UNITS, INPUT_DIM};

/// First header line of a dataset file.
pub const DATASET_MAGIC: &str = "MGDATA";
const DATASET_VERSION: u32 = 1;

// Text header of `key=value` lines closed by a blank line, then the
// trajectory lengths (u64) and one little-endian f64 block per column.
fn encode(ds: &Dataset) -> Vec<u8> {
    let mut h = String::new();
    let _ = writeln!(h, "{DATASET_MAGIC} {DATASET_VERSION}");
    let _ = writeln!(h, "rows={}", ds.len());
    let _ = writeln!(h, "trajectories={}", ds.trajectory_lengths.len());
    let _ = writeln!(h, "seed={}", ds.meta.seed);
    let _ = writeln!(h, "config_hash={}", ds.meta.config_hash);
    let _ = writeln!(h, "discarded={}", ds.meta.discarded);
    let _ = writeln!(h, "dt={}", ds.meta.dt);
    let _ = writeln!(h, "columns=time,{}", FEATURE_NAMES.join(","));
    let _ = writeln!(h, "units=s,{}", FEATURE_UNITS.join(","));
    h.push('\n');

    let mut w = ByteWriter(h.into_bytes());
    for &len in &ds.trajectory_lengths {
        w.u64(len as u64);
    }
    w.f64s(&ds.time);
    for j in 0..INPUT_DIM {
        for row in ds.features.chunks_exact(INPUT_DIM) {
            w.f64(row[j]);
        }
    }
    w.0
}

fn decode(bytes: &[u8], path: &Path) -> Result<Dataset> {
    let mismatch = |found: String| Error::VersionMismatch {
        path: path.to_path_buf(),
        found,
    };
    let header_end = bytes.windows(2).position(|w| w == b"\n\n").ok_or_else(|| {
        if bytes.starts_with(DATASET_MAGIC.as_bytes()) {
            Error::corrupt(path, "unterminated header")
        } else {
            mismatch("missing dataset header".into())
        }
    })?;
    let header = std::str::from_utf8(&bytes[..header_end]).map_err(|_| mismatch("non-text header".into()))?;
    let mut lines = header.lines();
    let first = lines.next().unwrap_or_default();
    match first.strip_prefix(DATASET_MAGIC).map(str::trim) {
        Some(v) if v == DATASET_VERSION.to_string() => {}
        Some(v) => return Err(mismatch(format!("version {v}"))),
        None => return Err(mismatch(format!("header {first:?}"))),
    }

    let fields: std::collections::HashMap<&str, &str> = lines.filter_map(|l| l.split_once('=')).collect();
    let field = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| Error::corrupt(path, format!("missing `{k}`")))
    };
    let num = |k: &str| -> Result<u64> {
        field(k)?
            .parse()
            .map_err(|_| Error::corrupt(path, format!("bad `{k}`")))
    };
    let rows = num("rows")? as usize;
    let n_traj = num("trajectories")? as usize;
    let meta = DatasetMeta {
        seed: num("seed")?,
        config_hash: field("config_hash")?.to_string(),
        discarded: num("discarded")? as usize,
        dt: field("dt")?.parse().map_err(|_| Error::corrupt(path, "bad `dt`"))?,
    };
    if field("columns")?.split(',').count() != INPUT_DIM + 1 {
        return Err(Error::corrupt(path, "unexpected column count"));
    }

    let body = &bytes[header_end + 2..];
    let mut r = ByteReader::new(body, path);
    let expected = n_traj
        .checked_mul(8)
        .and_then(|t| rows.checked_mul(8 * (INPUT_DIM + 1)).and_then(|b| b.checked_add(t)));
    match expected {
        Some(n) if n == body.len() => {}
        Some(n) => return Err(r.corrupt(format!("expected {n} data bytes, found {}", body.len()))),
        None => return Err(r.corrupt("implausible sizes")),
    }
    let mut trajectory_lengths = Vec::with_capacity(n_traj);
    for _ in 0..n_traj {
        trajectory_lengths.push(r.u64()? as usize);
    }
    if trajectory_lengths.iter().sum::<usize>() != rows {
        return Err(r.corrupt("trajectory lengths do not add up to the row count"));
    }
    let mut time = vec![0.0; rows];
    r.f64s(&mut time)?;
    let mut column = vec![0.0; rows];
    let mut features = vec![0.0; rows * INPUT_DIM];
    for j in 0..INPUT_DIM {
        r.f64s(&mut column)?;
        for (i, v) in column.iter().enumerate() {
            features[i * INPUT_DIM + j] = *v;
        }
    }
    r.finish()?;
    Ok(Dataset {
        time,
        features,
        trajectory_lengths,
        meta,
    })
}

pub fn save_dataset(path: &Path, ds: &Dataset) -> Result<()> {
    fs::write(path, encode(ds)).map_err(|e| Error::io(format!("writing dataset {}", path.display()), e))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let bytes = fs::read(path).map_err(|e| Error::io(format!("reading dataset {}", path.display()), e))?;
    decode(&bytes, path)
}

/// Writes one comma-separated row per recorded step.
pub fn export_csv(path: &Path, ds: &Dataset) -> Result<()> {
    let mut out = format!("trajectory,time,{}\n", FEATURE_NAMES.join(","));
    let mut row = 0;
    for (k, &len) in ds.trajectory_lengths.iter().enumerate() {
        for _ in 0..len {
            let _ = write!(out, "{k},{}", ds.time[row]);
            for v in ds.row(row) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
            row += 1;
        }
    }
    fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
