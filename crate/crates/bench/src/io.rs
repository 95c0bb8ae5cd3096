//! Tensor files and result tables.
//!
//! `.dten` layout (all integers and floats little-endian):
//!
//! | bytes        | content                         |
//! |--------------|---------------------------------|
//! | 4            | magic `DTEN`                    |
//! | 2            | format version, currently 1     |
//! | 2            | order `d`                       |
//! | 8·d          | dims as `u64`                   |
//! | 8·∏dims      | entries as `f64`, first index fastest |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use hoid::DenseTensor;

use crate::sweep::ResultRow;
use crate::BenchError;

pub const DTEN_MAGIC: &[u8; 4] = b"DTEN";
pub const DTEN_VERSION: u16 = 1;

pub const CSV_HEADER: [&str; 9] =
    ["tensor", "method", "selector", "rank", "rel_error", "bound", "max_error_constant", "wall_time_s", "seed"];

pub fn encode_tensor(x: &DenseTensor) -> Result<Vec<u8>, BenchError> {
    let order = u16::try_from(x.order()).map_err(|_| BenchError::Format(format!("order {} too large", x.order())))?;
    let mut out = Vec::with_capacity(8 + 8 * x.order() + 8 * x.len());
    out.extend_from_slice(DTEN_MAGIC);
    out.extend_from_slice(&DTEN_VERSION.to_le_bytes());
    out.extend_from_slice(&order.to_le_bytes());
    for &d in x.dims() {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &v in x.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn take<'a>(bytes: &mut &'a [u8], n: usize, what: &str) -> Result<&'a [u8], BenchError> {
    if bytes.len() < n {
        return Err(BenchError::Format(format!("file truncated while reading {what}")));
    }
    let (head, tail) = bytes.split_at(n);
    *bytes = tail;
    Ok(head)
}

pub fn decode_tensor(mut bytes: &[u8]) -> Result<DenseTensor, BenchError> {
    let magic = take(&mut bytes, 4, "magic")?;
    if magic != DTEN_MAGIC {
        return Err(BenchError::Format(format!("bad magic bytes {magic:?}, expected \"DTEN\"")));
    }
    let version = u16::from_le_bytes(take(&mut bytes, 2, "version")?.try_into().expect("2 bytes"));
    if version != DTEN_VERSION {
        return Err(BenchError::Format(format!("unsupported .dten version {version}")));
    }
    let order = u16::from_le_bytes(take(&mut bytes, 2, "order")?.try_into().expect("2 bytes")) as usize;
    let mut dims = Vec::with_capacity(order);
    for _ in 0..order {
        let d = u64::from_le_bytes(take(&mut bytes, 8, "dims")?.try_into().expect("8 bytes"));
        dims.push(usize::try_from(d).map_err(|_| BenchError::Format(format!("dimension {d} too large")))?);
    }
    let len = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| BenchError::Format(format!("dims {dims:?} overflow")))?;
    if bytes.len() != 8 * len {
        return Err(BenchError::Format(format!(
            "payload has {} bytes, dims {dims:?} need {}",
            bytes.len(),
            8 * len
        )));
    }
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok(DenseTensor::new(dims, data)?)
}

pub fn write_tensor(path: &Path, x: &DenseTensor) -> Result<(), BenchError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_tensor(x)?)?;
    w.flush()?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor, BenchError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_tensor(&bytes).map_err(|e| match e {
        BenchError::Format(msg) => BenchError::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Writes the header and one record per row. Missing error constants and
/// seeds become empty fields.
pub fn write_csv<W: Write>(writer: W, rows: &[ResultRow]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.tensor.clone(),
            r.method.clone(),
            r.selector.clone(),
            r.rank.to_string(),
            format_float(r.rel_error),
            format_float(r.bound),
            r.max_error_constant.map(format_float).unwrap_or_default(),
            format_float(r.wall_time_s),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[ResultRow]) -> Result<(), BenchError> {
    write_csv(File::create(path)?, rows)
}

/// Selected indices per mode, 1-based, one row per (mode, position).
pub fn write_indices<W: Write>(writer: W, indices: &[Vec<usize>]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["mode", "position", "index"])?;
    for (n, idx) in indices.iter().enumerate() {
        for (k, &i) in idx.iter().enumerate() {
            w.write_record([(n + 1).to_string(), (k + 1).to_string(), (i + 1).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
