//! ACTV: a flat little-endian container for one f32 matrix.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "ACTV"
//!      4     4  u32 version (1)
//!      8     4  u32 n_rows
//!     12     4  u32 n_cols
//!     16     1  u8 dtype (1 = f32)
//!     17   4*n  f32 payload, row-major
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"ACTV";
pub const VERSION: u32 = 1;
pub const DTYPE_F32: u8 = 1;
pub const HEADER_LEN: usize = 17;

/// Serialize a matrix into ACTV bytes. Rejects non-finite values.
pub fn encode(values: &Array2<f32>) -> Result<Vec<u8>> {
    let (rows, cols) = values.dim();
    if let Some(((row, col), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { row, col });
    }
    let rows32 = u32::try_from(rows).map_err(|_| Error::Format(format!("{rows} rows exceed u32")))?;
    let cols32 = u32::try_from(cols).map_err(|_| Error::Format(format!("{cols} cols exceed u32")))?;

    let mut buf = Vec::with_capacity(HEADER_LEN + rows * cols * 4);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&rows32.to_le_bytes());
    buf.extend_from_slice(&cols32.to_le_bytes());
    buf.push(DTYPE_F32);
    // iter() walks in logical row-major order regardless of memory layout
    for v in values.iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    Ok(buf)
}

pub fn decode(bytes: &[u8]) -> Result<Array2<f32>> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic, expected \"ACTV\"".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated { expected: HEADER_LEN, found: bytes.len() });
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Version { found: version, expected: VERSION });
    }
    let rows = u32_at(8) as usize;
    let cols = u32_at(12) as usize;
    let dtype = bytes[16];
    if dtype != DTYPE_F32 {
        return Err(Error::Format(format!("unsupported dtype code {dtype}")));
    }
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    if bytes.len() < expected {
        return Err(Error::Truncated { expected, found: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(Error::Format(format!(
            "trailing bytes: expected {expected}, found {}",
            bytes.len()
        )));
    }
    let data: Vec<f32> = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_values(values: &Array2<f32>, path: &Path) -> Result<()> {
    let bytes = encode(values)?;
    write_atomic(path, &bytes)
}

pub fn read_values(path: &Path) -> Result<Array2<f32>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Write through a sibling temp file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_2x3_layout() {
        let m = Array2::<f32>::zeros((2, 3));
        let bytes = encode(&m).unwrap();
        assert_eq!(&bytes[..4], b"ACTV");
        assert_eq!(bytes.len(), HEADER_LEN + 24);
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &3u32.to_le_bytes());
        assert_eq!(bytes[16], 1);
        assert_eq!(decode(&bytes).unwrap(), m);
    }

    #[test]
    fn payload_size_300x4096() {
        let m = Array2::<f32>::from_elem((300, 4096), 0.25);
        let bytes = encode(&m).unwrap();
        assert_eq!(bytes.len() - HEADER_LEN, 300 * 4096 * 4);
    }

    #[test]
    fn nan_reports_position() {
        let mut m = Array2::<f32>::zeros((3, 4));
        m[[2, 1]] = f32::NAN;
        match encode(&m) {
            Err(Error::NonFinite { row: 2, col: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn distinct_errors() {
        let m = Array2::<f32>::ones((2, 2));
        let bytes = encode(&m).unwrap();

        let short = &bytes[..bytes.len() - 1];
        assert!(matches!(decode(short), Err(Error::Truncated { .. })));

        let mut bad = bytes.clone();
        bad[..4].copy_from_slice(b"XXXX");
        assert!(matches!(decode(&bad), Err(Error::Format(_))));

        let mut v2 = bytes.clone();
        v2[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(decode(&v2), Err(Error::Version { found: 2, .. })));
    }

    #[test]
    fn transposed_view_is_written_row_major() {
        let m = Array2::from_shape_vec((2, 3), vec![1.0f32, 2., 3., 4., 5., 6.]).unwrap();
        let t = m.t().to_owned();
        let back = decode(&encode(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
