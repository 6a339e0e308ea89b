//! Dataset and sketch file formats.
//!
//! Binary matrix: 16-byte header (magic, u32 rows, u32 cols, little-endian)
//! followed by row-major floats. Magic `DPRPMAT1` carries f64 payloads;
//! `DPRPMAT2` is the explicit lossy f32 variant.
//!
//! Sign payloads: magic `DPRPSGN1`, u32 count, then bit-packed signs,
//! 8 signs per byte, LSB first, bit 1 = +1.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::core::Dataset;
use crate::error::{Error, Result};

const MAGIC_F64: &[u8; 8] = b"DPRPMAT1";
const MAGIC_F32: &[u8; 8] = b"DPRPMAT2";
const MAGIC_SIGN: &[u8; 8] = b"DPRPSGN1";

fn dims_header(rows: usize, cols: usize) -> Result<([u8; 4], [u8; 4])> {
    let r = u32::try_from(rows).map_err(|_| Error::Format("row count exceeds u32".into()))?;
    let c = u32::try_from(cols).map_err(|_| Error::Format("col count exceeds u32".into()))?;
    Ok((r.to_le_bytes(), c.to_le_bytes()))
}

/// Writes rows as a 64-bit binary matrix.
pub fn write_matrix_f64<P: AsRef<Path>>(path: P, rows: &[Vec<f64>]) -> Result<()> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged rows in matrix write".into()));
    }
    let (rb, cb) = dims_header(rows.len(), cols)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC_F64)?;
    w.write_all(&rb)?;
    w.write_all(&cb)?;
    for row in rows {
        for &v in row {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes rows at 32-bit precision (lossy).
pub fn write_matrix_f32<P: AsRef<Path>>(path: P, rows: &[Vec<f64>]) -> Result<()> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged rows in matrix write".into()));
    }
    let (rb, cb) = dims_header(rows.len(), cols)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC_F32)?;
    w.write_all(&rb)?;
    w.write_all(&cb)?;
    for row in rows {
        for &v in row {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads either matrix flavor, widening f32 payloads to f64.
pub fn read_matrix<P: AsRef<Path>>(path: P) -> Result<Vec<Vec<f64>>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    let wide = match &magic {
        m if m == MAGIC_F64 => true,
        m if m == MAGIC_F32 => false,
        _ => return Err(Error::Format("bad matrix magic".into())),
    };
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let rows = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let cols = u32::from_le_bytes(b4) as usize;
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for _ in 0..cols {
            if wide {
                let mut b8 = [0u8; 8];
                r.read_exact(&mut b8)?;
                row.push(f64::from_le_bytes(b8));
            } else {
                r.read_exact(&mut b4)?;
                row.push(f32::from_le_bytes(b4) as f64);
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// Packs sign rows (+1 / -1 entries) into the bit-packed sign format.
pub fn write_signs<P: AsRef<Path>>(path: P, rows: &[Vec<i8>]) -> Result<()> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged rows in sign write".into()));
    }
    let (rb, cb) = dims_header(rows.len(), cols)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC_SIGN)?;
    w.write_all(&rb)?;
    w.write_all(&cb)?;
    for row in rows {
        let mut buf = vec![0u8; cols.div_ceil(8)];
        for (j, &s) in row.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(Error::Format(format!("sign entry must be +-1, got {s}")));
            }
            if s == 1 {
                buf[j / 8] |= 1 << (j % 8);
            }
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads bit-packed sign rows back to +-1 vectors.
pub fn read_signs<P: AsRef<Path>>(path: P) -> Result<Vec<Vec<i8>>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC_SIGN {
        return Err(Error::Format("bad sign magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let rows = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let cols = u32::from_le_bytes(b4) as usize;
    let bytes_per_row = cols.div_ceil(8);
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut buf = vec![0u8; bytes_per_row];
        r.read_exact(&mut buf)?;
        let row: Vec<i8> = (0..cols)
            .map(|j| if buf[j / 8] >> (j % 8) & 1 == 1 { 1 } else { -1 })
            .collect();
        out.push(row);
    }
    Ok(out)
}

/// Reads a CSV dataset: one row per vector, header detected by attempting to
/// parse the first record as floats. When `bound` is `None` the bound is set
/// to `max(1, max |entry|)`.
pub fn read_csv_dataset<P: AsRef<Path>>(path: P, bound: Option<f64>) -> Result<Dataset> {
    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(BufReader::new(file));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("csv: {e}")))?;
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(e) => {
                // only the first record may be a header
                if idx == 0 {
                    continue;
                }
                return Err(Error::Format(format!("csv row {idx}: {e}")));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Validation("csv contained no data rows".into()));
    }
    let max_abs = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let bound = bound.unwrap_or_else(|| max_abs.max(1.0));
    Dataset::new(rows, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("dprp-io-{}-{}", std::process::id(), name));
        p
    }

    #[test]
    fn matrix_roundtrip_f64_is_bit_exact() {
        let rows = vec![vec![1.0, -2.5, 3.25], vec![0.0, f64::MIN_POSITIVE, -1e300]];
        let p = tmp("m64.bin");
        write_matrix_f64(&p, &rows).unwrap();
        let back = read_matrix(&p).unwrap();
        assert_eq!(rows, back);
        std::fs::remove_file(&p).ok();
    }

    #[test]
    fn matrix_f32_is_lossy_but_close() {
        let rows = vec![vec![0.1, 0.2, 0.3]];
        let p = tmp("m32.bin");
        write_matrix_f32(&p, &rows).unwrap();
        let back = read_matrix(&p).unwrap();
        for (a, b) in rows[0].iter().zip(&back[0]) {
            assert!((a - b).abs() < 1e-6);
        }
        std::fs::remove_file(&p).ok();
    }

    #[test]
    fn signs_roundtrip() {
        let rows = vec![vec![1i8, -1, -1, 1, 1, 1, -1, 1, -1], vec![-1; 9]];
        let p = tmp("signs.bin");
        write_signs(&p, &rows).unwrap();
        let back = read_signs(&p).unwrap();
        assert_eq!(rows, back);
        std::fs::remove_file(&p).ok();
    }

    #[test]
    fn csv_with_and_without_header() {
        let p = tmp("data.csv");
        std::fs::write(&p, "a,b,c\n0.5,-0.25,1.0\n0.1,0.2,0.3\n").unwrap();
        let d = read_csv_dataset(&p, None).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.dim(), 3);
        assert_eq!(d.bound(), 1.0);

        std::fs::write(&p, "2.0,-4.0\n1.0,0.5\n").unwrap();
        let d = read_csv_dataset(&p, None).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.bound(), 4.0);
        std::fs::remove_file(&p).ok();
    }
}
