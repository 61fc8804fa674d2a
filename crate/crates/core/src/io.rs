//! On-disk embedding and label files.
//!
//! `PEMB v1` (embeddings), 24-byte header then row-major payload:
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 4    | magic `50 45 4D 42` ("PEMB")           |
//! | 4      | 1    | version = 1                            |
//! | 5      | 1    | dtype = 0 (f32, little endian)         |
//! | 6      | 2    | reserved, zero                         |
//! | 8      | 8    | n, u64 little endian                   |
//! | 16     | 8    | d, u64 little endian                   |
//! | 24     | 4nd  | values                                 |
//!
//! `PLBL v1` (labels), 16-byte header then `n` u32 little-endian class ids:
//! magic `50 4C 42 4C` ("PLBL"), version = 1, 3 reserved zero bytes, n as u64.
//!
//! Text fallbacks: CSV embeddings (one row per line, no header) and label
//! files with one integer per line.

use std::fs;
use std::path::Path;

use crate::embed::EmbeddingSet;
use crate::error::{Error, Result};

pub const PEMB_MAGIC: [u8; 4] = *b"PEMB";
pub const PLBL_MAGIC: [u8; 4] = *b"PLBL";
pub const PEMB_HEADER_LEN: usize = 24;
pub const PLBL_HEADER_LEN: usize = 16;
const VERSION: u8 = 1;
const DTYPE_F32: u8 = 0;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn is_text_path(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("csv" | "txt")
    )
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

fn check_length(path: &Path, expected: u64, found: u64) -> Result<()> {
    if found < expected {
        return Err(Error::TruncatedFile { path: path.into(), expected, found });
    }
    if found > expected {
        return Err(Error::TrailingData { path: path.into(), extra: found - expected });
    }
    Ok(())
}

fn to_f32(e: &EmbeddingSet) -> Result<Vec<f32>> {
    let d = e.dim();
    e.as_slice()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = v as f32;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::NonFiniteValue { row: i / d, col: i % d })
            }
        })
        .collect()
}

pub fn encode_pemb(e: &EmbeddingSet) -> Result<Vec<u8>> {
    let values = to_f32(e)?;
    let mut out = Vec::with_capacity(PEMB_HEADER_LEN + 4 * values.len());
    out.extend_from_slice(&PEMB_MAGIC);
    out.extend_from_slice(&[VERSION, DTYPE_F32, 0, 0]);
    out.extend_from_slice(&(e.n() as u64).to_le_bytes());
    out.extend_from_slice(&(e.dim() as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parses a `PEMB v1` buffer; `path` is only used in error messages.
pub fn decode_pemb(bytes: &[u8], path: &Path) -> Result<EmbeddingSet> {
    if bytes.len() < 4 || bytes[..4] != PEMB_MAGIC {
        return Err(Error::BadMagic { path: path.into() });
    }
    if bytes.len() < PEMB_HEADER_LEN {
        return Err(Error::TruncatedFile {
            path: path.into(),
            expected: PEMB_HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let header = |detail: String| Error::BadHeader { path: path.into(), detail };
    if bytes[4] != VERSION {
        return Err(header(format!("version {}", bytes[4])));
    }
    if bytes[5] != DTYPE_F32 {
        return Err(header(format!("dtype {}", bytes[5])));
    }
    if bytes[6..8] != [0, 0] {
        return Err(header("reserved bytes are not zero".into()));
    }
    let (n, d) = (u64_at(bytes, 8), u64_at(bytes, 16));
    let expected = n
        .checked_mul(d)
        .and_then(|nd| nd.checked_mul(4))
        .and_then(|p| p.checked_add(PEMB_HEADER_LEN as u64))
        .ok_or_else(|| header(format!("shape {n}x{d} overflows")))?;
    check_length(path, expected, bytes.len() as u64)?;
    let data = bytes[PEMB_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")) as f64)
        .collect();
    EmbeddingSet::new(data, n as usize, d as usize)
}

pub fn embeddings_to_csv(e: &EmbeddingSet) -> Result<String> {
    let values = to_f32(e)?;
    let mut out = String::new();
    for row in values.chunks_exact(e.dim()) {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_csv_embeddings(text: &str, path: &Path) -> Result<EmbeddingSet> {
    let mut data = Vec::new();
    let mut d = None;
    let mut n = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let expected = *d.get_or_insert(fields.len());
        if fields.len() != expected {
            return Err(Error::RaggedCsv {
                path: path.into(),
                line: lineno + 1,
                expected,
                found: fields.len(),
            });
        }
        for tok in fields {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                path: path.into(),
                line: lineno + 1,
                token: tok.to_string(),
            })?;
            data.push(v);
        }
        n += 1;
    }
    EmbeddingSet::new(data, n, d.unwrap_or(0))
}

/// Loads `PEMB` (detected by its magic) or CSV (by a `.csv`/`.txt`
/// extension). Values are widened to `f64`.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let bytes = read(path)?;
    if bytes.starts_with(&PEMB_MAGIC) || !is_text_path(path) {
        return decode_pemb(&bytes, path);
    }
    let text = String::from_utf8(bytes).map_err(|_| Error::BadMagic { path: path.into() })?;
    parse_csv_embeddings(&text, path)
}

/// Writes CSV for a `.csv`/`.txt` path, `PEMB` otherwise.
pub fn save_embeddings(path: impl AsRef<Path>, e: &EmbeddingSet) -> Result<()> {
    let path = path.as_ref();
    if is_text_path(path) {
        write(path, embeddings_to_csv(e)?.as_bytes())
    } else {
        write(path, &encode_pemb(e)?)
    }
}

pub fn encode_plbl(labels: &[usize]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(PLBL_HEADER_LEN + 4 * labels.len());
    out.extend_from_slice(&PLBL_MAGIC);
    out.extend_from_slice(&[VERSION, 0, 0, 0]);
    out.extend_from_slice(&(labels.len() as u64).to_le_bytes());
    for &l in labels {
        let v =
            u32::try_from(l).map_err(|_| Error::ConfigInvalid(format!("label {l} does not fit in u32")))?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_plbl(bytes: &[u8], path: &Path) -> Result<Vec<usize>> {
    if bytes.len() < 4 || bytes[..4] != PLBL_MAGIC {
        return Err(Error::BadMagic { path: path.into() });
    }
    if bytes.len() < PLBL_HEADER_LEN {
        return Err(Error::TruncatedFile {
            path: path.into(),
            expected: PLBL_HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    if bytes[4] != VERSION {
        return Err(Error::BadHeader { path: path.into(), detail: format!("version {}", bytes[4]) });
    }
    if bytes[5..8] != [0, 0, 0] {
        return Err(Error::BadHeader { path: path.into(), detail: "reserved bytes are not zero".into() });
    }
    let n = u64_at(bytes, 8);
    let expected = n
        .checked_mul(4)
        .and_then(|p| p.checked_add(PLBL_HEADER_LEN as u64))
        .ok_or_else(|| Error::BadHeader { path: path.into(), detail: format!("n = {n} overflows") })?;
    check_length(path, expected, bytes.len() as u64)?;
    Ok(bytes[PLBL_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4-byte chunk")) as usize)
        .collect())
}

pub fn parse_text_labels(text: &str, path: &Path) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| Error::Parse {
                path: path.into(),
                line: i + 1,
                token: l.trim().to_string(),
            })
        })
        .collect()
}

/// Loads `PLBL` (detected by its magic) or a text file of integers.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let bytes = read(path)?;
    if bytes.starts_with(&PLBL_MAGIC) || !is_text_path(path) {
        return decode_plbl(&bytes, path);
    }
    let text = String::from_utf8(bytes).map_err(|_| Error::BadMagic { path: path.into() })?;
    parse_text_labels(&text, path)
}

pub fn save_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    let path = path.as_ref();
    if is_text_path(path) {
        let text: String = labels.iter().map(|l| format!("{l}\n")).collect();
        write(path, text.as_bytes())
    } else {
        write(path, &encode_plbl(labels)?)
    }
}
