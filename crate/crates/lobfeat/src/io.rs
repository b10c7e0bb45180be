//! Message/book CSV files and the binary feature file.
//!
//! Feature file layout (little endian):
//!
//! | bytes | content                                  |
//! |-------|------------------------------------------|
//! | 4     | magic `LOBF`                             |
//! | 4     | version (u32, currently 1)               |
//! | 8     | D, features per sample (u64)             |
//! | 8     | N, samples (u64)                         |
//! | 8     | byte offset of the JSON manifest (u64)   |
//! | 8·N·D | values, one sample after another (f64)   |
//! | rest  | JSON manifest                            |

use std::fs;
use std::io::Write;
use std::path::Path;

use lobfeat_core::features::{FeatureMatrix, FeatureMeta};
use lobfeat_core::lob::{book_header, parse_book_text, parse_message_text, LobSnapshot, MessageEvent, MESSAGE_HEADER};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, LobfeatError, Result};

pub const MAGIC: &[u8; 4] = b"LOBF";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

pub fn read_messages(path: &Path) -> Result<Vec<MessageEvent>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(parse_message_text(&text)?)
}

pub fn read_book(path: &Path, depth: usize) -> Result<Vec<LobSnapshot>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(parse_book_text(&text, depth)?)
}

pub fn messages_csv(events: &[MessageEvent]) -> String {
    let mut s = String::with_capacity(events.len() * 40);
    s.push_str(MESSAGE_HEADER);
    s.push('\n');
    for e in events {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.timestamp,
            e.order_id,
            e.price,
            e.quantity,
            e.kind.as_str(),
            e.side.as_str()
        ));
    }
    s
}

pub fn book_csv(snapshots: &[LobSnapshot]) -> String {
    let depth = snapshots.first().map_or(0, |s| s.depth());
    let mut s = book_header(depth);
    s.push('\n');
    for snap in snapshots {
        s.push_str(&snap.timestamp.to_string());
        for l in snap.levels() {
            s.push_str(&format!(",{},{},{},{}", l.ask_price, l.ask_volume, l.bid_price, l.bid_volume));
        }
        s.push('\n');
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub features: Vec<FeatureMeta>,
    pub flags: Vec<bool>,
    pub mids: Vec<f64>,
    pub config_hash: String,
}

pub fn encode_features(m: &FeatureMatrix, config_hash: &str) -> Vec<u8> {
    let manifest = Manifest {
        features: m.meta.clone(),
        flags: m.flags.clone(),
        mids: m.mids.clone(),
        config_hash: config_hash.to_string(),
    };
    let json = serde_json::to_vec(&manifest).expect("manifest serialises");
    let offset = HEADER_LEN + 8 * m.values.len();
    let mut buf = Vec::with_capacity(offset + json.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(m.dim() as u64).to_le_bytes());
    buf.extend_from_slice(&(m.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(offset as u64).to_le_bytes());
    for v in &m.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&json);
    buf
}

pub fn decode_features(bytes: &[u8], path: &Path) -> Result<(FeatureMatrix, Manifest)> {
    let bad = |message: &str| LobfeatError::Format { path: path.to_path_buf(), message: message.to_string() };
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("not a feature file (bad magic)"));
    }
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let (d, n, offset) = (u64_at(8) as usize, u64_at(16) as usize, u64_at(24) as usize);
    let expected = n.checked_mul(d).and_then(|x| x.checked_mul(8)).and_then(|x| x.checked_add(HEADER_LEN));
    if expected != Some(offset) || offset > bytes.len() {
        return Err(bad("header sizes do not match the file"));
    }
    let values: Vec<f64> = bytes[HEADER_LEN..offset]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let manifest: Manifest = serde_json::from_slice(&bytes[offset..])
        .map_err(|source| LobfeatError::Json { path: path.to_path_buf(), source })?;
    if manifest.features.len() != d || manifest.flags.len() != n || manifest.mids.len() != n {
        return Err(bad("manifest does not match the header"));
    }
    let m = FeatureMatrix {
        meta: manifest.features.clone(),
        values,
        flags: manifest.flags.clone(),
        mids: manifest.mids.clone(),
    };
    Ok((m, manifest))
}

pub fn write_features(path: &Path, m: &FeatureMatrix, config_hash: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(&encode_features(m, config_hash)).map_err(io_err(path))
}

pub fn read_features(path: &Path) -> Result<(FeatureMatrix, Manifest)> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode_features(&bytes, path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|source| LobfeatError::Json { path: path.to_path_buf(), source })?;
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| LobfeatError::Json { path: path.to_path_buf(), source })
}

/// Feature metadata as `index -> {name, group, appendix_ref}`.
pub fn metadata_json(meta: &[FeatureMeta]) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = meta
        .iter()
        .map(|m| {
            (
                m.index.to_string(),
                serde_json::json!({ "name": m.name, "group": m.group, "appendix_ref": m.appendix_ref }),
            )
        })
        .collect();
    serde_json::Value::Object(map)
}
