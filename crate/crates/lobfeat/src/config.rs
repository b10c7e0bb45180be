use std::path::Path;

use lobfeat_core::Config;
use sha2::{Digest, Sha256};

use crate::error::{io_err, LobfeatError, Result};

/// Reads a TOML configuration; missing keys keep their defaults.
pub fn load(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse(&text).map_err(|source| LobfeatError::Toml { path: path.to_path_buf(), source })
}

pub fn parse(text: &str) -> Result<Config, toml::de::Error> {
    toml::from_str(text)
}

pub fn load_or_default(path: Option<&Path>) -> Result<Config> {
    path.map_or_else(|| Ok(Config::default()), load)
}

/// First 16 hex digits of the SHA-256 of the configuration's JSON form.
pub fn hash(config: &Config) -> String {
    let json = serde_json::to_vec(config).expect("configuration serialises");
    hex::encode(&Sha256::digest(&json)[..8])
}
