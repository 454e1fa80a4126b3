//! Content-addressed storage for raw page bodies, keyed by SHA-256. Bodies
//! are written once and shared by every record that references the hash.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Lowercase hex SHA-256 of `bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// A directory of body files laid out as `<root>/<hh>/<rest-of-hash>`, two
/// hex chars of fan-out to keep directories small.
#[derive(Debug, Clone)]
pub struct RawStore {
    root: PathBuf,
}

impl RawStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(RawStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_for(&self, hash: &str) -> Result<PathBuf> {
        if hash.len() != 64 || !hash.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Model(format!("not a content hash: {hash:?}")));
        }
        Ok(self.root.join(&hash[..2]).join(&hash[2..]))
    }

    /// Stores `bytes`, returning the content hash. A body already present is
    /// left untouched, so the store is idempotent and safe to re-run.
    pub fn put(&self, bytes: &[u8]) -> Result<String> {
        let hash = content_hash(bytes);
        let path = self.path_for(&hash)?;
        if path.exists() {
            return Ok(hash);
        }
        fs::create_dir_all(path.parent().expect("fan-out parent"))?;
        let tmp = path.with_extension("partial");
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &path)?;
        Ok(hash)
    }

    pub fn get(&self, hash: &str) -> Result<Vec<u8>> {
        Ok(fs::read(self.path_for(hash)?)?)
    }

    pub fn contains(&self, hash: &str) -> bool {
        self.path_for(hash).map(|p| p.exists()).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_get_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = RawStore::open(dir.path().join("store")).unwrap();
        let body = b"<html>policy</html>".to_vec();
        let hash = store.put(&body).unwrap();
        assert_eq!(hash, content_hash(&body));
        assert!(store.contains(&hash));
        assert_eq!(store.get(&hash).unwrap(), body);
    }

    #[test]
    fn put_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let store = RawStore::open(dir.path()).unwrap();
        let h1 = store.put(b"same").unwrap();
        let h2 = store.put(b"same").unwrap();
        assert_eq!(h1, h2);
    }

    #[test]
    fn one_byte_change_changes_address() {
        assert_ne!(content_hash(b"abc"), content_hash(b"abd"));
        assert_eq!(content_hash(b""), content_hash(b""));
    }

    #[test]
    fn rejects_bad_hash_keys() {
        let dir = tempfile::tempdir().unwrap();
        let store = RawStore::open(dir.path()).unwrap();
        assert!(store.get("not-a-hash").is_err());
        assert!(store.get("../../etc/passwd").is_err());
    }
}
