//! On-disk memo of Betti tables, one JSON file per key.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    /// Hex SHA-256 of the length-prefixed parts.
    pub fn key(parts: &[&str]) -> String {
        let mut h = Sha256::new();
        for p in parts {
            h.update((p.len() as u64).to_le_bytes());
            h.update(p.as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn path(dir: &Path, key: &str) -> PathBuf {
        dir.join(format!("{key}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let dir = self.dir.as_ref()?;
        let text = fs::read_to_string(Self::path(dir, key)).ok()?;
        match serde_json::from_str(&text) {
            Ok(v) => {
                debug!("cache hit {key}");
                Some(v)
            }
            Err(e) => {
                warn!("ignoring corrupt cache entry {key}: {e}");
                None
            }
        }
    }

    /// Writes to a temporary file in the cache directory, then renames it
    /// into place. Failures only cost a recomputation later.
    pub fn put<T: Serialize>(&self, key: &str, value: &T) {
        let Some(dir) = self.dir.as_ref() else { return };
        let result = (|| -> std::io::Result<()> {
            fs::create_dir_all(dir)?;
            let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&serde_json::to_vec(value).map_err(std::io::Error::other)?)?;
            f.sync_all()?;
            fs::rename(&tmp, Self::path(dir, key))
        })();
        if let Err(e) = result {
            warn!("could not write cache entry {key}: {e}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let key = Cache::key(&["a", "b"]);
        assert_ne!(key, Cache::key(&["ab", ""]));
        assert_eq!(cache.get::<Vec<u32>>(&key), None);
        cache.put(&key, &vec![1u32, 2, 3]);
        assert_eq!(cache.get::<Vec<u32>>(&key), Some(vec![1, 2, 3]));
        fs::write(dir.path().join(format!("{key}.json")), "{not json").unwrap();
        assert_eq!(cache.get::<Vec<u32>>(&key), None);
        assert!(Cache::new(None).get::<u32>(&key).is_none());
    }
}
