//! On-disk cache of rendered outputs, keyed by SHA-256.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "NS_SIGMA_CACHE";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The environment variable wins over the flag.
    pub fn resolve(flag: Option<&Path>) -> Option<Cache> {
        match std::env::var_os(ENV_VAR) {
            Some(dir) if !dir.is_empty() => Some(Cache::new(dir)),
            _ => flag.map(Cache::new),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(parts: &[&str]) -> String {
        let mut h = Sha256::new();
        for p in parts {
            h.update(p.as_bytes());
            h.update([0u8]);
        }
        format!("{:x}", h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.out"))
    }

    pub fn get(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.path(key)).ok()
    }

    /// Writes through a temporary file so readers never see a partial entry.
    pub fn put(&self, key: &str, content: &str) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{key}.tmp{}", std::process::id()));
        fs::write(&tmp, content)?;
        fs::rename(tmp, self.path(key))
    }
}
