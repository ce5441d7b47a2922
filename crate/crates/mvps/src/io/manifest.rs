//! SHA-256 manifest of every artifact a command writes.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{MvpsError, Result};

/// Accumulates (relative name, digest) pairs and writes `manifest.txt`.
#[derive(Debug, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    /// Hash an already-written file; `name` is how it appears in the manifest.
    pub fn add_file(&mut self, name: &str, path: &Path) -> Result<()> {
        let bytes = fs::read(path)
            .map_err(|e| MvpsError::Config(format!("cannot hash {}: {e}", path.display())))?;
        self.entries.push((name.to_string(), sha256_hex(&bytes)));
        Ok(())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Write `<hash>  <name>` lines (the sha256sum format) to
    /// `dir/manifest.txt`; returns the path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let mut text = String::new();
        for (name, hash) in &self.entries {
            text.push_str(hash);
            text.push_str("  ");
            text.push_str(name);
            text.push('\n');
        }
        let path = dir.join("manifest.txt");
        fs::write(&path, text)
            .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_matches_known_vector() {
        // sha256 of the empty string and of "abc" are standard test vectors
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_lists_written_files() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("data.csv");
        fs::write(&file, "t,M0\n0,1\n").unwrap();
        let mut manifest = Manifest::new();
        manifest.add_file("data.csv", &file).unwrap();
        let path = manifest.write(dir.path()).unwrap();
        let text = fs::read_to_string(path).unwrap();
        let expected = sha256_hex(b"t,M0\n0,1\n");
        assert_eq!(text, format!("{expected}  data.csv\n"));
    }
}
