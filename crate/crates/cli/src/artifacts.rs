//! Output files: written to a temporary name and renamed into place, each
//! recorded with its SHA-256 for the summary.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

pub struct Artifacts {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

/// A file being streamed; nothing is visible under its final name until
/// [`Artifacts::commit`].
pub struct Pending {
    name: String,
    out: BufWriter<NamedTempFile>,
    hasher: Sha256,
    bytes: u64,
}

impl Write for Pending {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let k = self.out.write(buf)?;
        self.hasher.update(&buf[..k]);
        self.bytes += k as u64;
        Ok(k)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex(&Sha256::digest(data))
}

impl Artifacts {
    pub fn create(dir: &Path) -> io::Result<Artifacts> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    pub fn begin(&self, name: &str) -> io::Result<Pending> {
        Ok(Pending {
            name: name.to_string(),
            out: BufWriter::new(NamedTempFile::new_in(&self.dir)?),
            hasher: Sha256::new(),
            bytes: 0,
        })
    }

    pub fn commit(&mut self, p: Pending) -> io::Result<()> {
        let file = p.out.into_inner().map_err(|e| e.into_error())?;
        file.as_file().sync_all()?;
        file.persist(self.dir.join(&p.name)).map_err(|e| e.error)?;
        self.files.retain(|f| f.path != p.name);
        self.files.push(FileRecord { path: p.name, sha256: hex(&p.hasher.finalize()), bytes: p.bytes });
        Ok(())
    }

    pub fn write(&mut self, name: &str, data: &[u8]) -> io::Result<()> {
        let mut p = self.begin(name)?;
        p.write_all(data)?;
        self.commit(p)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let mut text = serde_json::to_vec_pretty(value).map_err(io::Error::other)?;
        text.push(b'\n');
        self.write(name, &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_are_hashed_and_replaced_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::create(&dir.path().join("out")).unwrap();
        a.write("x.txt", b"abc").unwrap();
        assert_eq!(a.files()[0].sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        let mut p = a.begin("y.bin").unwrap();
        p.write_all(b"partial").unwrap();
        assert!(!a.dir().join("y.bin").exists());
        a.commit(p).unwrap();
        assert_eq!(fs::read(a.dir().join("y.bin")).unwrap(), b"partial");
        a.write("x.txt", b"abcd").unwrap();
        assert_eq!(a.files().len(), 2);
        assert_eq!(a.files()[1].bytes, 4);
        let leftovers = fs::read_dir(a.dir()).unwrap().count();
        assert_eq!(leftovers, 2);
    }
}
