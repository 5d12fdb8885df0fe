use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::fail::Failure;

/// Output directory that remembers what was written to it.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
    quiet: bool,
}

impl Output {
    pub fn create(dir: &Path, quiet: bool) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new(), quiet })
    }

    pub fn write_with(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.files.push(name.to_string());
        if !self.quiet {
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
            writeln!(w)
        })
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(mut self, command: &str, config: &[u8], seed: u64, wall_time: f64, status: &str) -> Result<(), Failure> {
        let manifest = json!({
            "command": command,
            "config_sha256": hex::encode(Sha256::digest(config)),
            "seed": seed,
            "versions": {
                "ecotone-cli": env!("CARGO_PKG_VERSION"),
                "ecotone-core": ecotone::VERSION,
            },
            "wall_time_seconds": wall_time,
            "status": status,
            "files": self.files,
        });
        let quiet = self.quiet;
        self.quiet = true;
        self.write_json("manifest.json", &manifest)?;
        if !quiet {
            eprintln!("wrote {}", self.dir.join("manifest.json").display());
        }
        Ok(())
    }
}
