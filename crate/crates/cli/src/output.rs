use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;

/// Where the single data file of a command goes.
pub fn open_single(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

/// Directory for commands that write several files.
pub struct OutDir(PathBuf);

impl OutDir {
    pub fn new(out: Option<&Path>) -> anyhow::Result<Self> {
        let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(OutDir(dir))
    }

    pub fn create(&self, name: &str) -> anyhow::Result<(PathBuf, BufWriter<File>)> {
        let p = self.0.join(name);
        let f = File::create(&p).with_context(|| format!("cannot create {}", p.display()))?;
        Ok((p, BufWriter::new(f)))
    }
}
