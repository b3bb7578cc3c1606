//! Rejects concurrent runs on one output directory.

use std::fs::{File, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const LOCK_FILE: &str = ".revise.lock";

/// Held for the duration of a subcommand; removes the lock file on drop.
pub struct OutputLock {
    path: PathBuf,
    _file: File,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                let _ = writeln!(file, "{}", std::process::id());
                Ok(OutputLock { path, _file: file })
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => Err(CliError::runtime(format!(
                "{} is locked by another run ({}); delete the lock file if no run is active",
                dir.display(),
                path.display()
            ))),
            Err(e) => Err(CliError::runtime(format!("cannot create {}: {e}", path.display()))),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}
