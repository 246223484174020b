//! Output helpers that leave nothing behind when a command fails.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};

fn parent_dir(path: &Path) -> &Path {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
}

fn staging_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    parent_dir(path).join(format!(".{name}.{}.partial", std::process::id()))
}

/// Writes all files or none: everything is staged next to its target first,
/// then renamed into place.
pub fn write_all_or_nothing(files: &[(&Path, &[u8])]) -> Result<()> {
    let mut staged: Vec<PathBuf> = Vec::new();
    let cleanup = |paths: &[PathBuf]| {
        for p in paths {
            let _ = fs::remove_file(p);
        }
    };
    for (path, bytes) in files {
        let dir = parent_dir(path);
        let tmp = staging_path(path);
        let res = fs::create_dir_all(dir).and_then(|_| fs::write(&tmp, bytes));
        staged.push(tmp);
        if let Err(e) = res {
            cleanup(&staged);
            return Err(anyhow!("{}: {e}", path.display()));
        }
    }
    let mut done: Vec<PathBuf> = Vec::new();
    for (tmp, (path, _)) in staged.iter().zip(files) {
        if let Err(e) = fs::rename(tmp, path) {
            cleanup(&staged);
            cleanup(&done);
            return Err(anyhow!("{}: {e}", path.display()));
        }
        done.push(path.to_path_buf());
    }
    Ok(())
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_all_or_nothing(&[(p, text.as_bytes())]),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Tracks files written into an output folder and removes them unless the
/// command finishes. A folder that did not exist beforehand is removed whole.
pub struct OutputDir {
    root: PathBuf,
    created: bool,
    files: Vec<PathBuf>,
    committed: bool,
}

impl OutputDir {
    pub fn new(root: &Path) -> Result<Self> {
        let created = !root.exists();
        fs::create_dir_all(root).map_err(|e| anyhow!("{}: {e}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            created,
            files: Vec::new(),
            committed: false,
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Records a file about to be written under the folder.
    pub fn track(&mut self, path: PathBuf) -> Result<PathBuf> {
        let dir = parent_dir(&path);
        fs::create_dir_all(dir).map_err(|e| anyhow!("{}: {e}", dir.display()))?;
        self.files.push(path.clone());
        Ok(path)
    }

    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        if self.created {
            let _ = fs::remove_dir_all(&self.root);
        } else {
            for f in &self.files {
                let _ = fs::remove_file(f);
            }
        }
    }
}
