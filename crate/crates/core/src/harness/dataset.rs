//! Directory datasets: `root/<source>/0_real/*` and `root/<source>/1_fake/*`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::img::{read_image, ImageTensor};

pub const REAL_DIR: &str = "0_real";
pub const FAKE_DIR: &str = "1_fake";
const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSample {
    pub path: PathBuf,
    /// 0 = natural, 1 = synthetic.
    pub label: u8,
    pub source_id: String,
}

impl LabeledSample {
    pub fn load(&self) -> Result<ImageTensor> {
        read_image(&self.path)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub samples: Vec<LabeledSample>,
    /// Entries skipped during ingestion (unknown folders, non-image files).
    pub ignored: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Source ids in sorted order, deduplicated.
    pub fn sources(&self) -> Vec<String> {
        let mut s: Vec<String> = self.samples.iter().map(|s| s.source_id.clone()).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn has_both_classes(&self) -> bool {
        let labels = self.labels();
        labels.contains(&0) && labels.contains(&1)
    }

    /// Sorts samples by `(source, path)`.
    pub fn canonicalize(&mut self) {
        self.samples
            .sort_by(|a, b| (&a.source_id, &a.path).cmp(&(&b.source_id, &b.path)));
    }
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        .unwrap_or(false)
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = fs::read_dir(dir)
        .map_err(|e| Error::from(e).at_path(dir))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::from(e).at_path(dir))?;
    entries.sort();
    Ok(entries)
}

/// PNG/JPEG files directly inside `dir`, sorted by path.
pub fn image_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    Ok(class_images(dir.as_ref())?.0)
}

/// Reads image files from one class folder; returns the paths and the count
/// of ignored entries.
fn class_images(dir: &Path) -> Result<(Vec<PathBuf>, usize)> {
    let mut images = Vec::new();
    let mut ignored = 0;
    for p in sorted_entries(dir)? {
        if p.is_file() && is_image(&p) {
            images.push(p);
        } else {
            ignored += 1;
        }
    }
    Ok((images, ignored))
}

/// Loads every `<source>/0_real` and `<source>/1_fake` folder under `root`.
///
/// Each source must have both class folders and neither may be empty.
/// Anything else (stray files, extra folders) is skipped and counted in
/// [`Dataset::ignored`].
pub fn load_dataset(root: impl AsRef<Path>) -> Result<Dataset> {
    let root = root.as_ref();
    let mut ds = Dataset::default();
    let mut problems = Vec::new();
    for source_dir in sorted_entries(root)? {
        if !source_dir.is_dir() {
            ds.ignored += 1;
            continue;
        }
        let source_id = source_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let real = source_dir.join(REAL_DIR);
        let fake = source_dir.join(FAKE_DIR);
        if !real.is_dir() || !fake.is_dir() {
            let missing: Vec<&str> = [(REAL_DIR, &real), (FAKE_DIR, &fake)]
                .into_iter()
                .filter(|(_, p)| !p.is_dir())
                .map(|(n, _)| n)
                .collect();
            problems.push(format!("{source_id}: missing {}", missing.join(" and ")));
            continue;
        }
        for entry in sorted_entries(&source_dir)? {
            if entry != real && entry != fake {
                ds.ignored += 1;
            }
        }
        for (dir, label) in [(&real, 0u8), (&fake, 1u8)] {
            let (images, ignored) = class_images(dir)?;
            ds.ignored += ignored;
            if images.is_empty() {
                problems.push(format!(
                    "{source_id}: {} has no images",
                    dir.file_name().unwrap().to_string_lossy()
                ));
            }
            ds.samples.extend(images.into_iter().map(|path| LabeledSample {
                path,
                label,
                source_id: source_id.clone(),
            }));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Dataset(problems.join("; ")));
    }
    if ds.samples.is_empty() {
        return Err(Error::Dataset(format!(
            "{} contains no <source>/{REAL_DIR} + {FAKE_DIR} folders",
            root.display()
        )));
    }
    if ds.ignored > 0 {
        log::warn!("{}: ignored {} unrecognized entries", root.display(), ds.ignored);
    }
    ds.canonicalize();
    Ok(ds)
}
