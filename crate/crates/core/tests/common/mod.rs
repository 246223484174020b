#![allow(dead_code)]

use std::path::Path;

use sidforge::harness::{natural_corpus, synthesize_fake, NaturalConfig, FAKE_DIR, REAL_DIR};
use sidforge::img::{write_png, ImageTensor};

/// Writes `root/<source>/0_real/NNNN.png` and the matching toy fakes.
pub fn write_pairs(root: &Path, source: &str, reals: &[ImageTensor]) {
    let real_dir = root.join(source).join(REAL_DIR);
    let fake_dir = root.join(source).join(FAKE_DIR);
    std::fs::create_dir_all(&real_dir).unwrap();
    std::fs::create_dir_all(&fake_dir).unwrap();
    for (i, x) in reals.iter().enumerate() {
        write_png(x, real_dir.join(format!("{i:04}.png"))).unwrap();
        let fake = synthesize_fake(x).unwrap();
        write_png(&fake, fake_dir.join(format!("{i:04}.png"))).unwrap();
    }
}

pub fn corpus(size: usize, count: usize, seed: u64) -> Vec<ImageTensor> {
    let cfg = NaturalConfig {
        height: size,
        width: size,
        ..NaturalConfig::default()
    };
    natural_corpus(&cfg, count, seed).unwrap()
}
