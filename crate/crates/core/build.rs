//! Hash the library sources so cached results are invalidated whenever the
//! code changes.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

fn collect(dir: &Path, out: &mut Vec<std::path::PathBuf>) {
    let Ok(entries) = fs::read_dir(dir) else { return };
    for entry in entries.flatten() {
        let path = entry.path();
        if path.is_dir() {
            collect(&path, out);
        } else if path.extension().is_some_and(|e| e == "rs") {
            out.push(path);
        }
    }
}

fn main() {
    let src = Path::new("src");
    let mut files = Vec::new();
    collect(src, &mut files);
    files.sort();
    let mut hasher = Sha256::new();
    for f in &files {
        hasher.update(f.to_string_lossy().as_bytes());
        hasher.update(fs::read(f).unwrap_or_default());
    }
    let digest: String = hasher.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect();
    println!("cargo:rustc-env=ISOWEIGHTS_CODE_HASH={digest}");
    println!("cargo:rerun-if-changed=src");
}
