use std::env;
use std::path::PathBuf;

fn main() {
    let dir = env::var("CARGO_MANIFEST_DIR").expect("cargo sets CARGO_MANIFEST_DIR");
    let header = PathBuf::from(&dir).join("include").join("isoweights.h");
    std::fs::create_dir_all(header.parent().expect("header has a parent")).expect("create include/");
    let mut config = cbindgen::Config::default();
    config.language = cbindgen::Language::C;
    config.include_guard = Some("ISOWEIGHTS_H".into());
    config.cpp_compat = true;
    config.documentation = true;
    config.enumeration.prefix_with_name = true;
    cbindgen::Builder::new()
        .with_crate(&dir)
        .with_config(config)
        .generate()
        .expect("generate C header")
        .write_to_file(&header);
    println!("cargo:rerun-if-changed=src");
    println!("cargo:rerun-if-changed=build.rs");
}
