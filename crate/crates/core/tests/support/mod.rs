//! Generators, oracles and a concrete interpreter shared by the integration
//! tests. Every test binary uses a different part of it.
#![allow(dead_code)]

pub mod gen;
pub mod interp;
pub mod oracle;
pub mod specgen;

use std::path::PathBuf;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus_dir() -> PathBuf {
    crate_dir().join("corpus")
}

pub fn specs_dir(name: &str) -> PathBuf {
    crate_dir().join("specs").join(name)
}
