#![allow(dead_code)]

use std::path::PathBuf;

use kirkman::{DesignFile, OneFactorization, OrientedQuads, OrientedTriples, ResolvableDesign};

pub const DESIGN_FIXTURES: [&str; 5] = [
    "kts9_storage",
    "kts9_worked",
    "kts27_worked",
    "kqs8_worked",
    "kqs16_worked",
];

pub const FACTORIZATION_FIXTURES: [&str; 3] = [
    "factorization6_worked",
    "factorization8_worked",
    "factorization12_worked",
];

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(format!("{name}.json"))
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn design_file(name: &str) -> DesignFile {
    serde_json::from_str(&read(name)).unwrap()
}

pub fn design(name: &str) -> ResolvableDesign {
    ResolvableDesign::from_json(&read(name)).unwrap()
}

pub fn triples(name: &str) -> OrientedTriples {
    OrientedTriples::from_file(&design_file(name)).unwrap()
}

pub fn quads(name: &str) -> OrientedQuads {
    OrientedQuads::from_file(&design_file(name)).unwrap()
}

pub fn factorization(name: &str) -> OneFactorization {
    OneFactorization::from_json(&read(name)).unwrap()
}

pub fn lists(design: &ResolvableDesign) -> Vec<Vec<Vec<u32>>> {
    design.to_file().classes
}
