//! Regenerates the committed replay fixtures.
//!
//! cargo run --example gen_fixtures -- [OUT_DIR]

use std::fs;
use std::path::PathBuf;

use ghminer::replay::{sets, write_fixture_set};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"));
    for (name, entries) in sets::all() {
        let dir = root.join(name);
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        write_fixture_set(&dir, &entries)?;
        println!("{name}: {} entries", entries.len());
    }
    Ok(())
}
