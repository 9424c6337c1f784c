//! Rebuilds the vendored `Phi_N` tables from `q`-expansions.
//!
//! cargo run --release --example generate_modular_polynomials -- [out_dir]

use std::path::PathBuf;

use cmpadic::modular::phi::{generate, SUPPORTED_LEVELS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&dir)?;
    for level in SUPPORTED_LEVELS {
        let t = std::time::Instant::now();
        let phi = generate(level)?;
        let path = dir.join(format!("phi_{level}.txt"));
        std::fs::write(&path, phi.to_text())?;
        println!(
            "Phi_{level}: degree {} -> {} ({:.2?})",
            phi.degree(),
            path.display(),
            t.elapsed()
        );
    }
    Ok(())
}
