//! Regenerates the bundled fixture files.

use std::path::PathBuf;

use anyhow::Result;
use atp_harness::fixtures::write_all;
use clap::Parser;

#[derive(Parser)]
#[command(about = "Write the synthetic English and German fixtures")]
struct Cli {
    /// Target directory.
    #[arg(default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))]
    dir: PathBuf,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    for path in write_all(&cli.dir)? {
        println!("{}", path.display());
    }
    Ok(())
}
