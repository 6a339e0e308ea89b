//! Subcommand implementations.

pub mod analytic;
pub mod audit;
pub mod bench;
pub mod calibrate;
pub mod estimate;
pub mod oracle;
pub mod privatize;

use std::path::{Path, PathBuf};

/// Global CLI context.
pub struct Ctx {
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Ctx {
    /// Ensures the output directory exists and returns it.
    pub fn out_dir(&self) -> dprp::Result<Option<&Path>> {
        if let Some(dir) = &self.out {
            std::fs::create_dir_all(dir)?;
            Ok(Some(dir))
        } else {
            Ok(None)
        }
    }
}

/// Writes a CSV table to `<out>/<name>` or stdout, returning the file path
/// when one was written.
pub fn emit_table(ctx: &Ctx, name: &str, contents: &str) -> dprp::Result<Option<PathBuf>> {
    match ctx.out_dir()? {
        Some(dir) => {
            let path = dir.join(name);
            std::fs::write(&path, contents)?;
            Ok(Some(path))
        }
        None => {
            print!("{contents}");
            Ok(None)
        }
    }
}
