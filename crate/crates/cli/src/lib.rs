//! Command-line front-end for `phononflux-core`: strict JSON scenarios,
//! parallel parameter sweeps and reproducible CSV tables.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod selfcheck;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_config, ConfigError, ScenarioConfig};
pub use error::CliError;
pub use run::{run, RunOutput};
pub use table::ResultTable;

/// Runs `cfg` on a pool of `threads` workers (all cores when `None`).
pub fn run_with_threads(cfg: &ScenarioConfig, threads: Option<usize>) -> Result<RunOutput, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| CliError::Threads(e.to_string()))?;
    pool.install(|| run(cfg))
}

/// Path of table `name` for output prefix `prefix`.
pub fn table_path(prefix: &Path, name: &str, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(format!("_{name}.{ext}"));
    PathBuf::from(s)
}

/// Writes `<prefix>_<name>.csv` and `<prefix>_<name>.meta.json` for every
/// table and returns the CSV paths.
pub fn write_tables(tables: &[ResultTable], prefix: &Path) -> Result<Vec<PathBuf>, CliError> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            context: format!("creating {}", dir.display()),
            source,
        })?;
    }
    let mut written = Vec::with_capacity(tables.len());
    for t in tables {
        let csv_path = table_path(prefix, &t.name, "csv");
        let meta_path = table_path(prefix, &t.name, "meta.json");
        let io = |path: &Path| {
            let context = format!("writing {}", path.display());
            move |source| CliError::Io { context, source }
        };
        fs::write(&csv_path, t.to_csv_string()?).map_err(io(&csv_path))?;
        fs::write(&meta_path, t.meta_json()).map_err(io(&meta_path))?;
        written.push(csv_path);
    }
    Ok(written)
}
