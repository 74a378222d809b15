//! Output files. CSV tables open with `#` comment lines carrying the version,
//! the convention tag and the resolved config as one-line JSON, then a
//! header row. Numbers use the shortest round-trip formatting, so identical
//! runs give identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use robin_core::oracle::CONVENTION;
use serde::Serialize;

use crate::config::{runtime_err, CliError};

pub const VERSION: &str = env!("ROBIN_MC_VERSION");

pub fn out_path(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| runtime_err(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir.join(name))
}

/// A cell: a number, or empty when there is nothing to report.
pub fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<C: Serialize>(
    path: &Path,
    config: &C,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    let cfg = serde_json::to_string(config).map_err(runtime_err)?;
    writeln!(buf, "# robin-mc {VERSION}").map_err(runtime_err)?;
    writeln!(buf, "# convention {CONVENTION}").map_err(runtime_err)?;
    writeln!(buf, "# config {cfg}").map_err(runtime_err)?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(runtime_err)?;
        for r in rows {
            w.write_record(r).map_err(runtime_err)?;
        }
        w.flush().map_err(runtime_err)?;
    }
    fs::write(path, buf).map_err(|e| runtime_err(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(runtime_err)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| runtime_err(format!("cannot write {}: {e}", path.display())))
}
