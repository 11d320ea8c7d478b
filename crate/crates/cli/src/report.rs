//! Output-file helpers. Every CSV starts with one timestamp comment line
//! (the only line allowed to differ between identical runs), then a header
//! row; floats carry 17 significant digits.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// `# generated_unix=...` plus optional extra fields (wall times live
/// here so the data rows stay deterministic).
pub fn timestamp_line(extra: &str) -> String {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    if extra.is_empty() {
        format!("# generated_unix={now}\n")
    } else {
        format!("# generated_unix={now} {extra}\n")
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("writing {}: {e}", path.display()))
}
