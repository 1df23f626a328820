//! Output helpers shared by the report writers.

use crate::error::Result;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Locale-independent number formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0e0" and friends so identical runs stay byte-identical.
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// Writes `contents` to `path` through a temporary sibling file and a rename,
/// so readers never observe a partially written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.partial"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
