use std::fs;
use std::io::Write;
use std::path::Path;

use super::run::RecordLine;
use crate::{Error, Result};

/// Write to a sibling temp file, sync, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("{} has no file name", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Parse a JSON-lines record file.
pub fn read_records(path: &Path) -> Result<Vec<RecordLine>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let l: RecordLine = serde_json::from_str(line)?;
        if l.schema_version != super::config::SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "{}: schema_version {} is not supported",
                path.display(),
                l.schema_version
            )));
        }
        out.push(l);
    }
    Ok(out)
}
