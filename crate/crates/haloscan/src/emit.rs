//! CSV/JSON emission helpers. Outputs carry no timestamps so re-running a
//! command overwrites byte-identical files.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Write serializable rows as CSV with a header row.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::config(format!("cannot open {}: {e}", path.display())))?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::config(format!("CSV serialization failed: {e}")))?;
    }
    writer.flush()?;
    Ok(())
}

/// Write a pretty-printed JSON document.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::config(format!("JSON serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Emit a generic matplotlib script that plots the named CSV columns.
/// Kept dependency-free on the Rust side; the script is plain text.
pub fn write_plot_script(
    csv_path: &Path,
    x_column: &str,
    y_columns: &[&str],
    log_y: bool,
) -> Result<PathBuf> {
    let script_path = csv_path.with_extension("py");
    let csv_name = csv_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::config("CSV path has no file name"))?;
    let mut lines = vec![
        "#!/usr/bin/env python3".to_string(),
        "import csv".to_string(),
        "import matplotlib.pyplot as plt".to_string(),
        String::new(),
        format!("rows = list(csv.DictReader(open({csv_name:?})))"),
        format!("x = [float(r[{x_column:?}]) for r in rows]"),
    ];
    for y in y_columns {
        lines.push(format!("plt.plot(x, [float(r[{y:?}]) for r in rows], label={y:?})"));
    }
    if log_y {
        lines.push("plt.yscale('log')".to_string());
    }
    lines.push(format!("plt.xlabel({x_column:?})"));
    lines.push("plt.legend()".to_string());
    lines.push(format!("plt.savefig({:?}, dpi=150)", csv_path.with_extension("png").file_name().unwrap()));
    lines.push(String::new());
    fs::write(&script_path, lines.join("\n"))?;
    Ok(script_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        x: f64,
        y: f64,
    }

    #[test]
    fn csv_and_json_round_trip_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("rows.csv");
        let rows = vec![Row { x: 1.0, y: 2.5 }, Row { x: 2.0, y: -0.125 }];
        write_csv(&csv_path, &rows).unwrap();
        let first = fs::read(&csv_path).unwrap();
        write_csv(&csv_path, &rows).unwrap();
        assert_eq!(first, fs::read(&csv_path).unwrap());
        assert!(String::from_utf8(first).unwrap().starts_with("x,y\n"));

        let json_path = dir.path().join("summary.json");
        write_json(&json_path, &serde_json::json!({"a": 1})).unwrap();
        let j1 = fs::read(&json_path).unwrap();
        write_json(&json_path, &serde_json::json!({"a": 1})).unwrap();
        assert_eq!(j1, fs::read(&json_path).unwrap());
    }

    #[test]
    fn plot_script_references_columns() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("curve.csv");
        fs::write(&csv_path, "m,chi\n1,2\n").unwrap();
        let script = write_plot_script(&csv_path, "m", &["chi"], true).unwrap();
        let text = fs::read_to_string(script).unwrap();
        assert!(text.contains("\"chi\"") && text.contains("yscale"));
    }
}
