use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// Formats a value with 17 significant digits.
pub fn format_value(v: f64) -> String {
    // adding +0 folds -0 into 0
    format!("{:.16e}", v + 0.0)
}

/// Writes a header row and numeric rows as comma-separated text with LF endings.
pub fn write_csv<W: Write>(out: W, header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row.into_iter().map(format_value))?;
    }
    writer.flush()?;
    Ok(())
}

/// `data.csv` → `data.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes the table to `out` (or stdout) and the JSON report next to it (or
/// to stderr).
pub fn emit<T: Serialize>(
    out: Option<&Path>,
    header: &[String],
    rows: Vec<Vec<f64>>,
    report: &T,
) -> Result<()> {
    let json = to_json_string(report)?;
    match out {
        Some(path) => {
            write_csv(io::BufWriter::new(File::create(path)?), header, rows)?;
            std::fs::write(sidecar_path(path), json)?;
        }
        None => {
            write_csv(io::stdout().lock(), header, rows)?;
            io::stderr().lock().write_all(json.as_bytes())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["tau".into(), "x".into()], vec![vec![0.0, 0.1], vec![1.0, 1.0 / 3.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "tau,x");
        assert_eq!(lines[2], "1.0000000000000000e0,3.3333333333333331e-1");
        let back: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/fig1.csv")), PathBuf::from("out/fig1.json"));
    }
}
