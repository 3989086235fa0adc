//! CSV and JSON writers.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

/// `<prefix>_<suffix>`, e.g. `runs/a` + `estimates.csv` → `runs/a_estimates.csv`.
pub fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push("_");
    s.push(suffix);
    PathBuf::from(s)
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// In-memory CSV with LF line endings.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[String]) -> Self {
        let mut c = Self::default();
        c.raw_row(header.iter().map(String::as_str));
        c
    }

    fn raw_row<'a>(&mut self, cells: impl Iterator<Item = &'a str>) {
        for (i, cell) in cells.enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(cell);
        }
        self.text.push('\n');
    }

    pub fn row(&mut self, cells: &[String]) {
        self.raw_row(cells.iter().map(String::as_str));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub fn coord_header(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub fn coords(x: &[f64]) -> Vec<String> {
    x.iter().map(|&v| num(v)).collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    let _ = writeln!(text);
    write_file(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.0, -0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, f64::MAX] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            assert!(!s.contains(','));
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn prefix_paths() {
        assert_eq!(prefixed(Path::new("out/run"), "field.csv"), PathBuf::from("out/run_field.csv"));
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&coord_header(2));
        c.row(&coords(&[0.5, -1.0]));
        assert_eq!(c.as_str(), "x1,x2\n5.0000000000000000e-1,-1.0000000000000000e0\n");
    }
}
