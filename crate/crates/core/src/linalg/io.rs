//! Matrix files: CSV (one row per line) or a JSON array of rows.

use std::fmt::Write as _;
use std::path::Path;

use super::Matrix;
use crate::error::{Error, Result};

impl Matrix {
    /// Parses comma-separated rows. Blank lines and lines starting with `#`
    /// are skipped.
    pub fn from_csv_str(text: &str, source_name: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut width = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                source_name: source_name.to_string(),
                line: idx + 1,
                message,
            };
            let row = line
                .split(',')
                .map(|field| {
                    let field = field.trim();
                    field
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_err(format!("not a finite number: {field:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(parse_err(format!("expected {w} columns, found {}", row.len())))
                }
                _ => {}
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: 0,
                message: "no matrix rows".into(),
            });
        }
        Self::from_rows(rows)
    }

    pub fn from_json_str(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Reads a matrix file, choosing JSON when the first non-blank character
    /// is `[` and CSV otherwise.
    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            source_name: name.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        if text.trim_start().starts_with('[') {
            Self::from_json_str(&text, &name)
        } else {
            Self::from_csv_str(&text, &name)
        }
    }

    /// CSV with 17 significant digits per entry, which round-trips `f64`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows() {
            let fields: Vec<String> = self.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_csv_with_comments() {
        let m = Matrix::from_csv_str("# T\n1, 0\n\n0,2\n", "t.csv").unwrap();
        assert_eq!(m, Matrix::diag(&[1.0, 2.0]).unwrap());
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let err = Matrix::from_csv_str("1,2\n3,x\n", "bad.csv").unwrap_err();
        assert_eq!(err.to_string(), "bad.csv:2: not a finite number: \"x\"");
        let err = Matrix::from_csv_str("1,2\n3\n", "ragged.csv").unwrap_err();
        assert!(err.to_string().starts_with("ragged.csv:2:"));
        assert!(Matrix::from_csv_str("\n# only comments\n", "e.csv").is_err());
    }

    #[test]
    fn json_form() {
        let m = Matrix::from_json_str("[[1,2],[3,4]]", "m.json").unwrap();
        assert_eq!(m.to_json_string(), "[[1.0,2.0],[3.0,4.0]]");
        assert!(Matrix::from_json_str("[[1,2],[3]]", "m.json").is_err());
    }

    proptest! {
        #[test]
        fn csv_and_json_round_trip(entries in prop::collection::vec(-1e6f64..1e6, 6)) {
            let m = Matrix::new(2, 3, entries).unwrap();
            prop_assert_eq!(Matrix::from_csv_str(&m.to_csv_string(), "rt").unwrap(), m.clone());
            prop_assert_eq!(Matrix::from_json_str(&m.to_json_string(), "rt").unwrap(), m);
        }
    }
}
