use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

pub const SIG_DIGITS: usize = 12;

/// Formats `v` with 12 significant digits, plain decimal for moderate
/// magnitudes and scientific otherwise. Trailing zeros are dropped.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn round(v: f64) -> f64 {
    fmt_num(v).parse().unwrap_or(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: &'a [&'static str],
    rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Divides each named column by its largest absolute value.
    pub fn normalize_peak(&mut self, columns: &[&str]) {
        for (j, name) in self.columns.iter().enumerate() {
            if !columns.contains(name) {
                continue;
            }
            let peak = self.rows.iter().filter_map(|r| r[j]).map(f64::abs).fold(0.0, f64::max);
            if peak > 0.0 {
                for r in &mut self.rows {
                    if let Some(v) = r[j].as_mut() {
                        *v /= peak;
                    }
                }
            }
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| v.map(fmt_num).unwrap_or_default()))
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let rows = self.rows.iter().map(|r| r.iter().map(|v| v.map(round)).collect()).collect();
        json_bytes(&JsonTable { columns: &self.columns, rows })
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `path` through a temporary file in the same directory, so a
/// failed run never leaves a partial file behind. `None` writes to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match path {
        None => std::io::stdout().lock().write_all(bytes).map_err(io),
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            tmp.write_all(bytes).map_err(io)?;
            tmp.persist(p).map_err(|e| CliError::Io(format!("{}: {}", p.display(), e.error)))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(10.0), "10");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(200.0 / 201.0), "0.995024875622");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(1e-5), "0.00001");
    }

    #[test]
    fn csv_leaves_missing_cells_empty() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Some(1.0), None]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "a,b\n1,\n");
    }

    #[test]
    fn peak_normalization() {
        let mut t = Table::new(vec!["x", "y"]);
        t.push(vec![Some(1.0), Some(2.0)]);
        t.push(vec![Some(2.0), Some(4.0)]);
        t.normalize_peak(&["y"]);
        assert_eq!(t.rows[0], vec![Some(1.0), Some(0.5)]);
        assert_eq!(t.rows[1], vec![Some(2.0), Some(1.0)]);
    }

    #[test]
    fn atomic_write_replaces_target() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        emit(Some(&p), b"one").unwrap();
        emit(Some(&p), b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
