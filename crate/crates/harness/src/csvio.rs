//! Header-first, comma-separated tables. Floats are written with Rust's
//! shortest round-trip formatting so reading a file back is lossless.

use std::fmt::Display;
use std::path::Path;

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<D: Display>(&mut self, row: &[D]) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row.iter().map(|v| v.to_string()).collect());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_string(&self) -> Result<String, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| Failure::runtime(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| Failure::runtime(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::runtime(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Failure::runtime(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        std::fs::write(path, self.to_string()?).map_err(|e| Failure::io(path, e))
    }

    /// Parses a table; the first record must be a header (not numeric) and
    /// every row must match its width. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
        let mut records = r.records();
        let header: Vec<String> = match records.next() {
            None => return Err(Failure::config("line 1: empty file, header row missing")),
            Some(rec) => rec.map_err(|e| Failure::config(format!("line 1: {e}")))?.iter().map(str::to_string).collect(),
        };
        if header.iter().any(|h| h.trim().is_empty() || h.trim().parse::<f64>().is_ok()) {
            return Err(Failure::config(format!("line 1: header row missing (found {:?})", header.join(","))));
        }
        let mut rows = Vec::new();
        for rec in records {
            let rec = rec.map_err(|e| Failure::config(e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != header.len() {
                return Err(Failure::config(format!(
                    "line {line}: {} fields, header has {}",
                    rec.len(),
                    header.len()
                )));
            }
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Self { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|f| Failure { code: f.code, message: format!("{}: {}", path.display(), f.message) })
    }

    /// Numeric cell; `line` in errors counts the header as line 1.
    pub fn number(&self, row: usize, col: usize) -> Result<f64, Failure> {
        let cell = &self.rows[row][col];
        cell.trim().parse::<f64>().map_err(|_| {
            Failure::config(format!("line {}: column '{}' is not a number: {cell:?}", row + 2, self.header[col]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_first_row_is_not_a_header() {
        let e = Table::parse("0.1,1,q1q1,0.5\n").unwrap_err();
        assert_eq!(e.code, Failure::CONFIG);
        assert!(e.message.starts_with("line 1:"), "{}", e.message);
        assert!(Table::parse("").unwrap_err().message.contains("line 1"));
    }

    #[test]
    fn ragged_row_reports_its_line() {
        let e = Table::parse("a,b\n1,2\n3\n").unwrap_err();
        assert!(e.message.starts_with("line 3:"), "{}", e.message);
    }

    #[test]
    fn bad_number_reports_its_line() {
        let t = Table::parse("a,b\n1,2\n3,x\n").unwrap();
        assert_eq!(t.number(0, 1).unwrap(), 2.0);
        assert!(t.number(1, 1).unwrap_err().message.starts_with("line 3:"));
    }

    #[test]
    fn quoted_fields_survive() {
        let mut t = Table::new(&["name", "v"]);
        t.push(&["a,b", "1"]);
        assert_eq!(Table::parse(&t.to_string().unwrap()).unwrap(), t);
    }
}
