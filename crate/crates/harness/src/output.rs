//! Long-format CSV tables.

use std::io::Write;

/// A CSV table with a fixed header. Numbers are written in Rust's shortest
/// round-trip form, so equal values always produce equal bytes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        // Writing into a Vec cannot fail.
        let _ = self.write_to(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    }
}

pub fn num(v: f64) -> String {
    v.to_string()
}

/// Rows `(rep, statistic, value)` for one replicate.
pub fn rep_rows(rep: usize, stats: &[(&str, f64)]) -> Vec<Vec<String>> {
    stats
        .iter()
        .map(|(name, v)| vec![rep.to_string(), (*name).to_string(), num(*v)])
        .collect()
}
