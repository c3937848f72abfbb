//! Output records and their table, CSV and JSON renderings.

use serde::{Deserialize, Serialize};

use crate::args::Format;
use crate::error::CliError;

/// Top-level JSON document: `{"command": ..., "records": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub command: String,
    pub records: Vec<T>,
}

/// A solved spectroscopic level next to its reference energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub system: String,
    pub level: String,
    pub z: f64,
    pub e_cf: f64,
    pub e_d: f64,
    pub e_s: f64,
    pub rel_err: f64,
    pub flagged: bool,
}

/// A determinant zero found by a channel scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleRow {
    pub channel: String,
    /// Rung of the Sturmian ladder whose closed-form energy is nearest.
    pub index: u32,
    pub e_cf: f64,
    pub e_exact: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfDiagnostics {
    pub value_re: f64,
    pub value_im: f64,
    pub terms_used: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenRecord {
    pub channel: String,
    pub rank: usize,
    pub binding: f64,
    pub imag: f64,
    pub condition: f64,
    pub det_inverse_re: f64,
    pub det_inverse_im: f64,
    /// Row-major real parts.
    pub values_re: Vec<f64>,
    /// Row-major imaginary parts; all zero for real energies.
    pub values_im: Vec<f64>,
    /// Absent when the Jacobi matrix is diagonal at this energy.
    pub cf: Option<CfDiagnostics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub r: f64,
    pub value: f64,
}

/// Rows shared by the table and CSV renderings.
pub trait Tabular {
    fn headers() -> Vec<&'static str>;
    fn cells(&self) -> Vec<String>;
}

fn energy(x: f64) -> String {
    format!("{x:.10}")
}

fn small(x: f64) -> String {
    format!("{x:.3e}")
}

impl Tabular for LevelRow {
    fn headers() -> Vec<&'static str> {
        vec!["system", "level", "E_cf", "E_D", "E_S", "rel_err"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.system.clone(),
            self.level.clone(),
            energy(self.e_cf),
            energy(self.e_d),
            energy(self.e_s),
            small(self.rel_err),
        ]
    }
}

impl Tabular for PoleRow {
    fn headers() -> Vec<&'static str> {
        vec!["channel", "index", "E_cf", "E_exact", "rel_err"]
    }

    fn cells(&self) -> Vec<String> {
        vec![self.channel.clone(), self.index.to_string(), energy(self.e_cf), energy(self.e_exact), small(self.rel_err)]
    }
}

impl Tabular for SamplePoint {
    fn headers() -> Vec<&'static str> {
        vec!["r", "S_n(r)"]
    }

    fn cells(&self) -> Vec<String> {
        vec![format!("{:.10}", self.r), format!("{:.10e}", self.value)]
    }
}

/// One matrix entry of a [`GreenRecord`], for table and CSV output.
pub struct GreenEntry {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

impl Tabular for GreenEntry {
    fn headers() -> Vec<&'static str> {
        vec!["row", "col", "re", "im"]
    }

    fn cells(&self) -> Vec<String> {
        vec![self.row.to_string(), self.col.to_string(), format!("{:.10e}", self.re), format!("{:.10e}", self.im)]
    }
}

impl GreenRecord {
    pub fn entries(&self) -> Vec<GreenEntry> {
        let n = self.rank;
        (0..n * n)
            .map(|k| GreenEntry { row: k / n, col: k % n, re: self.values_re[k], im: self.values_im[k] })
            .collect()
    }
}

fn aligned(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn csv_text(headers: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV cells are UTF-8"))
}

/// Renders `rows` as an aligned table or CSV.
pub fn render_rows<T: Tabular>(rows: &[T], format: Format) -> Result<String, CliError> {
    let headers = T::headers();
    let cells: Vec<Vec<String>> = rows.iter().map(Tabular::cells).collect();
    match format {
        Format::Table => Ok(aligned(&headers, &cells)),
        Format::Csv => csv_text(&headers, &cells),
        Format::Json => unreachable!("JSON is rendered from the document"),
    }
}

pub fn render_json<T: Serialize>(doc: &Document<T>) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(doc)? + "\n")
}

/// Table and CSV from the records themselves; JSON from the whole document.
pub fn render<T: Tabular + Serialize>(doc: &Document<T>, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => render_json(doc),
        _ => render_rows(&doc.records, format),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> LevelRow {
        LevelRow {
            system: "hydrogen".into(),
            level: "2P3/2".into(),
            z: 1.0,
            e_cf: -0.12500041600468,
            e_d: -0.12500041600468,
            e_s: -0.125,
            rel_err: 0.0,
            flagged: false,
        }
    }

    #[test]
    fn csv_has_fixed_columns_and_ten_decimals() {
        let text = render_rows(&[row()], Format::Csv).unwrap();
        assert_eq!(text, "system,level,E_cf,E_D,E_S,rel_err\nhydrogen,2P3/2,-0.1250004160,-0.1250004160,-0.1250000000,0.000e0\n");
    }

    #[test]
    fn json_round_trips() {
        let doc = Document { command: "table1".into(), records: vec![row()] };
        let text = render(&doc, Format::Json).unwrap();
        let back: Document<LevelRow> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn table_columns_align() {
        let text = render_rows(&[row(), LevelRow { system: "uranium".into(), e_cf: -4861.1483346717, ..row() }], Format::Table)
            .unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].find("2P3/2"), lines[2].find("2P3/2"));
    }
}
