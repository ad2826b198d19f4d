//! Deterministic output emission: CSV, JSON and simple SVG plots, all
//! written atomically (write to a temp file in the same directory, then
//! rename).
//!
//! CSV dialect: comma separators, `.` decimal point, scientific notation
//! with 17 significant digits, a header row, LF line endings. Fit summaries
//! are appended as a `#`-prefixed footer block. JSON is UTF-8 with the key
//! order fixed by the report structs.

use std::io::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::grid::PeriodicField;

/// 17 significant digits, scientific; enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Assembles a CSV document from a header, float rows and a footer of
/// `# key = value` comment lines.
pub struct CsvDocument {
    buffer: String,
}

impl CsvDocument {
    pub fn new(header: &[&str]) -> Self {
        let mut buffer = String::new();
        buffer.push_str(&header.join(","));
        buffer.push('\n');
        CsvDocument { buffer }
    }

    pub fn row(&mut self, values: &[f64]) {
        let mut first = true;
        for &v in values {
            if !first {
                self.buffer.push(',');
            }
            self.buffer.push_str(&fmt_float(v));
            first = false;
        }
        self.buffer.push('\n');
    }

    /// A row with a leading integer index column.
    pub fn indexed_row(&mut self, index: usize, values: &[f64]) {
        self.buffer.push_str(&index.to_string());
        for &v in values {
            self.buffer.push(',');
            self.buffer.push_str(&fmt_float(v));
        }
        self.buffer.push('\n');
    }

    pub fn footer(&mut self, key: &str, value: f64) {
        self.buffer.push_str("# ");
        self.buffer.push_str(key);
        self.buffer.push_str(" = ");
        self.buffer.push_str(&fmt_float(value));
        self.buffer.push('\n');
    }

    pub fn footer_text(&mut self, key: &str, value: &str) {
        self.buffer.push_str("# ");
        self.buffer.push_str(key);
        self.buffer.push_str(" = ");
        self.buffer.push_str(value);
        self.buffer.push('\n');
    }

    pub fn finish(self) -> String {
        self.buffer
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report structs serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// A waterfall plot of `v(x, t)`: one polyline per saved time, offset
/// vertically, earliest at the bottom.
pub fn svg_waterfall(times: &[f64], fields: &[PeriodicField]) -> String {
    assert_eq!(times.len(), fields.len());
    let width = 900.0;
    let height = 600.0;
    let margin = 40.0;
    let rows = fields.len().max(1) as f64;
    let mut amplitude = 0.0f64;
    for f in fields {
        amplitude = amplitude.max(f.max_abs());
    }
    if amplitude == 0.0 {
        amplitude = 1.0;
    }
    let row_gap = (height - 2.0 * margin) / rows;
    let wave_scale = row_gap * 0.9 / (2.0 * amplitude);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (row, (t, field)) in times.iter().zip(fields).enumerate() {
        let base = height - margin - row_gap * row as f64;
        let n = field.n();
        let mut points = String::new();
        for (j, &v) in field.values().iter().enumerate() {
            let x = margin + (width - 2.0 * margin) * j as f64 / (n - 1) as f64;
            let y = base - v * wave_scale;
            points.push_str(&format!("{x:.2},{y:.2} "));
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1\" points=\"{}\"/>\n",
            points.trim_end()
        ));
        svg.push_str(&format!(
            "<text x=\"4\" y=\"{base:.2}\" font-size=\"10\" fill=\"#555\">t={t:.4}</text>\n"
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
