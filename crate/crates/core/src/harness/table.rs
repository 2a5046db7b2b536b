use std::fmt::Write;
use std::str::FromStr;

use crate::resonance::Method;

/// One F1/F2 pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub vowel: String,
    pub method: Method,
    pub f1: f64,
    pub f2: f64,
}

/// A method that was requested for a vowel but could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub vowel: String,
    pub method: Method,
    pub message: String,
}

/// Per-vowel, per-method F1/F2 results, plus what went wrong or was skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FormantTable {
    pub rows: Vec<Row>,
    pub failures: Vec<Failure>,
    /// Methods skipped for lack of input (no mesh, no audio).
    pub omissions: Vec<String>,
}

impl FormantTable {
    pub fn get(&self, vowel: &str, method: Method) -> Option<&Row> {
        self.rows
            .iter()
            .find(|r| r.vowel == vowel && r.method == method)
    }

    /// Rows grouped by vowel in first-appearance order, methods in table order.
    pub fn sorted_rows(&self) -> Vec<&Row> {
        let mut vowels: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !vowels.contains(&r.vowel.as_str()) {
                vowels.push(&r.vowel);
            }
        }
        let mut rows: Vec<&Row> = self.rows.iter().collect();
        rows.sort_by_key(|r| (vowels.iter().position(|v| *v == r.vowel), r.method));
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Tsv,
    Pretty,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            "pretty" => Ok(Format::Pretty),
            _ => Err(format!(
                "unknown format '{s}' (expected csv, tsv or pretty)"
            )),
        }
    }
}

const HEADER: [&str; 4] = ["vowel", "method", "F1_Hz", "F2_Hz"];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders the table. Frequencies are printed to 0.1 Hz.
pub fn emit(table: &FormantTable, format: Format) -> String {
    let rows = table.sorted_rows();
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.vowel.clone(),
                r.method.label().to_string(),
                format!("{:.1}", r.f1),
                format!("{:.1}", r.f2),
            ]
        })
        .collect();
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&HEADER.join(","));
            out.push('\n');
            for c in &cells {
                let _ = writeln!(out, "{},{},{},{}", csv_field(&c[0]), c[1], c[2], c[3]);
            }
        }
        Format::Tsv => {
            out.push_str(&HEADER.join("\t"));
            out.push('\n');
            for c in &cells {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    c[0].replace('\t', " "),
                    c[1],
                    c[2],
                    c[3]
                );
            }
        }
        Format::Pretty => {
            let mut width = HEADER.map(|h| h.chars().count());
            for c in &cells {
                for (w, s) in width.iter_mut().zip(c) {
                    *w = (*w).max(s.chars().count());
                }
            }
            let _ = writeln!(
                out,
                "{:<w0$}  {:<w1$}  {:>w2$}  {:>w3$}",
                HEADER[0],
                HEADER[1],
                HEADER[2],
                HEADER[3],
                w0 = width[0],
                w1 = width[1],
                w2 = width[2],
                w3 = width[3]
            );
            for c in &cells {
                let _ = writeln!(
                    out,
                    "{:<w0$}  {:<w1$}  {:>w2$}  {:>w3$}",
                    c[0],
                    c[1],
                    c[2],
                    c[3],
                    w0 = width[0],
                    w1 = width[1],
                    w2 = width[2],
                    w3 = width[3]
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &str, m: Method, f1: f64) -> Row {
        Row {
            vowel: v.into(),
            method: m,
            f1,
            f2: f1 * 3.0,
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(
            emit(&FormantTable::default(), Format::Csv),
            "vowel,method,F1_Hz,F2_Hz\n"
        );
    }

    #[test]
    fn one_row_two_lines() {
        let t = FormantTable {
            rows: vec![row("/a/", Method::WebsterResonance, 500.04)],
            ..Default::default()
        };
        assert_eq!(
            emit(&t, Format::Csv),
            "vowel,method,F1_Hz,F2_Hz\n/a/,W_R,500.0,1500.1\n"
        );
        assert_eq!(emit(&t, Format::Tsv).lines().count(), 2);
        assert_eq!(emit(&t, Format::Pretty).lines().count(), 2);
    }

    #[test]
    fn ordering_and_determinism() {
        let t = FormantTable {
            rows: vec![
                row("/i/", Method::AudioFormant, 300.0),
                row("/a/", Method::WebsterFormant, 700.0),
                row("/i/", Method::HelmholtzResonance, 310.0),
                row("/a/", Method::HelmholtzResonance, 710.0),
            ],
            ..Default::default()
        };
        let csv = emit(&t, Format::Csv);
        let methods: Vec<&str> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(methods, ["H_R", "A_F", "H_R", "W_F"]);
        assert!(csv.lines().nth(1).unwrap().starts_with("/i/,H_R"));
        assert_eq!(csv, emit(&t, Format::Csv));
    }

    #[test]
    fn csv_quotes_awkward_labels() {
        let t = FormantTable {
            rows: vec![row("a,b", Method::WebsterResonance, 1.0)],
            ..Default::default()
        };
        assert!(emit(&t, Format::Csv).contains("\"a,b\",W_R"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("tsv".parse::<Format>(), Ok(Format::Tsv));
        assert!("xml".parse::<Format>().is_err());
    }
}
