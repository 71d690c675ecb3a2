//! Plain tables and their CSV / markdown renderings.

use std::fs;
use std::path::Path;

use breakgauge_core::dist::Stars;
use chrono::NaiveDate;

use crate::config::OutputFormat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Count(usize),
    Date(NaiveDate),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    pub fn stars(s: Stars) -> Cell {
        Cell::Text(s.as_str().into())
    }

    fn render(&self, empty: &str) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => number(*v),
            Cell::Count(n) => n.to_string(),
            Cell::Date(d) => d.format("%Y-%m-%d").to_string(),
            Cell::Empty => empty.into(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Four decimals; infinities as `inf` / `-inf`.
pub fn number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let s = format!("{v:.4}");
        if s == "-0.0000" {
            "0.0000".into()
        } else {
            s
        }
    }
}

/// Markdown cell in the `coef (t)***` style.
pub fn coef_cell(value: f64, t: f64, stars: Stars) -> Cell {
    Cell::Text(format!("{} ({}){}", number(value), number(t), stars))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}", self.title);
        self.rows.push(row);
    }
}

/// One output file's content: CSV blocks are separated by a blank line.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub csv: Vec<Table>,
    pub markdown: Vec<Table>,
}

impl Artifact {
    pub fn same(name: impl Into<String>, tables: Vec<Table>) -> Self {
        Self {
            name: name.into(),
            markdown: tables.clone(),
            csv: tables,
        }
    }

    pub fn row_count(&self) -> usize {
        self.csv.iter().map(|t| t.rows.len()).sum()
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => render_csv(&self.csv),
            OutputFormat::Markdown => render_markdown(&self.markdown),
        }
    }
}

pub fn render_csv(blocks: &[Table]) -> String {
    let rendered: Vec<String> = blocks
        .iter()
        .map(|t| {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            // Writing into a Vec cannot fail.
            w.write_record(&t.header).unwrap();
            for row in &t.rows {
                w.write_record(row.iter().map(|c| c.render(""))).unwrap();
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        })
        .collect();
    rendered.join("\n")
}

pub fn render_markdown(tables: &[Table]) -> String {
    let mut out = String::new();
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("### {}\n\n", t.title));
        let line = |cells: Vec<String>| format!("| {} |\n", cells.join(" | "));
        out.push_str(&line(t.header.iter().map(|h| escape(h)).collect()));
        out.push_str(&line(t.header.iter().map(|_| "---".to_string()).collect()));
        for row in &t.rows {
            out.push_str(&line(row.iter().map(|c| escape(&c.render("-"))).collect()));
        }
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Writes one artifact in one format to `path`.
pub fn emit_table(artifact: &Artifact, format: OutputFormat, path: &Path) -> Result<()> {
    fs::write(path, artifact.render(format)).map_err(Error::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(number(-1.24064), "-1.2406");
        assert_eq!(number(-0.00001), "0.0000");
        assert_eq!(number(f64::INFINITY), "inf");
        assert_eq!(number(f64::NEG_INFINITY), "-inf");
        assert_eq!(coef_cell(-1.24064, -9.87, Stars::One), Cell::Text("-1.2406 (-9.8700)***".into()));
    }

    #[test]
    fn csv_blocks_and_quoting() {
        let mut a = Table::new("a", &["statistic", "value", "stars"]);
        a.push(vec!["UDmax".into(), Cell::Num(12.3456789), Cell::stars(Stars::One)]);
        a.push(vec!["F(2|1)".into(), Cell::Empty, Cell::stars(Stars::None)]);
        let mut b = Table::new("b", &["note"]);
        b.push(vec!["x, y".into()]);
        let s = render_csv(&[a, b]);
        assert_eq!(s, "statistic,value,stars\nUDmax,12.3457,***\nF(2|1),,\n\nnote\n\"x, y\"\n");
    }

    #[test]
    fn markdown_layout() {
        let mut a = Table::new("Panel A", &["x", "y|z"]);
        a.push(vec![Cell::Date(NaiveDate::from_ymd_opt(2008, 9, 12).unwrap()), Cell::Empty]);
        assert_eq!(
            render_markdown(&[a]),
            "### Panel A\n\n| x | y\\|z |\n| --- | --- |\n| 2008-09-12 | - |\n"
        );
    }
}
