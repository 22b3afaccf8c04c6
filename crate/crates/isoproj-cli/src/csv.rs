//! CSV output: UTF-8, comma-separated, header row, LF line endings. Floats
//! are written with 17 significant digits so identical runs produce
//! byte-identical files that round-trip exactly.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    UInt(u64),
    Int(i64),
    Float(f64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::UInt(v as u64)
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_field(line: &mut String, field: &Field) {
    match field {
        Field::UInt(v) => write!(line, "{v}").unwrap(),
        Field::Int(v) => write!(line, "{v}").unwrap(),
        Field::Float(v) => write!(line, "{}", format_float(*v)).unwrap(),
        Field::Text(v) => write!(line, "{v}").unwrap(),
        Field::Flag(v) => write!(line, "{}", if *v { 1 } else { 0 }).unwrap(),
    }
}

pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> std::io::Result<Self> {
        let file = File::create(path)?;
        let mut writer = Self {
            out: BufWriter::new(file),
        };
        writer.out.write_all(header.join(",").as_bytes())?;
        writer.out.write_all(b"\n")?;
        Ok(writer)
    }

    pub fn row(&mut self, fields: &[Field]) -> std::io::Result<()> {
        let mut line = String::new();
        for (i, field) in fields.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            write_field(&mut line, field);
        }
        line.push('\n');
        self.out.write_all(line.as_bytes())
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}
