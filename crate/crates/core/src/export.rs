//! CSV and JSONL writers. CSV files start with a `# chatelet-manin v<version>` line.

use std::io::Write;

use serde::Serialize;

use crate::points::{Component, FigureColor, PointRecord};

pub const SCHEMA_HEADER: &str = concat!("# chatelet-manin v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(format!("unknown format '{s}' (expected csv or jsonl)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PointRow {
    pub x: i64,
    pub y: i64,
    pub t: i64,
    pub u: i64,
    pub v: i64,
    pub height: u64,
    pub m1: i64,
    pub m2: i64,
    pub m3: i64,
    pub m4: i64,
    pub degenerate: bool,
    pub color: FigureColor,
    pub component: Component,
}

impl From<&PointRecord> for PointRow {
    fn from(r: &PointRecord) -> Self {
        let p = r.point;
        let m = r.torsor_class.m;
        PointRow {
            x: p.x,
            y: p.y,
            t: p.t,
            u: p.u,
            v: p.v,
            height: p.height,
            m1: m[0],
            m2: m[1],
            m3: m[2],
            m4: m[3],
            degenerate: r.degenerate,
            color: r.figure_color,
            component: r.real_component,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountRow {
    #[serde(rename = "B")]
    pub bound: u64,
    pub nondegenerate: u64,
    pub degenerate: u64,
}

/// Writes rows as CSV (with the schema line) or as one JSON object per line.
pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T], format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut out = out;
            writeln!(out, "{SCHEMA_HEADER}")?;
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(std::io::Error::other)?;
            }
            w.flush()
        }
        Format::Jsonl => {
            let mut out = std::io::BufWriter::new(out);
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}
