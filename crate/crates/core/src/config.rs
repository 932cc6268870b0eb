//! Run configuration files: flat `key = value` lines or a single JSON object.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FileConfig {
    pub a3: Option<i64>,
    pub b3: Option<i64>,
    pub a4: Option<i64>,
    pub b4: Option<i64>,
    pub bound: Option<u64>,
    pub bounds: Option<Vec<u64>>,
    pub lmax: Option<u64>,
    pub bmax: Option<u64>,
    pub p0: Option<u64>,
    pub n_max: Option<u32>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub threads: Option<usize>,
}

impl FileConfig {
    /// Surface coefficients when all four are present.
    pub fn surface(&self) -> Option<(i64, i64, i64, i64)> {
        Some((self.a3?, self.b3?, self.a4?, self.b4?))
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn parse_list(s: &str, line: usize) -> Result<Vec<u64>> {
    s.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| err(line, format!("bad integer '{}': {e}", x.trim()))))
        .collect()
}

fn set(cfg: &mut FileConfig, key: &str, raw: &str, line: usize) -> Result<()> {
    let int = |s: &str| s.parse::<i64>().map_err(|e| err(line, format!("{key}: {e}")));
    let nat = |s: &str| s.parse::<u64>().map_err(|e| err(line, format!("{key}: {e}")));
    match key {
        "a3" => cfg.a3 = Some(int(raw)?),
        "b3" => cfg.b3 = Some(int(raw)?),
        "a4" => cfg.a4 = Some(int(raw)?),
        "b4" => cfg.b4 = Some(int(raw)?),
        "surface" => {
            let v: Vec<i64> = raw.split(',').map(|x| int(x.trim())).collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(err(line, "surface needs four integers a3,b3,a4,b4"));
            }
            (cfg.a3, cfg.b3, cfg.a4, cfg.b4) = (Some(v[0]), Some(v[1]), Some(v[2]), Some(v[3]));
        }
        "bound" => cfg.bound = Some(nat(raw)?),
        "bounds" => cfg.bounds = Some(parse_list(raw, line)?),
        "lmax" => cfg.lmax = Some(nat(raw)?),
        "bmax" => cfg.bmax = Some(nat(raw)?),
        "p0" => cfg.p0 = Some(nat(raw)?),
        "n_max" => cfg.n_max = Some(nat(raw)? as u32),
        "threads" => cfg.threads = Some(nat(raw)? as usize),
        "out" => cfg.out = Some(raw.to_string()),
        "format" => {
            if raw != "csv" && raw != "jsonl" {
                return Err(err(line, format!("format must be csv or jsonl, got '{raw}'")));
            }
            cfg.format = Some(raw.to_string());
        }
        _ => return Err(err(line, format!("unknown key '{key}'"))),
    }
    Ok(())
}

/// Parses either format; JSON is recognised by a leading `{`.
pub fn parse_config(text: &str) -> Result<FileConfig> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_kv(text)
    }
}

fn parse_kv(text: &str) -> Result<FileConfig> {
    let mut cfg = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap().trim();
        if s.is_empty() {
            continue;
        }
        let (k, v) = s.split_once('=').ok_or_else(|| err(line, format!("expected key = value, got '{s}'")))?;
        set(&mut cfg, k.trim(), v.trim().trim_matches('"'), line)?;
    }
    Ok(cfg)
}

/// 1-based line of the first occurrence of `"key"` in the text.
fn line_of(text: &str, key: &str) -> usize {
    let pat = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&pat)).map_or(1, |i| i + 1)
}

fn parse_json(text: &str) -> Result<FileConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| err(1, "expected a JSON object"))?;
    let mut cfg = FileConfig::default();
    for (k, val) in obj {
        let line = line_of(text, k);
        let raw = match val {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            Value::Array(xs) => xs
                .iter()
                .map(|x| x.as_i64().map(|n| n.to_string()).ok_or_else(|| err(line, format!("{k}: expected integers"))))
                .collect::<Result<Vec<_>>>()?
                .join(","),
            _ => return Err(err(line, format!("{k}: unsupported value {val}"))),
        };
        set(&mut cfg, k, &raw, line)?;
    }
    Ok(cfg)
}
