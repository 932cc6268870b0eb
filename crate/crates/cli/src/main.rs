use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chatelet_core::config::{parse_config, FileConfig};
use chatelet_core::densities::{assemble_constant, assemble_constant_euler, fit_empirical, DEFAULT_BMAX, DEFAULT_LMAX, DEFAULT_P0};
use chatelet_core::export::{write_rows, CountRow, Format, PointRow};
use chatelet_core::points::{count_table, enumerate_points};
use chatelet_core::sums::moebius_count;
use chatelet_core::{validate, SurfaceSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Rational points of bounded height on split Chatelet surfaces.
#[derive(Parser, Debug)]
#[command(name = "chatelet-manin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Coefficients a3,b3,a4,b4 of L3 = a3 U + b3 V and L4 = a4 U + b4 V
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    surface: Option<Vec<i64>>,
    /// Height bound
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Comma-separated list of height bounds
    #[arg(long, global = true, value_delimiter = ',')]
    bounds: Option<Vec<u64>>,
    /// Largest odd squarefree l in the truncated constant
    #[arg(long, global = true)]
    lmax: Option<u64>,
    /// Largest ideal norm N(b_j) in the truncated constant
    #[arg(long, global = true)]
    bmax: Option<u64>,
    /// Prime cutoff for Euler products
    #[arg(long, global = true)]
    p0: Option<u64>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_parser = ["csv", "jsonl"])]
    format: Option<String>,
    /// Worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Configuration file (key = value lines or a JSON object); overrides flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of B, nondegenerate and degenerate counts
    Count,
    /// Every point of height <= B with class, colour and real component
    Points,
    /// Compare the Moebius-decomposed count with the direct count
    Crosscheck,
    /// Leading constant as JSON
    Constant {
        #[arg(long, value_enum, default_value_t = ConstantMethod::Truncated)]
        method: ConstantMethod,
    },
    /// Counts against c f(B)
    Fit {
        #[arg(long, value_enum, default_value_t = ConstantMethod::Euler)]
        method: ConstantMethod,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ConstantMethod {
    /// Sum over l <= lmax and N(b_j) <= bmax
    Truncated,
    /// Euler product over primes <= p0, no truncation in l or b
    Euler,
}

struct RunConfig {
    spec: SurfaceSpec,
    bound: Option<u64>,
    bounds: Option<Vec<u64>>,
    lmax: u64,
    bmax: u64,
    p0: u64,
    out: Option<PathBuf>,
    format: Format,
}

fn resolve(opts: Opts) -> Result<RunConfig> {
    let file = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let surface = match (file.surface(), &opts.surface) {
        (Some(s), _) => s,
        (None, Some(v)) if v.len() == 4 => (v[0], v[1], v[2], v[3]),
        (None, Some(v)) => bail!("--surface needs four integers a3,b3,a4,b4, got {}", v.len()),
        (None, None) => (1, 1, 1, -1),
    };
    let spec = validate(surface.0, surface.1, surface.2, surface.3)?;
    let format: Format = file
        .format
        .or(opts.format)
        .as_deref()
        .unwrap_or("csv")
        .parse()
        .map_err(anyhow::Error::msg)?;
    let threads = file.threads.or(opts.threads);
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let cfg = RunConfig {
        spec,
        bound: file.bound.or(opts.bound),
        bounds: file.bounds.or(opts.bounds),
        lmax: file.lmax.or(opts.lmax).unwrap_or(DEFAULT_LMAX),
        bmax: file.bmax.or(opts.bmax).unwrap_or(DEFAULT_BMAX),
        p0: file.p0.or(opts.p0).unwrap_or(DEFAULT_P0),
        out: file.out.map(PathBuf::from).or(opts.out),
        format,
    };
    for (name, v) in [("lmax", cfg.lmax), ("bmax", cfg.bmax), ("p0", cfg.p0)] {
        if v == 0 {
            bail!("{name} must be positive");
        }
    }
    if cfg.bound == Some(0) || cfg.bounds.as_ref().is_some_and(|b| b.contains(&0)) {
        bail!("bounds must be at least 1");
    }
    Ok(cfg)
}

impl RunConfig {
    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn bound_list(&self, default: Option<&[u64]>) -> Result<Vec<u64>> {
        if let Some(b) = &self.bounds {
            return Ok(b.clone());
        }
        if let Some(b) = self.bound {
            return Ok(vec![b]);
        }
        match default {
            Some(d) => Ok(d.to_vec()),
            None => bail!("no bound given (use --bound or --bounds)"),
        }
    }

    fn emit<T: Serialize>(&self, rows: &[T]) -> Result<()> {
        write_rows(self.sink()?, rows, self.format)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct CrosscheckRow {
    #[serde(rename = "B")]
    bound: u64,
    direct: u64,
    moebius: u64,
    equal: bool,
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = resolve(cli.opts)?;
    let spec = &cfg.spec;
    match cli.command {
        Command::Count => {
            let bounds = cfg.bound_list(None)?;
            let rows: Vec<CountRow> = bounds
                .iter()
                .zip(count_table(spec, &bounds))
                .map(|(&b, (n, d))| CountRow { bound: b, nondegenerate: n, degenerate: d })
                .collect();
            cfg.emit(&rows)?;
        }
        Command::Points => {
            let Some(b) = cfg.bound else { bail!("points needs --bound") };
            let rows: Vec<PointRow> = enumerate_points(spec, b).iter().map(PointRow::from).collect();
            cfg.emit(&rows)?;
        }
        Command::Crosscheck => {
            let bounds = match (&cfg.bounds, cfg.bound) {
                (Some(b), _) => b.clone(),
                (None, Some(b)) => (1..=b).collect(),
                (None, None) => bail!("crosscheck needs --bound or --bounds"),
            };
            let direct = count_table(spec, &bounds);
            let mut rows = Vec::with_capacity(bounds.len());
            for (&b, (n, _)) in bounds.iter().zip(direct) {
                let m = moebius_count(spec, b)?;
                rows.push(CrosscheckRow { bound: b, direct: n, moebius: m, equal: n == m });
            }
            let ok = rows.iter().filter(|r| r.equal).count();
            if cfg.out.is_some() {
                cfg.emit(&rows)?;
            }
            for r in rows.iter().filter(|r| !r.equal) {
                eprintln!("mismatch at B={}: direct {}, moebius {}", r.bound, r.direct, r.moebius);
            }
            let status = if ok == rows.len() { "OK" } else { "FAIL" };
            println!("{status}: {ok}/{} values equal", rows.len());
            if ok != rows.len() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Constant { method } => {
            let report = match method {
                ConstantMethod::Truncated => assemble_constant(spec, cfg.lmax, cfg.bmax, cfg.p0)?,
                ConstantMethod::Euler => assemble_constant_euler(spec, cfg.p0)?,
            };
            let mut w = cfg.sink()?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
        }
        Command::Fit { method } => {
            let bounds = cfg.bound_list(Some(&[10_000, 100_000, 1_000_000]))?;
            let c = match method {
                ConstantMethod::Truncated => assemble_constant(spec, cfg.lmax, cfg.bmax, cfg.p0)?.c,
                ConstantMethod::Euler => assemble_constant_euler(spec, cfg.p0)?.c,
            };
            cfg.emit(&fit_empirical(spec, &bounds, c))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
