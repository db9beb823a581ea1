//! Config-driven runner behind the `ple` binary.
//!
//! A run reads one TOML file, executes a single command (or a grid of them)
//! and writes CSV tables, a `result.json` with metadata, and a `run.log`
//! into the output directory. All files are written atomically.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use ple_core::Exec;
use serde_json::{json, Value};
use thiserror::Error;

use commands::Artifacts;
use config::{CommandKind, RunConfig};
use output::{write_atomic, Cell, Csv};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "PLE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] ple_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code()}})
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `out` from the config.
    pub out: Option<PathBuf>,
    /// Overrides `seed` from the config.
    pub seed: Option<u64>,
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

/// Thread count from `--threads`, then the environment, then the machine.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return if n > 0 { Ok(n) } else { Err(CliError::Config("--threads must be positive".into())) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn execute(cfg: &RunConfig, kind: CommandKind, seed: u64, exec: Exec) -> Result<Artifacts, CliError> {
    let block = || CliError::Config(format!("missing table [{}]", kind.name()));
    match kind {
        CommandKind::Interaction => commands::interaction(cfg.interaction.as_ref().ok_or_else(block)?),
        CommandKind::Boundstate => commands::boundstate(cfg.boundstate.as_ref().ok_or_else(block)?),
        CommandKind::Disorder => commands::disorder(cfg.disorder.as_ref().ok_or_else(block)?, seed, exec),
        CommandKind::Ising => commands::ising(cfg.ising.as_ref().ok_or_else(block)?, seed, exec),
        CommandKind::Spinwave => commands::spinwave(cfg.spinwave.as_ref().ok_or_else(block)?),
        CommandKind::Ed => commands::ed(cfg.ed.as_ref().ok_or_else(block)?),
        CommandKind::Dmrg => commands::dmrg_run(cfg.dmrg.as_ref().ok_or_else(block)?),
        CommandKind::Circuit => commands::circuit(cfg.circuit.as_ref().ok_or_else(block)?),
        CommandKind::Sweep => Err(CliError::Config("nested sweep".into())),
    }
}

fn write_tables(dir: &Path, a: &Artifacts, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    for (stem, csv) in &a.tables {
        let p = dir.join(format!("{stem}.csv"));
        write_atomic(&p, csv.render().as_bytes())?;
        files.push(p);
    }
    Ok(())
}

fn metadata(cfg: &RunConfig, seed: u64, wall: f64) -> Value {
    json!({
        "config": cfg,
        "seed": seed,
        "versions": {"ple-core": ple_core::VERSION, "ple-cli": env!("CARGO_PKG_VERSION")},
        "wall_time_s": wall,
    })
}

fn write_json(path: &Path, v: &Value, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())?;
    files.push(path.to_path_buf());
    Ok(())
}

/// Execute a parsed configuration and write its artifacts.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| CliError::Config("no output directory: set `out` or pass --out".into()))?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    let mut cfg = cfg.clone();
    cfg.seed = seed;
    cfg.out = Some(out.clone());
    std::fs::create_dir_all(&out)?;
    let start = Instant::now();
    let mut files = Vec::new();
    let mut log = vec![format!("command = {}", cfg.command.name()), format!("seed = {seed}")];
    let warnings = if cfg.command == CommandKind::Sweep {
        run_sweep(&cfg, seed, &out, &mut files, &mut log)?
    } else {
        let a = execute(&cfg, cfg.command, seed, Exec::Parallel)?;
        write_tables(&out, &a, &mut files)?;
        let mut meta = metadata(&cfg, seed, start.elapsed().as_secs_f64());
        meta["result"] = a.result.clone();
        meta["warnings"] = json!(a.warnings);
        write_json(&out.join("result.json"), &meta, &mut files)?;
        a.warnings
    };
    for w in &warnings {
        log.push(format!("warning: {w}"));
        if !opts.quiet {
            eprintln!("warning: {w}");
        }
    }
    for f in &files {
        log.push(format!("wrote {}", f.display()));
    }
    log.push(format!("wall time {:.3} s", start.elapsed().as_secs_f64()));
    let log_path = out.join("run.log");
    write_atomic(&log_path, (log.join("\n") + "\n").as_bytes())?;
    files.push(log_path);
    Ok(RunSummary { out, files, warnings })
}

/// Grid points as `(index, [(name, value)])`, first axis slowest.
pub fn sweep_points(params: &[config::SweepParam]) -> Vec<Vec<(String, toml::Value)>> {
    let mut points: Vec<Vec<(String, toml::Value)>> = vec![Vec::new()];
    for p in params {
        let mut next = Vec::with_capacity(points.len() * p.values.len());
        for pt in &points {
            for v in &p.values {
                let mut q = pt.clone();
                q.push((p.name.clone(), v.clone()));
                next.push(q);
            }
        }
        points = next;
    }
    points
}

fn set_path(root: &mut toml::Value, path: &str, v: toml::Value) -> Result<(), CliError> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = cur
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("sweep parameter `{path}`: `{part}` is not inside a table")))?;
        if i + 1 == parts.len() {
            table.insert(part.to_string(), v);
            return Ok(());
        }
        cur = table
            .get_mut(*part)
            .ok_or_else(|| CliError::Config(format!("sweep parameter `{path}`: no key `{part}`")))?;
    }
    unreachable!("path has at least one component")
}

fn point_config(cfg: &RunConfig, base: CommandKind, point: &[(String, toml::Value)]) -> Result<RunConfig, CliError> {
    let mut root = toml::Value::try_from(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let tbl = root.as_table_mut().expect("config serializes to a table");
    tbl.remove("sweep");
    tbl.insert("command".into(), toml::Value::String(base.name().into()));
    let block = tbl
        .get_mut(base.name())
        .ok_or_else(|| CliError::Config(format!("missing table [{}]", base.name())))?;
    for (name, v) in point {
        set_path(block, name, v.clone())?;
    }
    let text = toml::to_string(&root).map_err(|e| CliError::Config(e.to_string()))?;
    RunConfig::parse(&text)
}

fn toml_cell(v: &toml::Value) -> Cell {
    match v {
        toml::Value::Integer(i) => Cell::Int(*i),
        toml::Value::Float(f) => Cell::Float(*f),
        other => Cell::Text(other.to_string()),
    }
}

fn run_sweep(cfg: &RunConfig, seed: u64, out: &Path, files: &mut Vec<PathBuf>, log: &mut Vec<String>) -> Result<Vec<String>, CliError> {
    let sw = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("missing table [sweep]".into()))?;
    let points = sweep_points(&sw.param);
    let configs: Vec<RunConfig> = points.iter().map(|p| point_config(cfg, sw.base, p)).collect::<Result<_, _>>()?;
    log.push(format!("sweep over {} points of `{}`", points.len(), sw.base.name()));
    // points run in parallel, each one sequentially inside
    let results: Vec<Result<Artifacts, CliError>> = Exec::Parallel.map(configs.len(), |i| execute(&configs[i], sw.base, seed, Exec::Sequential));
    let mut rows: Vec<(usize, Artifacts)> = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        let a = r?;
        let dir = out.join("points").join(format!("{i:04}"));
        write_tables(&dir, &a, files)?;
        let mut meta = metadata(&configs[i], seed, 0.0);
        meta["result"] = a.result.clone();
        meta["warnings"] = json!(a.warnings);
        write_json(&dir.join("result.json"), &meta, files)?;
        rows.push((i, a));
    }
    let names: Vec<String> = sw.param.iter().map(|p| p.name.clone()).collect();
    let metrics: Vec<String> = rows.first().map(|r| r.1.scalars.iter().map(|s| s.0.clone()).collect()).unwrap_or_default();
    let mut header: Vec<&str> = vec!["point"];
    header.extend(names.iter().map(String::as_str));
    header.extend(metrics.iter().map(String::as_str));
    let mut csv = Csv::new(&header);
    let mut warnings = Vec::new();
    for (i, a) in &rows {
        let mut row: Vec<Cell> = vec![(*i).into()];
        row.extend(points[*i].iter().map(|(_, v)| toml_cell(v)));
        row.extend(metrics.iter().map(|m| Cell::Float(a.scalars.iter().find(|s| &s.0 == m).map_or(f64::NAN, |s| s.1))));
        csv.push(row);
        warnings.extend(a.warnings.iter().map(|w| format!("point {i}: {w}")));
    }
    let p = out.join("sweep.csv");
    write_atomic(&p, csv.render().as_bytes())?;
    files.push(p);
    let sidecar = json!({
        "config": cfg,
        "seed": seed,
        "columns": header,
        "points": points.len(),
        "versions": {"ple-core": ple_core::VERSION, "ple-cli": env!("CARGO_PKG_VERSION")},
    });
    write_json(&out.join("sweep.json"), &sidecar, files)?;
    Ok(warnings)
}
