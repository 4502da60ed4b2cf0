//! `pathological` runs the constructions and verification suites and writes CSV.

mod commands;
mod config;
mod experiment;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;

use config::{RunConfig, Sweep, SCHEMA};
use experiment::{experiment_registry, write_table, Failure, Outcome};

const EXIT_INVALID: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "pathological", version, about = "Pathological examples: multi-bump functions, derivative-loss wave modes, rescaled transport")]
struct Cli {
    /// bump, wave, transport, exercise, or `keys` to list the configuration keys
    command: String,

    /// Configuration file of `section.key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output path, or `-` for standard output (default: a per-command file name)
    #[arg(long)]
    csv: Option<String>,

    /// Run once per integer value, `key=a..b`; rows are concatenated in order
    #[arg(long)]
    sweep: Option<String>,

    /// Integrator tolerance (sets wave.tol)
    #[arg(long)]
    tol: Option<f64>,

    /// Seed for randomized checks (sets run.seed)
    #[arg(long)]
    seed: Option<u64>,

    /// Override one key, `key=value`; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_text(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set `{kv}` is not key=value"))?;
        cfg.set(k.trim(), v).map_err(|e| e.0)?;
    }
    if let Some(t) = cli.tol {
        cfg.set("wave.tol", &format!("{t:e}")).map_err(|e| e.0)?;
    }
    if let Some(s) = cli.seed {
        cfg.set("run.seed", &s.to_string()).map_err(|e| e.0)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.command == "keys" {
        for k in SCHEMA {
            println!("{:<28} {:<22} {}", k.key, if k.default.is_empty() { "(unset)" } else { k.default }, k.doc);
        }
        return ExitCode::SUCCESS;
    }
    let registry = experiment_registry();
    let exp = match registry.create(&cli.command) {
        Ok(e) => e,
        Err(e) => return fail(EXIT_INVALID, &e.to_string()),
    };
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INVALID, &e),
    };

    // One configuration per sweep value.
    let mut sweep_key = None;
    let runs: Vec<(Option<i64>, RunConfig)> = match &cli.sweep {
        None => vec![(None, cfg.clone())],
        Some(spec) => {
            let parsed = spec.parse::<Sweep>().and_then(|s| cfg.resolve(exp.section(), &s.key).map(|k| (s, k)));
            let (sweep, key) = match parsed {
                Ok(v) => v,
                Err(e) => return fail(EXIT_INVALID, &e.0),
            };
            sweep_key = Some((key, sweep.lo, sweep.hi));
            let mut v = Vec::new();
            for x in sweep.lo..=sweep.hi {
                let mut c = cfg.clone();
                if let Err(e) = c.set(key, &x.to_string()) {
                    return fail(EXIT_INVALID, &e.0);
                }
                v.push((Some(x), c));
            }
            v
        }
    };
    let results: Vec<Result<Outcome, Failure>> = runs.par_iter().map(|(_, c)| exp.run(c)).collect();

    let mut merged = Outcome::default();
    for ((x, _), res) in runs.iter().zip(results) {
        let o = match res {
            Ok(o) => o,
            Err(Failure::Invalid(m)) => return fail(EXIT_INVALID, &m),
            Err(Failure::Numerical(m)) => return fail(EXIT_NUMERIC, &m),
        };
        if merged.columns.is_empty() {
            merged.columns = o.columns.clone();
            if let Some((key, _, _)) = sweep_key {
                merged.columns.insert(0, (key.to_string(), "sweep value".into()));
            }
        }
        for mut r in o.rows {
            if let Some(x) = x {
                r.insert(0, x.to_string());
            }
            merged.rows.push(r);
        }
        let tag = x.map(|x| format!(" [{}={x}]", sweep_key.unwrap().0)).unwrap_or_default();
        merged.checks.extend(o.checks.into_iter().map(|mut c| {
            c.name.push_str(&tag);
            c
        }));
        merged.notes.extend(o.notes.into_iter().map(|n| format!("{n}{tag}")));
    }

    let mut header = vec![
        format!("pathological {}", env!("CARGO_PKG_VERSION")),
        format!("command: {}", exp.name()),
    ];
    if let Some((key, lo, hi)) = sweep_key {
        header.push(format!("sweep: {key} = {lo}..{hi}"));
    }
    header.extend(cfg.echo(exp.section()).into_iter().map(|(k, v)| format!("config {k} = {v}")));

    let target = cli.csv.clone().unwrap_or_else(|| exp.default_csv().to_string());
    let written = if target == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        write_table(&mut lock, &header, &merged.columns, &merged.rows).and_then(|_| lock.flush())
    } else {
        File::create(&target).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_table(&mut w, &header, &merged.columns, &merged.rows)?;
            w.flush()
        })
    };
    if let Err(e) = written {
        return fail(EXIT_INVALID, &format!("cannot write {target}: {e}"));
    }

    for n in &merged.notes {
        eprintln!("note: {n}");
    }
    for c in &merged.checks {
        eprintln!("{} {}: {}", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    match merged.first_failure() {
        Some(c) => fail(EXIT_VERIFY, &format!("verification failed: {} ({})", c.name, c.detail)),
        None => ExitCode::SUCCESS,
    }
}
