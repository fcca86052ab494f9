//! `uqcpac` command-line interface.
//!
//! Exit status is 0 on success, 1 on parse or domain errors and 2 when a
//! verification or experiment check fails.

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use uqcpac::compiler::{compile_to_ansatz, verify_compilation};
use uqcpac::experiment::{
    erm_path, run_experiment, save_record, summarize_gaps, write_record_csv, CsvOptions, ExperimentConfig,
    ExperimentKind, RecordRows,
};
use uqcpac::io::{parse_params, read_circuit, read_dataset, serialize_params, write_dataset};
use uqcpac::learning::{
    generate_dataset, sample_complexity, train_erm, ConceptClassParams, TrainConfig, DEFAULT_K, DEFAULT_M,
};
use uqcpac::AnsatzShape;

/// Environment variable that overrides `--workers`.
const WORKERS_ENV: &str = "UQCPAC_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "uqcpac", version, about = "Compile circuits into the universal ansatz and run PAC-learning experiments")]
struct Cli {
    /// Worker threads for parallel trials (UQCPAC_WORKERS overrides).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Omit the timestamp line and timings from CSV output.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a circuit into ansatz parameters.
    Compile {
        circuit: PathBuf,
        /// Fixed layer budget; the unused tail is zero-filled.
        #[arg(long)]
        depth: Option<usize>,
        /// Write the parameters here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check compiled parameters against a circuit.
    Verify {
        params: PathBuf,
        circuit: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Generate a labelled dataset from Haar-random inputs.
    GenData {
        circuit: PathBuf,
        #[arg(short = 'm', long = "samples")]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit ansatz parameters to a dataset by empirical risk minimization.
    Train {
        data: PathBuf,
        /// Ansatz shape as `n,depth`.
        #[arg(long, value_parser = parse_shape)]
        shape: (usize, usize),
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        /// Coordinate sweeps per restart.
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[arg(long)]
        seed: u64,
        /// Write the fitted parameters as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the sample-complexity bound.
    Complexity {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: u32,
        #[arg(long = "K", default_value_t = DEFAULT_K)]
        k: f64,
        #[arg(long = "M", default_value_t = DEFAULT_M)]
        m: usize,
    },
    /// Run an experiment from a JSON config.
    Experiment {
        kind: KindArg,
        #[arg(long)]
        config: PathBuf,
        /// CSV output path (overrides the config's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    CompileSweep,
    GenGap,
}

impl From<KindArg> for ExperimentKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::CompileSweep => ExperimentKind::CompileSweep,
            KindArg::GenGap => ExperimentKind::GenGap,
        }
    }
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (n, d) = s.split_once(',').ok_or("expected `n,depth`")?;
    let n = n.trim().parse().map_err(|_| format!("bad qubit count `{n}`"))?;
    let d = d.trim().parse().map_err(|_| format!("bad depth `{d}`"))?;
    Ok((n, d))
}

enum Outcome {
    Success,
    CheckFailed,
}

fn print_text(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    print_text(&serde_json::to_string_pretty(v)?)
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().with_context(|| format!("{WORKERS_ENV}={v} is not a count"))?),
        Err(_) => cli.workers,
    };
    if let Some(w) = workers {
        uqcpac::init_workers(w)?;
    }
    let csv_opts = CsvOptions { timestamp: !cli.no_timestamp };

    match cli.command {
        Command::Compile { circuit, depth, out } => {
            let source = read_circuit(&circuit)?;
            let compiled = compile_to_ansatz(&source, depth)?;
            let text = serialize_params(&compiled);
            match out {
                Some(path) => {
                    write_text(&path, &text)?;
                    print_json(&json!({
                        "n": compiled.shape.n(),
                        "depth": compiled.shape.depth(),
                        "layers_used": compiled.layers_used,
                        "normalized_len": compiled.normalized_len,
                        "global_phase": compiled.global_phase,
                        "out": path,
                    }))?;
                }
                None => print_text(&text)?,
            }
            Ok(Outcome::Success)
        }
        Command::Verify { params, circuit, tol } => {
            let text = fs::read_to_string(&params).with_context(|| format!("reading {}", params.display()))?;
            let compiled = parse_params(&text)?;
            let source = read_circuit(&circuit)?;
            let v = verify_compilation(&compiled, &source, tol)?;
            print_json(&json!({
                "ok": v.ok,
                "residual": v.residual,
                "phase": v.phase,
                "recorded_phase": compiled.global_phase,
                "phase_error": v.phase_error,
                "tol": tol,
            }))?;
            Ok(if v.ok { Outcome::Success } else { Outcome::CheckFailed })
        }
        Command::GenData { circuit, m, seed, out } => {
            let target = read_circuit(&circuit)?;
            let data = generate_dataset(&target, m, seed)?;
            let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_dataset(BufWriter::new(file), &data)?;
            print_json(&json!({ "n": data.n(), "m": data.len(), "seed": seed, "out": out }))?;
            Ok(Outcome::Success)
        }
        Command::Train { data, shape, restarts, iters, seed, out } => {
            let file = fs::File::open(&data).with_context(|| format!("opening {}", data.display()))?;
            let dataset = read_dataset(BufReader::new(file))?;
            let shape = AnsatzShape::new(shape.0, shape.1)?;
            let config = TrainConfig { sweeps: iters, restarts, seed, ..TrainConfig::default() };
            let result = train_erm(&shape, &dataset, &config)?;
            let summary = json!({
                "n": shape.n(),
                "depth": shape.depth(),
                "empirical_risk": result.risk,
                "restart": result.restart,
                "improving_steps": result.improving_steps,
                "history": result.history,
                "theta": result.theta.values(),
            });
            if let Some(path) = out {
                write_text(&path, &serde_json::to_string_pretty(&summary)?)?;
            }
            print_json(&summary)?;
            Ok(Outcome::Success)
        }
        Command::Complexity { eps, delta, n, c, k, m } => {
            let params = ConceptClassParams::new(n, c, k, m)?;
            let r = sample_complexity(eps, delta, &params)?;
            print_json(&json!({
                "eps": r.eps,
                "delta": r.delta,
                "n": n, "c": c, "K": k, "M": m,
                "e": r.e,
                "N": r.n_cells,
                "l": r.param_count,
                "ln_hypothesis_count": r.ln_hypothesis_count,
                "ln_nu": r.ln_nu,
                "nu": r.nu,
                "nu_saturated": r.nu == u64::MAX,
            }))?;
            Ok(Outcome::Success)
        }
        Command::Experiment { kind, config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::parse(&text, Some(kind.into()))?;
            let record = run_experiment(&cfg)?;
            let output = out.or_else(|| cfg.output.clone());
            match &output {
                Some(path) => save_record(path, &record, csv_opts)?,
                None => write_record_csv(std::io::stdout().lock(), &record, csv_opts)?,
            }
            let mut summary = json!({
                "kind": cfg.kind.name(),
                "failures": record.failures,
                "passed": record.passed(),
            });
            if let Some(path) = &output {
                summary["out"] = json!(path);
                if !record.erm_checks.is_empty() {
                    summary["erm_out"] = json!(erm_path(path));
                }
            }
            match &record.rows {
                RecordRows::Compile(rows) => {
                    summary["trials"] = json!(rows.len());
                    summary["worst_residual"] = json!(rows.iter().map(|r| r.residual).fold(0.0, f64::max));
                }
                RecordRows::Gap(rows) => {
                    let s: Vec<_> = summarize_gaps(rows, "random")
                        .iter()
                        .map(|g| json!({ "n": g.n, "m": g.m, "mean_gap": g.mean, "std_error": g.std_error }))
                        .collect();
                    summary["random_hypothesis_gaps"] = json!(s);
                    summary["erm_checks"] = json!(record.erm_checks.len());
                }
            }
            if output.is_some() {
                print_json(&summary)?;
            } else {
                eprintln!("{}", serde_json::to_string(&summary)?);
            }
            Ok(if record.passed() { Outcome::Success } else { Outcome::CheckFailed })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
