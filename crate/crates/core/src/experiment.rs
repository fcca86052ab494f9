//! Experiment drivers with seeded, schedule-independent trials and CSV output.
//!
//! Two experiments are provided:
//!
//! * `compile-sweep` draws random concept circuits, compiles each into the
//!   ansatz and verifies the result against the dense unitary.
//! * `gen-gap` measures `|R̂ − R|` for the compiled hypothesis, random
//!   hypotheses, optional grid and trained hypotheses across a schedule of
//!   training-set sizes. With a finite state pool as `P`, `R` is exact and
//!   the ERM gap inequality is checked for every draw.
//!
//! Each trial derives its RNG stream from `(seed, n, trial[, m])`, so rows
//! do not depend on how many workers run them. Rows are sorted before they
//! are written.

use crate::ansatz::{build_ansatz, AnsatzShape, ParamVector};
use crate::circuit::Circuit;
use crate::compiler::{compile_to_ansatz, verify_compilation};
use crate::concept::random_concept_circuit_capped;
use crate::error::{Error, Result};
use crate::learning::{
    circuit_risk, erm_gap_check, estimate_risk_from, generate_dataset_from, pool_risk, random_params,
    sample_complexity, train_erm, ComplexityReport, ConceptClassParams, Dataset, InputDistribution, TrainConfig,
};
use crate::rng::derive_seed;
use crate::sim::DENSE_CAP;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CompileSweep,
    GenGap,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CompileSweep => "compile-sweep",
            ExperimentKind::GenGap => "gen-gap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    Haar,
    Pool,
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: Vec<usize>,
    pub c: u32,
    pub k: f64,
    pub m_const: usize,
    pub eps: f64,
    pub delta: f64,
    pub m_schedule: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_gates: usize,
    /// Layer count of the random, grid and trained hypotheses.
    pub depth: usize,
    pub random_hypotheses: usize,
    /// Fresh inputs per hypothesis when `R` is estimated under Haar `P`.
    pub n_eval: usize,
    pub distribution: DistributionKind,
    pub pool_size: usize,
    /// Points per axis of a two-angle hypothesis grid; 0 disables it.
    pub grid_points: usize,
    pub train: bool,
    pub train_sweeps: usize,
    pub output: Option<PathBuf>,
}

/// Config file contents; absent fields take per-kind defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfigFile {
    pub kind: Option<ExperimentKind>,
    pub n: Option<Vec<usize>>,
    pub c: Option<u32>,
    pub k: Option<f64>,
    pub m_const: Option<usize>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub m_schedule: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_gates: Option<usize>,
    pub depth: Option<usize>,
    pub random_hypotheses: Option<usize>,
    pub n_eval: Option<usize>,
    pub distribution: Option<DistributionKind>,
    pub pool_size: Option<usize>,
    pub grid_points: Option<usize>,
    pub train: Option<bool>,
    pub train_sweeps: Option<usize>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let (n, c, trials) = match kind {
            ExperimentKind::CompileSweep => (vec![2, 3, 4, 5], 2, 200),
            ExperimentKind::GenGap => (vec![2], 1, 50),
        };
        ExperimentConfig {
            kind,
            n,
            c,
            k: crate::learning::DEFAULT_K,
            m_const: crate::learning::DEFAULT_M,
            eps: 0.1,
            delta: 0.01,
            m_schedule: vec![8, 32, 128, 512],
            trials,
            seed: 1,
            tol: 1e-9,
            max_gates: 12,
            depth: 1,
            random_hypotheses: 4,
            n_eval: 4000,
            distribution: DistributionKind::Haar,
            pool_size: 50,
            grid_points: 0,
            train: false,
            train_sweeps: 5,
            output: None,
        }
    }

    /// Overlay a config file on the defaults for its kind.
    pub fn from_file(file: ExperimentConfigFile, kind_override: Option<ExperimentKind>) -> Result<Self> {
        let kind = kind_override
            .or(file.kind)
            .ok_or_else(|| Error::parse("kind", "experiment kind missing"))?;
        if let (Some(a), Some(b)) = (kind_override, file.kind) {
            if a != b {
                return Err(Error::parse("kind", format!("config is for {}, not {}", b.name(), a.name())));
            }
        }
        let d = Self::defaults(kind);
        let cfg = ExperimentConfig {
            kind,
            n: file.n.unwrap_or(d.n),
            c: file.c.unwrap_or(d.c),
            k: file.k.unwrap_or(d.k),
            m_const: file.m_const.unwrap_or(d.m_const),
            eps: file.eps.unwrap_or(d.eps),
            delta: file.delta.unwrap_or(d.delta),
            m_schedule: file.m_schedule.unwrap_or(d.m_schedule),
            trials: file.trials.unwrap_or(d.trials),
            seed: file.seed.unwrap_or(d.seed),
            tol: file.tol.unwrap_or(d.tol),
            max_gates: file.max_gates.unwrap_or(d.max_gates),
            depth: file.depth.unwrap_or(d.depth),
            random_hypotheses: file.random_hypotheses.unwrap_or(d.random_hypotheses),
            n_eval: file.n_eval.unwrap_or(d.n_eval),
            distribution: file.distribution.unwrap_or(d.distribution),
            pool_size: file.pool_size.unwrap_or(d.pool_size),
            grid_points: file.grid_points.unwrap_or(d.grid_points),
            train: file.train.unwrap_or(d.train),
            train_sweeps: file.train_sweeps.unwrap_or(d.train_sweeps),
            output: file.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str, kind_override: Option<ExperimentKind>) -> Result<Self> {
        let file: ExperimentConfigFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
        Self::from_file(file, kind_override)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::parse(field, msg));
        if self.n.is_empty() || self.n.iter().any(|&n| !(2..=DENSE_CAP).contains(&n)) {
            return bad("n", "qubit counts must lie in 2..=10");
        }
        if self.c < 1 {
            return bad("c", "must be at least 1");
        }
        if self.k.is_nan() || self.k < 1.0 || self.m_const < 1 {
            return bad("k/m_const", "K and M must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("eps/delta", "must lie in (0, 1)");
        }
        if self.m_schedule.is_empty() || self.m_schedule[0] == 0 || self.m_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return bad("m_schedule", "must be non-empty, positive and strictly increasing");
        }
        if self.trials == 0 {
            return bad("trials", "must be positive");
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad("tol", "must be positive");
        }
        if self.max_gates == 0 || self.depth == 0 {
            return bad("max_gates/depth", "must be positive");
        }
        if self.n_eval < 2 {
            return bad("n_eval", "must be at least 2");
        }
        if self.pool_size == 0 {
            return bad("pool_size", "must be positive");
        }
        if self.grid_points == 1 {
            return bad("grid_points", "use 0 to disable or at least 2");
        }
        if self.train && self.train_sweeps == 0 {
            return bad("train_sweeps", "must be positive when training");
        }
        Ok(())
    }
}

/// One compile-and-verify trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub gates: usize,
    pub normalized_len: usize,
    pub layers_used: usize,
    pub residual: f64,
    pub phase_error: f64,
    pub ok: bool,
    pub wall_ms: f64,
}

/// One hypothesis evaluated on one training set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub hypothesis: String,
    pub emp_risk: f64,
    pub risk: f64,
    pub risk_std_error: f64,
    pub gap: f64,
    pub layers_used: usize,
    pub wall_ms: f64,
}

/// ERM gap check over all hypotheses of one `(n, m, trial)` draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErmRow {
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub hypotheses: usize,
    pub erm_index: usize,
    pub best_index: usize,
    pub gap: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecordRows {
    Compile(Vec<CompileRow>),
    Gap(Vec<GapRow>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub config: ExperimentConfig,
    pub rows: RecordRows,
    pub erm_checks: Vec<ErmRow>,
    /// Trials that failed verification or an ERM check.
    pub failures: usize,
    /// Sample-complexity bound for each `n`, where the constants are admissible.
    pub complexity: Vec<(usize, Option<ComplexityReport>)>,
    pub wall_ms: f64,
}

impl ExperimentRecord {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn trial_grid(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    cfg.n.iter().flat_map(|&n| (0..cfg.trials).map(move |t| (n, t))).collect()
}

/// Compile random concept circuits and verify each against its unitary.
pub fn experiment_compile_sweep(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rows = trial_grid(cfg)
        .into_par_iter()
        .map(|(n, trial)| {
            let t0 = Instant::now();
            let seed = derive_seed(cfg.seed, &[n as u64, trial as u64]);
            let target = random_concept_circuit_capped(n, cfg.c, cfg.max_gates, seed)?;
            let compiled = compile_to_ansatz(&target, None)?;
            let v = verify_compilation(&compiled, &target, cfg.tol)?;
            let ok = v.ok && compiled.layers_used <= 2 * compiled.normalized_len;
            Ok(CompileRow {
                n,
                trial,
                seed,
                gates: target.len(),
                normalized_len: compiled.normalized_len,
                layers_used: compiled.layers_used,
                residual: v.residual,
                phase_error: v.phase_error,
                ok,
                wall_ms: ms_since(t0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.trial));
    let failures = rows.iter().filter(|r| !r.ok).count();
    Ok(ExperimentRecord {
        config: cfg.clone(),
        rows: RecordRows::Compile(rows),
        erm_checks: Vec::new(),
        failures,
        complexity: Vec::new(),
        wall_ms: ms_since(start),
    })
}

/// Flat indices of the two angles swept by grid hypotheses: the `γ` of the
/// level-1 blocks on qubits 0 and 1 in the first level-2 block.
pub const GRID_AXES: [usize; 2] = [1, 4];

/// `points × points` hypotheses varying the two [`GRID_AXES`] angles over
/// `{0, 2π/points, …}`, all other angles zero.
pub fn grid_hypotheses(shape: &AnsatzShape, points: usize) -> Vec<ParamVector> {
    let step = std::f64::consts::TAU / points as f64;
    let mut out = Vec::with_capacity(points * points);
    for a in 0..points {
        for b in 0..points {
            let mut theta = ParamVector::zeros(shape);
            theta.set(GRID_AXES[0], a as f64 * step);
            theta.set(GRID_AXES[1], b as f64 * step);
            out.push(theta);
        }
    }
    out
}

struct Hypothesis {
    label: String,
    circuit: Circuit,
    layers_used: usize,
    risk: f64,
    risk_std_error: f64,
}

fn true_risk(
    dist: &InputDistribution,
    hypothesis: &Circuit,
    shape: &AnsatzShape,
    theta: &ParamVector,
    target: &Circuit,
    n_eval: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    match dist {
        InputDistribution::Pool(pool) => Ok((pool_risk(hypothesis, target, pool)?, 0.0)),
        InputDistribution::Haar => {
            let r = estimate_risk_from(dist, shape, theta, target, n_eval, seed)?;
            Ok((r.mean, r.std_error))
        }
    }
}

fn gap_trial(
    cfg: &ExperimentConfig,
    dist: &InputDistribution,
    n: usize,
    trial: usize,
) -> Result<(Vec<GapRow>, Vec<ErmRow>)> {
    let trial_seed = derive_seed(cfg.seed, &[n as u64, trial as u64]);
    let target = random_concept_circuit_capped(n, cfg.c, cfg.max_gates, derive_seed(trial_seed, &[0]))?;
    let eval_seed = derive_seed(trial_seed, &[2]);
    let shape = AnsatzShape::new(n, cfg.depth)?;

    let mut candidates: Vec<(String, AnsatzShape, ParamVector, usize)> = Vec::new();
    let compiled = compile_to_ansatz(&target, None)?;
    candidates.push(("compiled".into(), compiled.shape, compiled.theta.clone(), compiled.layers_used));
    for j in 0..cfg.random_hypotheses {
        let theta = random_params(&shape, derive_seed(trial_seed, &[1, j as u64]));
        candidates.push((format!("random-{j}"), shape, theta, 0));
    }
    if cfg.grid_points > 0 {
        for (j, theta) in grid_hypotheses(&shape, cfg.grid_points).into_iter().enumerate() {
            candidates.push((format!("grid-{j}"), shape, theta, 0));
        }
    }
    let mut fixed = Vec::with_capacity(candidates.len());
    for (label, s, theta, layers_used) in candidates {
        let circuit = build_ansatz(&s, &theta)?;
        let (risk, risk_std_error) = true_risk(dist, &circuit, &s, &theta, &target, cfg.n_eval, eval_seed)?;
        fixed.push(Hypothesis { label, circuit, layers_used, risk, risk_std_error });
    }

    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &m in &cfg.m_schedule {
        let data_seed = derive_seed(cfg.seed, &[n as u64, trial as u64, m as u64]);
        let data: Dataset = generate_dataset_from(dist, &target, m, data_seed)?;
        let mut pairs = Vec::with_capacity(fixed.len() + 1);
        for h in &fixed {
            let t0 = Instant::now();
            let emp = circuit_risk(&h.circuit, &data)?;
            pairs.push((emp, h.risk));
            rows.push(GapRow {
                n,
                m,
                trial,
                seed: data_seed,
                hypothesis: h.label.clone(),
                emp_risk: emp,
                risk: h.risk,
                risk_std_error: h.risk_std_error,
                gap: (emp - h.risk).abs(),
                layers_used: h.layers_used,
                wall_ms: ms_since(t0),
            });
        }
        if cfg.train {
            let t0 = Instant::now();
            let tc = TrainConfig {
                sweeps: cfg.train_sweeps,
                seed: derive_seed(data_seed, &[3]),
                ..TrainConfig::default()
            };
            let trained = train_erm(&shape, &data, &tc)?;
            let circuit = build_ansatz(&shape, &trained.theta)?;
            let (risk, se) = true_risk(dist, &circuit, &shape, &trained.theta, &target, cfg.n_eval, eval_seed)?;
            pairs.push((trained.risk, risk));
            rows.push(GapRow {
                n,
                m,
                trial,
                seed: data_seed,
                hypothesis: "trained".into(),
                emp_risk: trained.risk,
                risk,
                risk_std_error: se,
                gap: (trained.risk - risk).abs(),
                layers_used: 0,
                wall_ms: ms_since(t0),
            });
        }
        if matches!(dist, InputDistribution::Pool(_)) {
            let g = erm_gap_check(&pairs)?;
            checks.push(ErmRow {
                n,
                m,
                trial,
                hypotheses: pairs.len(),
                erm_index: g.erm_index,
                best_index: g.best_index,
                gap: g.gap,
                bound: g.bound,
                holds: g.holds,
            });
        }
    }
    Ok((rows, checks))
}

/// Measure `|R̂ − R|` across the m-schedule for fixed per-trial hypotheses.
pub fn experiment_generalization_gap(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let mut dists = Vec::new();
    for &n in &cfg.n {
        let dist = match cfg.distribution {
            DistributionKind::Haar => InputDistribution::Haar,
            DistributionKind::Pool => InputDistribution::haar_pool(n, cfg.pool_size, derive_seed(cfg.seed, &[n as u64, u64::MAX]))?,
        };
        dists.push((n, dist));
    }
    let results = trial_grid(cfg)
        .into_par_iter()
        .map(|(n, trial)| {
            let dist = &dists.iter().find(|(k, _)| *k == n).expect("distribution per n").1;
            gap_trial(cfg, dist, n, trial)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (r, c) in results {
        rows.extend(r);
        checks.extend(c);
    }
    // stable sort keeps hypothesis order within a draw
    rows.sort_by_key(|r| (r.n, r.m, r.trial));
    checks.sort_by_key(|r| (r.n, r.m, r.trial));
    let failures = checks.iter().filter(|c| !c.holds).count()
        + rows.iter().filter(|r| !(0.0..=1.0).contains(&r.gap)).count();
    let complexity = cfg
        .n
        .iter()
        .map(|&n| {
            let report = ConceptClassParams::new(n, cfg.c, cfg.k, cfg.m_const)
                .and_then(|p| sample_complexity(cfg.eps, cfg.delta, &p))
                .ok();
            (n, report)
        })
        .collect();
    Ok(ExperimentRecord {
        config: cfg.clone(),
        rows: RecordRows::Gap(rows),
        erm_checks: checks,
        failures,
        complexity,
        wall_ms: ms_since(start),
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    match cfg.kind {
        ExperimentKind::CompileSweep => experiment_compile_sweep(cfg),
        ExperimentKind::GenGap => experiment_generalization_gap(cfg),
    }
}

/// Mean gap and its standard error per `(n, m)` over rows whose hypothesis
/// label starts with `prefix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSummary {
    pub n: usize,
    pub m: usize,
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

pub fn summarize_gaps(rows: &[GapRow], prefix: &str) -> Vec<GapSummary> {
    let mut keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.n, r.m)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|(n, m)| {
            let gaps: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n && r.m == m && r.hypothesis.starts_with(prefix))
                .map(|r| r.gap)
                .collect();
            let k = gaps.len() as f64;
            let mean = gaps.iter().sum::<f64>() / k;
            let var = if gaps.len() > 1 {
                gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            GapSummary { n, m, mean, std_error: (var / k).sqrt(), count: gaps.len() }
        })
        .collect()
}

/// True when consecutive means (per `n`, in increasing `m`) never rise by more
/// than `sigmas` combined standard errors.
pub fn gaps_non_increasing(summary: &[GapSummary], sigmas: f64) -> bool {
    summary.windows(2).filter(|w| w[0].n == w[1].n).all(|w| {
        let slack = sigmas * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        w[1].mean <= w[0].mean + slack
    })
}

/// Output options for CSV files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    /// Emit a leading `#` line with the Unix time and total wall time, and
    /// real per-row timings. When off, timings are written as 0 so the file
    /// is byte-stable for a fixed config.
    pub timestamp: bool,
}

fn write_rows<W: Write, T: Serialize>(mut out: W, header: Option<String>, rows: &[T]) -> Result<()> {
    if let Some(h) = header {
        writeln!(out, "{h}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn header_line(record: &ExperimentRecord, opts: CsvOptions) -> Option<String> {
    opts.timestamp.then(|| {
        let unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!(
            "# uqcpac {} unix_time={unix} wall_ms={:.3}",
            record.config.kind.name(),
            record.wall_ms
        )
    })
}

/// Write the main row table.
pub fn write_record_csv<W: Write>(out: W, record: &ExperimentRecord, opts: CsvOptions) -> Result<()> {
    let header = header_line(record, opts);
    match &record.rows {
        RecordRows::Compile(rows) => {
            let rows: Vec<CompileRow> = rows
                .iter()
                .cloned()
                .map(|mut r| {
                    if !opts.timestamp {
                        r.wall_ms = 0.0;
                    }
                    r
                })
                .collect();
            write_rows(out, header, &rows)
        }
        RecordRows::Gap(rows) => {
            let rows: Vec<GapRow> = rows
                .iter()
                .cloned()
                .map(|mut r| {
                    if !opts.timestamp {
                        r.wall_ms = 0.0;
                    }
                    r
                })
                .collect();
            write_rows(out, header, &rows)
        }
    }
}

pub fn write_erm_csv<W: Write>(out: W, record: &ExperimentRecord, opts: CsvOptions) -> Result<()> {
    write_rows(out, header_line(record, opts), &record.erm_checks)
}

/// Sibling path for the ERM-check table: `out.csv` → `out.erm.csv`.
pub fn erm_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.erm.csv"))
}

/// Write the record (and ERM table, if any) next to `path`.
pub fn save_record(path: &Path, record: &ExperimentRecord, opts: CsvOptions) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_record_csv(file, record, opts)?;
    if !record.erm_checks.is_empty() {
        let file = std::io::BufWriter::new(std::fs::File::create(erm_path(path))?);
        write_erm_csv(file, record, opts)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_sweep() -> ExperimentConfig {
        ExperimentConfig {
            n: vec![2, 3],
            trials: 10,
            ..ExperimentConfig::defaults(ExperimentKind::CompileSweep)
        }
    }

    #[test]
    fn compile_sweep_rows_pass() {
        let rec = experiment_compile_sweep(&small_sweep()).unwrap();
        let RecordRows::Compile(rows) = &rec.rows else { panic!("wrong row kind") };
        assert_eq!(rows.len(), 20);
        assert!(rec.passed());
        for r in rows {
            assert!(r.residual <= 1e-9);
            assert!(r.layers_used <= 2 * r.normalized_len);
        }
    }

    #[test]
    fn csv_is_byte_stable_without_timestamp() {
        let cfg = small_sweep();
        let opts = CsvOptions { timestamp: false };
        let mut a = Vec::new();
        write_record_csv(&mut a, &experiment_compile_sweep(&cfg).unwrap(), opts).unwrap();
        let mut b = Vec::new();
        write_record_csv(&mut b, &experiment_compile_sweep(&cfg).unwrap(), opts).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("n,trial,seed,gates,normalized_len,layers_used,residual,phase_error,ok,wall_ms\n"));

        let mut c = Vec::new();
        write_record_csv(&mut c, &experiment_compile_sweep(&cfg).unwrap(), CsvOptions { timestamp: true }).unwrap();
        assert!(String::from_utf8(c).unwrap().starts_with("# uqcpac compile-sweep unix_time="));
    }

    #[test]
    fn gen_gap_pool_runs_erm_checks() {
        let cfg = ExperimentConfig {
            trials: 3,
            m_schedule: vec![4, 16],
            distribution: DistributionKind::Pool,
            pool_size: 10,
            grid_points: 3,
            ..ExperimentConfig::defaults(ExperimentKind::GenGap)
        };
        let rec = experiment_generalization_gap(&cfg).unwrap();
        assert!(rec.passed());
        assert_eq!(rec.erm_checks.len(), 6);
        let RecordRows::Gap(rows) = &rec.rows else { panic!("wrong row kind") };
        assert_eq!(rows.len(), 6 * (1 + 4 + 9));
        for r in rows.iter().filter(|r| r.hypothesis == "compiled") {
            assert!(r.emp_risk < 1e-9 && r.risk < 1e-9);
        }
        assert!(rows.iter().all(|r| r.gap <= 1.0));
        assert!(rec.complexity[0].1.is_some());
    }

    #[test]
    fn gen_gap_with_training() {
        let cfg = ExperimentConfig {
            trials: 2,
            m_schedule: vec![8],
            n_eval: 64,
            train: true,
            train_sweeps: 1,
            ..ExperimentConfig::defaults(ExperimentKind::GenGap)
        };
        let rec = experiment_generalization_gap(&cfg).unwrap();
        let RecordRows::Gap(rows) = &rec.rows else { panic!("wrong row kind") };
        assert_eq!(rows.iter().filter(|r| r.hypothesis == "trained").count(), 2);
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::parse(r#"{"kind":"gen-gap","trials":3}"#, None).unwrap();
        assert_eq!(ok.trials, 3);
        assert_eq!(ok.c, 1);
        assert!(ExperimentConfig::parse(r#"{"kind":"gen-gap","m_schedule":[8,8]}"#, None).is_err());
        assert!(ExperimentConfig::parse(r#"{"trials":3}"#, None).is_err());
        assert!(ExperimentConfig::parse(r#"{"trials":3}"#, Some(ExperimentKind::CompileSweep)).is_ok());
        assert!(ExperimentConfig::parse(r#"{"kind":"gen-gap"}"#, Some(ExperimentKind::CompileSweep)).is_err());
        assert!(ExperimentConfig::parse(r#"{"kind":"gen-gap","bogus":1}"#, None).is_err());
        assert!(ExperimentConfig::parse(r#"{"kind":"compile-sweep","n":[11]}"#, None).is_err());
    }

    #[test]
    fn erm_sibling_path() {
        assert_eq!(erm_path(Path::new("out/gap.csv")), PathBuf::from("out/gap.erm.csv"));
    }

    #[test]
    fn trend_check() {
        let s = |m, mean, se| GapSummary { n: 2, m, mean, std_error: se, count: 10 };
        assert!(gaps_non_increasing(&[s(8, 0.1, 0.01), s(32, 0.05, 0.01)], 3.0));
        assert!(gaps_non_increasing(&[s(8, 0.1, 0.01), s(32, 0.12, 0.01)], 3.0));
        assert!(!gaps_non_increasing(&[s(8, 0.1, 0.001), s(32, 0.2, 0.001)], 3.0));
    }
}
