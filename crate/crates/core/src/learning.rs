//! PAC-learning testbench for the ansatz hypothesis class.
//!
//! Covers datasets drawn from a target circuit, empirical and true risk
//! under the trace-distance loss, a derivative-free ERM trainer, rounding of
//! parameters onto the finite cover grid, and the sample-complexity bound
//! `ν(ε, δ) = ⌈(18/ε²)(ln|F′| + ln(2/δ))⌉`.

use crate::ansatz::{build_ansatz, AnsatzShape, ParamVector};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::linalg::wrap_angle;
use crate::metrics::loss;
use crate::rng::{derive_seed, derived_rng, rng_from_seed};
use crate::sim::apply_circuit;
use crate::state::{haar_state_with, StateVector};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Labelled pairs `(x, y = target·x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    pairs: Vec<(StateVector, StateVector)>,
}

impl Dataset {
    pub fn new(n: usize, pairs: Vec<(StateVector, StateVector)>) -> Result<Self> {
        if let Some(i) = pairs.iter().position(|(x, y)| x.n() != n || y.n() != n) {
            return Err(Error::domain(format!("pair {i} does not have {n} qubits")));
        }
        Ok(Dataset { n, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(StateVector, StateVector)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Input distribution `P` over `x`; labels are always `y = target·x`.
#[derive(Debug, Clone, PartialEq)]
pub enum InputDistribution {
    /// Haar-random pure states.
    Haar,
    /// Uniform over a fixed pool of states, so risks are exactly computable.
    Pool(Vec<StateVector>),
}

impl InputDistribution {
    /// Pool of `size` Haar states drawn from `seed`.
    pub fn haar_pool(n: usize, size: usize, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::domain("state pool must not be empty"));
        }
        let pool = (0..size)
            .map(|i| haar_state_with(n, &mut derived_rng(seed, &[i as u64])))
            .collect::<Result<Vec<_>>>()?;
        Ok(InputDistribution::Pool(pool))
    }

    fn draw(&self, n: usize, seed: u64, index: u64) -> Result<StateVector> {
        let mut rng = derived_rng(seed, &[index]);
        match self {
            InputDistribution::Haar => haar_state_with(n, &mut rng),
            InputDistribution::Pool(pool) => {
                let x = &pool[rng.random_range(0..pool.len())];
                if x.n() != n {
                    return Err(Error::domain(format!("pool state has {} qubits, need {n}", x.n())));
                }
                Ok(x.clone())
            }
        }
    }
}

/// `m` Haar inputs labelled by `target`; sample `i` uses its own derived seed.
pub fn generate_dataset(target: &Circuit, m: usize, seed: u64) -> Result<Dataset> {
    generate_dataset_from(&InputDistribution::Haar, target, m, seed)
}

pub fn generate_dataset_from(dist: &InputDistribution, target: &Circuit, m: usize, seed: u64) -> Result<Dataset> {
    let n = target.n();
    let pairs = (0..m)
        .into_par_iter()
        .map(|i| {
            let x = dist.draw(n, seed, i as u64)?;
            let y = apply_circuit(&x, target)?;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(n, pairs)
}

fn check_dims(shape: &AnsatzShape, n: usize) -> Result<()> {
    if shape.n() != n {
        return Err(Error::domain(format!("{}-qubit ansatz against {n}-qubit data", shape.n())));
    }
    Ok(())
}

/// Per-sample losses `ℒ(yᵢ, h(xᵢ))` for a hypothesis circuit.
pub fn sample_losses(hypothesis: &Circuit, pairs: &[(StateVector, StateVector)]) -> Result<Vec<f64>> {
    pairs
        .iter()
        .map(|(x, y)| Ok(loss(y, &apply_circuit(x, hypothesis)?)?.value()))
        .collect()
}

/// Mean loss of a hypothesis circuit over a non-empty dataset.
pub fn circuit_risk(hypothesis: &Circuit, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::domain("empirical risk of an empty dataset"));
    }
    let losses = sample_losses(hypothesis, data.pairs())?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

/// `R̂(θ) = (1/m) Σ ℒ(yᵢ, F(θ)xᵢ)`
pub fn empirical_risk(shape: &AnsatzShape, theta: &ParamVector, data: &Dataset) -> Result<f64> {
    check_dims(shape, data.n())?;
    circuit_risk(&build_ansatz(shape, theta)?, data)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√samples_used`.
    pub std_error: f64,
    pub samples_used: usize,
}

impl RiskEstimate {
    fn from_losses(losses: &[f64]) -> Self {
        let k = losses.len() as f64;
        let mean = losses.iter().sum::<f64>() / k;
        let var = if losses.len() > 1 {
            losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        RiskEstimate {
            mean,
            std_error: (var / k).sqrt(),
            samples_used: losses.len(),
        }
    }
}

/// Monte-Carlo estimate of `R(θ)` over fresh Haar inputs.
///
/// Inputs are drawn exactly as [`generate_dataset`] draws them for the same
/// seed, so with `n_eval = m` the mean equals the empirical risk on that
/// dataset.
pub fn estimate_risk(
    shape: &AnsatzShape,
    theta: &ParamVector,
    target: &Circuit,
    n_eval: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    estimate_risk_from(&InputDistribution::Haar, shape, theta, target, n_eval, seed)
}

pub fn estimate_risk_from(
    dist: &InputDistribution,
    shape: &AnsatzShape,
    theta: &ParamVector,
    target: &Circuit,
    n_eval: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if n_eval < 2 {
        return Err(Error::domain("risk estimation needs at least 2 samples"));
    }
    check_dims(shape, target.n())?;
    let hypothesis = build_ansatz(shape, theta)?;
    let data = generate_dataset_from(dist, target, n_eval, seed)?;
    let losses = sample_losses(&hypothesis, data.pairs())?;
    Ok(RiskEstimate::from_losses(&losses))
}

/// Exact `R` of a hypothesis when `P` is uniform over `pool`.
pub fn pool_risk(hypothesis: &Circuit, target: &Circuit, pool: &[StateVector]) -> Result<f64> {
    if pool.is_empty() {
        return Err(Error::domain("state pool must not be empty"));
    }
    let mut total = 0.0;
    for x in pool {
        let y = apply_circuit(x, target)?;
        total += loss(&y, &apply_circuit(x, hypothesis)?)?.value();
    }
    Ok(total / pool.len() as f64)
}

/// Settings for [`train_erm`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Maximum full coordinate sweeps per restart.
    pub sweeps: usize,
    /// Independent starts; the first uses `init` (or zeros), the rest are random.
    pub restarts: usize,
    pub seed: u64,
    /// Evenly spaced probe points per line search before golden refinement.
    pub scan_points: usize,
    /// Golden-section iterations per line search.
    pub golden_iters: usize,
    /// Stop a restart once a sweep improves `R̂` by less than this.
    pub tol: f64,
    pub init: Option<ParamVector>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            sweeps: 20,
            restarts: 1,
            seed: 0,
            scan_points: 8,
            golden_iters: 24,
            tol: 1e-10,
            init: None,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.restarts == 0 || self.scan_points == 0 {
            return Err(Error::domain("sweeps, restarts and scan_points must be positive"));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::domain("tolerance must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub theta: ParamVector,
    pub risk: f64,
    /// Best-so-far `R̂` of the winning restart, at the start and after each sweep.
    pub history: Vec<f64>,
    /// Coordinate updates that strictly lowered `R̂` in the winning restart.
    pub improving_steps: usize,
    pub restart: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden_section(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Final parameters, risk, per-sweep history and improving-step count.
type Descent = (ParamVector, f64, Vec<f64>, usize);

fn descend(
    shape: &AnsatzShape,
    data: &Dataset,
    mut theta: ParamVector,
    config: &TrainConfig,
) -> Result<Descent> {
    let risk_at = |t: &ParamVector| -> Result<f64> { empirical_risk(shape, t, data) };
    let mut best = risk_at(&theta)?;
    let mut history = vec![best];
    let mut improving = 0;
    let step = TAU / config.scan_points as f64;
    for _ in 0..config.sweeps {
        let start = best;
        for k in 0..theta.len() {
            let current = theta.get(k);
            let mut trial = theta.clone();
            let mut eval = |x: f64| -> f64 {
                trial.set(k, x);
                risk_at(&trial).unwrap_or(f64::INFINITY)
            };
            let (mut arg, mut val) = (current, best);
            for s in 1..config.scan_points {
                let x = current + s as f64 * step;
                let v = eval(x);
                if v < val {
                    arg = x;
                    val = v;
                }
            }
            let (g_arg, g_val) = golden_section(&mut eval, arg - step, arg + step, config.golden_iters);
            if g_val < val {
                arg = g_arg;
                val = g_val;
            }
            if val < best {
                theta.set(k, wrap_angle(arg));
                best = risk_at(&theta)?;
                improving += 1;
            }
        }
        history.push(best);
        if start - best < config.tol {
            break;
        }
    }
    Ok((theta, best, history, improving))
}

/// Coordinate descent on `R̂` with a scan-then-golden-section line search per
/// angle. Restarts run in parallel, each with its own derived RNG stream; the
/// lowest risk wins, earliest restart on ties.
pub fn train_erm(shape: &AnsatzShape, data: &Dataset, config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::domain("cannot train on an empty dataset"));
    }
    check_dims(shape, data.n())?;
    let runs = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                match &config.init {
                    Some(init) => {
                        init.check_shape(shape)?;
                        init.clone()
                    }
                    None => ParamVector::zeros(shape),
                }
            } else {
                let mut rng = derived_rng(config.seed, &[r as u64]);
                let values = (0..shape.param_count()).map(|_| rng.random_range(0.0..TAU)).collect();
                ParamVector::new(shape, values)?
            };
            descend(shape, data, start, config)
        })
        .collect::<Result<Vec<_>>>()?;
    let (restart, (theta, risk, history, improving_steps)) = runs
        .into_iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, Descent)>, (i, run)| match acc {
            Some((j, best)) if best.1 <= run.1 => Some((j, best)),
            _ => Some((i, run)),
        })
        .expect("at least one restart");
    Ok(TrainResult {
        theta,
        risk,
        history,
        improving_steps,
        restart,
    })
}

/// Largest grid index `N = ⌊2π/e⌋`.
pub fn grid_cells(e: f64) -> u64 {
    (TAU / e).floor() as u64
}

/// Round every angle to the nearest point of `{0, e, …, Ne}`, ties down.
/// Angles closer to `2π` than to `Ne` wrap to 0.
pub fn round_to_grid(theta: &ParamVector, e: f64) -> Result<ParamVector> {
    if !e.is_finite() || e <= 0.0 {
        return Err(Error::domain(format!("grid spacing must be positive, got {e}")));
    }
    let top = grid_cells(e) as f64;
    let values = theta
        .values()
        .iter()
        .map(|&x| {
            let below = (x / e).floor().min(top);
            let above = (below + 1.0).min(top);
            let (lo, hi) = (below * e, above * e);
            let mut best = if x - lo <= hi - x { lo } else { hi };
            if TAU - x < (x - best).abs() {
                best = 0.0;
            }
            best
        })
        .collect();
    ParamVector::from_values(values)
}

/// Grid spacing `e = ε/(6Knᶜ⁺¹)`.
pub fn grid_spacing(eps: f64, k: f64, n: usize, c: u32) -> f64 {
    eps / (6.0 * k * (n as f64).powf(c as f64 + 1.0))
}

/// Constants of the concept class and the hypothesis class built for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConceptClassParams {
    pub n: usize,
    /// Gate-count exponent: concepts have at most `nᶜ` gates.
    pub c: u32,
    /// Discretization constant.
    pub k: f64,
    /// Depth constant: the ansatz has `M·nᶜ` layers.
    pub m: usize,
}

/// Default discretization constant.
pub const DEFAULT_K: f64 = 12.0;
/// Default depth constant.
pub const DEFAULT_M: usize = 2;

impl ConceptClassParams {
    pub fn new(n: usize, c: u32, k: f64, m: usize) -> Result<Self> {
        let p = ConceptClassParams { n, c, k, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.c < 1 || self.m < 1 || !self.k.is_finite() || self.k < 1.0 {
            return Err(Error::domain(format!("need n ≥ 2, c ≥ 1, K ≥ 1, M ≥ 1; got {self:?}")));
        }
        let needed = self.min_k();
        if self.k < needed {
            return Err(Error::domain(format!(
                "K = {} is below l/n^(c+1) = {needed} for n = {}, c = {}, M = {}",
                self.k, self.n, self.c, self.m
            )));
        }
        Ok(())
    }

    /// `l = 12(n−1)·M·nᶜ` as a float.
    pub fn param_count_f64(&self) -> f64 {
        12.0 * (self.n as f64 - 1.0) * self.m as f64 * (self.n as f64).powf(self.c as f64)
    }

    /// Smallest admissible `K`, `l/nᶜ⁺¹ = 12(n−1)M/n`.
    pub fn min_k(&self) -> f64 {
        12.0 * (self.n as f64 - 1.0) * self.m as f64 / self.n as f64
    }
}

/// Saturating conversion of a non-negative float to `u64`.
fn saturating_u64(x: f64) -> u64 {
    if x.is_finite() && x < u64::MAX as f64 {
        x as u64
    } else {
        u64::MAX
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityReport {
    pub eps: f64,
    pub delta: f64,
    /// Grid spacing in radians.
    pub e: f64,
    /// `⌊2π/e⌋`, saturating.
    pub n_cells: u64,
    /// `12(n−1)·M·nᶜ`, saturating.
    pub param_count: u64,
    pub param_count_f64: f64,
    /// `ln|F′| = l·ln(N+1)`.
    pub ln_hypothesis_count: f64,
    /// `ln ν` before rounding up.
    pub ln_nu: f64,
    /// `ν`, saturating at `u64::MAX`.
    pub nu: u64,
}

/// Sample-complexity bound for learning the class to accuracy `ε` with
/// confidence `1 − δ`.
pub fn sample_complexity(eps: f64, delta: f64, params: &ConceptClassParams) -> Result<ComplexityReport> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("ε and δ must lie in (0, 1); got ε = {eps}, δ = {delta}")));
    }
    params.validate()?;
    let e = grid_spacing(eps, params.k, params.n, params.c);
    let cells = (TAU / e).floor();
    let l = params.param_count_f64();
    let ln_f = l * (cells + 1.0).ln();
    let bracket = ln_f + (2.0 / delta).ln();
    let ln_nu = (18.0 / (eps * eps)).ln() + bracket.ln();
    let nu_real = 18.0 / (eps * eps) * bracket;
    Ok(ComplexityReport {
        eps,
        delta,
        e,
        n_cells: saturating_u64(cells),
        param_count: saturating_u64(l),
        param_count_f64: l,
        ln_hypothesis_count: ln_f,
        ln_nu,
        nu: if nu_real.is_finite() { saturating_u64(nu_real.ceil()) } else { u64::MAX },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErmGap {
    /// Index minimizing `R̂` (first on ties).
    pub erm_index: usize,
    /// Index minimizing `R` (first on ties).
    pub best_index: usize,
    /// `R(ĥ) − R(h)`.
    pub gap: f64,
    /// `2·max|R̂ − R|`.
    pub bound: f64,
    pub holds: bool,
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) })
        .0
}

/// Check `R(ĥ) − R(h) ≤ 2·sup|R̂ − R|` over a finite list of `(R̂, R)`.
pub fn erm_gap_check(risks: &[(f64, f64)]) -> Result<ErmGap> {
    if risks.is_empty() {
        return Err(Error::domain("ERM gap check needs at least one hypothesis"));
    }
    let erm_index = argmin(risks.iter().map(|r| r.0));
    let best_index = argmin(risks.iter().map(|r| r.1));
    let gap = risks[erm_index].1 - risks[best_index].1;
    let bound = 2.0 * risks.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(ErmGap {
        erm_index,
        best_index,
        gap,
        bound,
        holds: gap <= bound + 1e-12,
    })
}

/// Random angle vector for a shape.
pub fn random_params(shape: &AnsatzShape, seed: u64) -> ParamVector {
    let mut rng = rng_from_seed(seed);
    let values = (0..shape.param_count()).map(|_| rng.random_range(0.0..TAU)).collect();
    ParamVector::new(shape, values).expect("length matches shape")
}

/// Seed for item `index` of a stream keyed by `seed`.
pub fn item_seed(seed: u64, index: u64) -> u64 {
    derive_seed(seed, &[index])
}
