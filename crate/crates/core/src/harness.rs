//! Monte-Carlo ensemble runner, empirical CDFs, ensemble comparison, and
//! exhaustive grid oracles.
//!
//! An [`ExperimentSpec`] fully determines an ensemble: trial `t` derives its
//! seed as [`trial_seed`]`(base, t)`, draws a fresh Gaussian channel, runs
//! the selected solver, and records the reported quantities. Trials share no
//! state, so they run on any schedule — with the `parallel` feature they are
//! fanned out over rayon; [`run_ensemble_serial`] is the sequential path and
//! produces identical output.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::channel::{random_gaussian_matrix, random_gaussian_tensor, BlockPartition, ChannelMatrix, ChannelTensor};
use crate::error::{Error, Result};
use crate::linalg::{normalize, vdot, C64};
use crate::mimo::{als_shared, als_split_matrix, als_split_tensor, matrix_blocks};
use crate::rng::{trial_seed, SplitMix64};
use crate::siso::{als_tensor, hopm, power_method, SolverConfig};

/// Percentiles reported in ensemble sidecars.
pub const PERCENTILES: [f64; 7] = [1.0, 5.0, 25.0, 50.0, 75.0, 95.0, 99.0];

/// Guard on exhaustive grid searches.
pub const GRID_EVAL_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Matrix,
    Tensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Siso,
    Shared,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Power,
    Als,
    Hopm,
    AlsShared,
    AlsSplit,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Power => "power",
            Algorithm::Als => "als",
            Algorithm::Hopm => "hopm",
            Algorithm::AlsShared => "als-shared",
            Algorithm::AlsSplit => "als-split",
        }
    }
}

fn default_taps() -> usize {
    1
}
fn default_streams() -> usize {
    1
}

/// Everything needed to reproduce one ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub channel: ChannelKind,
    pub n: usize,
    pub m: usize,
    #[serde(default = "default_taps")]
    pub p: usize,
    pub architecture: Architecture,
    pub algorithm: Algorithm,
    #[serde(default = "default_streams")]
    pub streams: usize,
    pub trials: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidExperiment(msg));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.n == 0 || self.m == 0 || self.p == 0 {
            return fail(format!("dims must be positive, got {}x{}x{}", self.n, self.m, self.p));
        }
        if self.channel == ChannelKind::Matrix && self.p != 1 {
            return fail(format!("matrix channels are frequency-flat, got p = {}", self.p));
        }
        self.solver.validate()?;
        match (self.architecture, self.algorithm) {
            (Architecture::Siso, Algorithm::Power) => {
                if self.channel != ChannelKind::Matrix {
                    return fail("the power method runs on matrix channels".into());
                }
            }
            (Architecture::Siso, Algorithm::Als | Algorithm::Hopm) => {
                if self.channel != ChannelKind::Tensor {
                    return fail(format!("{} runs on tensor channels", self.algorithm.name()));
                }
            }
            (Architecture::Shared, Algorithm::AlsShared) => {
                if self.streams == 0 || self.streams > self.n.min(self.m) {
                    return fail(format!(
                        "shared architecture needs 1 <= streams <= min(N, M), got {}",
                        self.streams
                    ));
                }
            }
            (Architecture::Split, Algorithm::AlsSplit) => {
                if self.streams != 2 {
                    return fail("split architecture supports exactly 2 streams".into());
                }
                BlockPartition::even(self.n, self.m)?;
            }
            (arch, alg) => {
                return fail(format!(
                    "algorithm {} does not fit the {:?} architecture",
                    alg.name(),
                    arch
                ));
            }
        }
        if self.architecture == Architecture::Siso && self.streams != 1 {
            return fail("siso runs carry exactly 1 stream".into());
        }
        Ok(())
    }

    /// Names of the per-trial quantities, in record order.
    pub fn quantity_names(&self) -> Vec<String> {
        match self.architecture {
            Architecture::Siso => vec!["sigma".to_string()],
            _ if self.streams == 2 => {
                vec!["stronger_stream".to_string(), "weaker_stream".to_string()]
            }
            _ => (1..=self.streams).map(|k| format!("stream{k}")).collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct TrialRecord {
    values: Vec<f64>,
    converged: bool,
}

fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(spec.seed, trial as u64);
    match spec.algorithm {
        Algorithm::Power => {
            let h = random_gaussian_matrix(spec.n, spec.m, seed)?;
            let r = power_method(&h, &spec.solver, None)?;
            Ok(TrialRecord { values: vec![r.sigma], converged: r.converged })
        }
        Algorithm::Als => {
            let t = random_gaussian_tensor(spec.n, spec.m, spec.p, seed)?;
            let r = als_tensor(&t, &spec.solver, None)?;
            Ok(TrialRecord { values: vec![r.sigma], converged: r.converged })
        }
        Algorithm::Hopm => {
            let t = random_gaussian_tensor(spec.n, spec.m, spec.p, seed)?;
            let r = hopm(&t, &spec.solver, None, None)?;
            Ok(TrialRecord { values: vec![r.sigma], converged: r.converged })
        }
        Algorithm::AlsShared => {
            let t = random_gaussian_tensor(spec.n, spec.m, spec.p, seed)?;
            let r = als_shared(&t, spec.streams, &spec.solver)?;
            Ok(TrialRecord { values: r.stream_amplitudes_desc(), converged: r.converged })
        }
        Algorithm::AlsSplit => {
            let part = BlockPartition::even(spec.n, spec.m)?;
            let r = if spec.channel == ChannelKind::Matrix {
                let h = random_gaussian_matrix(spec.n, spec.m, seed)?;
                als_split_matrix(&h, &part, &spec.solver)?
            } else {
                let t = random_gaussian_tensor(spec.n, spec.m, spec.p, seed)?;
                als_split_tensor(&t, &part, &spec.solver)?
            };
            Ok(TrialRecord { values: r.stream_amplitudes_desc(), converged: r.converged })
        }
    }
}

/// Empirical distribution of one reported quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityStats {
    pub name: String,
    /// Samples sorted ascending; sample `i` sits at CDF `(i+1)/trials`.
    pub sorted_values: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
    pub percentiles: Vec<(f64, f64)>,
}

impl QuantityStats {
    fn from_values(name: String, mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let stddev = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let percentiles = PERCENTILES
            .iter()
            .map(|&p| (p, percentile_of_sorted(&values, p)))
            .collect();
        Self { name, sorted_values: values, mean, stddev, percentiles }
    }

    pub fn percentile(&self, p: f64) -> f64 {
        percentile_of_sorted(&self.sorted_values, p)
    }

    pub fn median(&self) -> f64 {
        self.percentile(50.0)
    }

    /// `(value, cdf)` pairs over the sorted samples.
    pub fn cdf(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.sorted_values.len();
        self.sorted_values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (v, (i + 1) as f64 / n as f64))
    }
}

fn percentile_of_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = (p / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Full ensemble output; `(spec, seed)` determines every field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub quantities: Vec<QuantityStats>,
    pub trials: usize,
    pub seed: u64,
    pub non_converged: usize,
}

impl EnsembleStats {
    pub fn quantity(&self, name: &str) -> Option<&QuantityStats> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

fn assemble(spec: &ExperimentSpec, records: Vec<TrialRecord>) -> EnsembleStats {
    let names = spec.quantity_names();
    let non_converged = records.iter().filter(|r| !r.converged).count();
    let quantities = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            QuantityStats::from_values(name, records.iter().map(|r| r.values[i]).collect())
        })
        .collect();
    EnsembleStats {
        quantities,
        trials: spec.trials,
        seed: spec.seed,
        non_converged,
    }
}

#[cfg(feature = "parallel")]
fn collect_records(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    use rayon::prelude::*;
    // Indexed collect keeps trial order, so aggregation is schedule-free.
    let raw: Vec<Result<TrialRecord>> =
        (0..spec.trials).into_par_iter().map(|t| run_trial(spec, t)).collect();
    raw.into_iter().collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_records(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    (0..spec.trials).map(|t| run_trial(spec, t)).collect()
}

/// Run the ensemble on the default rayon pool (or serially without the
/// `parallel` feature).
pub fn run_ensemble(spec: &ExperimentSpec) -> Result<EnsembleStats> {
    spec.validate()?;
    Ok(assemble(spec, collect_records(spec)?))
}

/// Sequential reference path; always available and byte-identical to the
/// parallel runner.
pub fn run_ensemble_serial(spec: &ExperimentSpec) -> Result<EnsembleStats> {
    spec.validate()?;
    let records: Result<Vec<TrialRecord>> = (0..spec.trials).map(|t| run_trial(spec, t)).collect();
    Ok(assemble(spec, records?))
}

/// Run on a dedicated pool of `threads` workers (serial fallback without
/// the `parallel` feature). `threads = 0` means use all available cores.
#[cfg(feature = "parallel")]
pub fn run_ensemble_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<EnsembleStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidExperiment(format!("thread pool: {e}")))?;
    pool.install(|| run_ensemble(spec))
}

#[cfg(not(feature = "parallel"))]
pub fn run_ensemble_with_threads(spec: &ExperimentSpec, _threads: usize) -> Result<EnsembleStats> {
    run_ensemble_serial(spec)
}

/// CSV rows `quantity,value,cdf` over all quantities.
pub fn csv_string(stats: &EnsembleStats) -> String {
    let mut out = String::from("quantity,value,cdf\n");
    for q in &stats.quantities {
        for (v, cdf) in q.cdf() {
            out.push_str(&format!("{},{},{}\n", q.name, v, cdf));
        }
    }
    out
}

pub fn write_csv(stats: &EnsembleStats, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(stats))?;
    Ok(())
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema: u32,
    spec: &'a ExperimentSpec,
    trials: usize,
    seed: u64,
    non_converged: usize,
    quantities: Vec<SidecarQuantity>,
}

#[derive(Serialize)]
struct SidecarQuantity {
    name: String,
    mean: f64,
    stddev: f64,
    percentiles: Vec<(f64, f64)>,
}

/// JSON sidecar with the spec, seed, convergence counts, and percentiles.
pub fn sidecar_json(stats: &EnsembleStats, spec: &ExperimentSpec) -> String {
    let sc = Sidecar {
        schema: 1,
        spec,
        trials: stats.trials,
        seed: stats.seed,
        non_converged: stats.non_converged,
        quantities: stats
            .quantities
            .iter()
            .map(|q| SidecarQuantity {
                name: q.name.clone(),
                mean: q.mean,
                stddev: q.stddev,
                percentiles: q.percentiles.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&sc).expect("sidecar serialization")
}

pub fn write_sidecar(stats: &EnsembleStats, spec: &ExperimentSpec, path: &Path) -> Result<()> {
    std::fs::write(path, sidecar_json(stats, spec))?;
    Ok(())
}

/// Percentile-wise comparison of one quantity across two ensembles.
#[derive(Debug, Clone, Serialize)]
pub struct QuantityComparison {
    pub quantity: String,
    pub median_a: f64,
    pub median_b: f64,
    /// `median_a - median_b`.
    pub median_delta: f64,
    /// `(percentile, a - b)` pairs.
    pub percentile_deltas: Vec<(f64, f64)>,
    /// Share of bootstrap resamples where a's median exceeds b's.
    pub bootstrap_fraction_a_greater: f64,
    pub bootstrap_resamples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub quantities: Vec<QuantityComparison>,
}

const BOOTSTRAP_RESAMPLES: usize = 200;
const BOOTSTRAP_SEED: u64 = 0xB007;

fn bootstrap_median_fraction(a: &[f64], b: &[f64]) -> f64 {
    let mut rng = SplitMix64::new(BOOTSTRAP_SEED);
    let mut wins = 0usize;
    let mut buf_a = vec![0.0; a.len()];
    let mut buf_b = vec![0.0; b.len()];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for slot in buf_a.iter_mut() {
            *slot = a[(rng.next_f64() * a.len() as f64) as usize % a.len()];
        }
        for slot in buf_b.iter_mut() {
            *slot = b[(rng.next_f64() * b.len() as f64) as usize % b.len()];
        }
        buf_a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        buf_b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if percentile_of_sorted(&buf_a, 50.0) > percentile_of_sorted(&buf_b, 50.0) {
            wins += 1;
        }
    }
    wins as f64 / BOOTSTRAP_RESAMPLES as f64
}

/// Quantity-by-quantity ordering report. Both ensembles must report the
/// same quantities over the same trial count.
pub fn compare_ensembles(a: &EnsembleStats, b: &EnsembleStats) -> Result<ComparisonReport> {
    if a.trials != b.trials {
        return Err(Error::EnsembleMismatch(format!(
            "trial counts differ: {} vs {}",
            a.trials, b.trials
        )));
    }
    if a.quantities.len() != b.quantities.len() {
        return Err(Error::EnsembleMismatch("quantity sets differ".into()));
    }
    let mut out = Vec::new();
    for (qa, qb) in a.quantities.iter().zip(&b.quantities) {
        if qa.name != qb.name {
            return Err(Error::EnsembleMismatch(format!(
                "quantity mismatch: {} vs {}",
                qa.name, qb.name
            )));
        }
        let percentile_deltas = PERCENTILES
            .iter()
            .map(|&p| (p, qa.percentile(p) - qb.percentile(p)))
            .collect();
        out.push(QuantityComparison {
            quantity: qa.name.clone(),
            median_a: qa.median(),
            median_b: qb.median(),
            median_delta: qa.median() - qb.median(),
            percentile_deltas,
            bootstrap_fraction_a_greater: bootstrap_median_fraction(&qa.sorted_values, &qb.sorted_values),
            bootstrap_resamples: BOOTSTRAP_RESAMPLES,
        });
    }
    Ok(ComparisonReport { quantities: out })
}

/// Controls for the exhaustive phase-grid searches.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridOracleSpec {
    /// Phase quantization levels per entry.
    pub levels: usize,
    /// Evaluation-count guard.
    pub max_evaluations: u64,
}

impl Default for GridOracleSpec {
    fn default() -> Self {
        Self { levels: 16, max_evaluations: GRID_EVAL_LIMIT }
    }
}

/// All unit vectors whose entries are either zero or share one magnitude
/// with a phase from the `levels`-point grid; the first nonzero entry is
/// pinned to phase zero (a global phase never changes the objectives).
fn grid_vectors(len: usize, levels: usize) -> Vec<Vec<C64>> {
    let phases: Vec<C64> = (0..levels)
        .map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / levels as f64))
        .collect();
    let mut out = Vec::new();
    for first in 0..len {
        let tail = len - first - 1;
        let combos = (levels as u64 + 1).pow(tail as u32);
        for combo in 0..combos {
            let mut v = vec![C64::new(0.0, 0.0); len];
            v[first] = C64::new(1.0, 0.0);
            let mut c = combo;
            for j in 0..tail {
                let d = (c % (levels as u64 + 1)) as usize;
                c /= levels as u64 + 1;
                if d > 0 {
                    v[first + 1 + j] = phases[d - 1];
                }
            }
            normalize(&mut v).expect("grid vector has a unit entry");
            out.push(v);
        }
    }
    out
}

fn grid_vector_count(len: usize, levels: usize) -> u128 {
    (0..len).map(|first| (levels as u128 + 1).pow((len - first - 1) as u32)).sum()
}

fn check_grid(total: u128, limit: u64) -> Result<()> {
    if total > limit as u128 {
        return Err(Error::GridTooLarge { estimated: total, limit });
    }
    Ok(())
}

/// Best beam pair over the phase grid; result of [`grid_oracle_fir`].
#[derive(Debug, Clone, Serialize)]
pub struct GridFirResult {
    pub best: f64,
    pub u: Vec<(f64, f64)>,
    pub v: Vec<(f64, f64)>,
    pub evaluations: u64,
}

/// Exhaustive lower bound on `max ‖h‖` over the quantized-phase grid.
pub fn grid_oracle_fir(t: &ChannelTensor, spec: &GridOracleSpec) -> Result<GridFirResult> {
    if spec.levels < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2 phase levels".into()));
    }
    let n_count = grid_vector_count(t.tx(), spec.levels);
    let m_count = grid_vector_count(t.rx(), spec.levels);
    check_grid(n_count * m_count, spec.max_evaluations)?;

    let us = grid_vectors(t.tx(), spec.levels);
    let vs = grid_vectors(t.rx(), spec.levels);
    let mut best = -1.0;
    let mut best_u = &us[0];
    let mut best_v = &vs[0];
    let mut evals = 0u64;
    for u in &us {
        // g_p = H_pᴴu, so each ‖h‖² is Σ_p |g_pᴴ v|².
        let g: Vec<Vec<C64>> = t.slices().iter().map(|hp| hp.h_matvec(u)).collect();
        for v in &vs {
            let val = g.iter().map(|gp| vdot(gp, v).norm_sqr()).sum::<f64>().sqrt();
            evals += 1;
            if val > best {
                best = val;
                best_u = u;
                best_v = v;
            }
        }
    }
    Ok(GridFirResult {
        best,
        u: best_u.iter().map(|z| (z.re, z.im)).collect(),
        v: best_v.iter().map(|z| (z.re, z.im)).collect(),
        evaluations: evals,
    })
}

/// Best split beam set over the phase grid; result of [`grid_oracle_det`].
#[derive(Debug, Clone, Serialize)]
pub struct GridDetResult {
    pub best: f64,
    pub u1: Vec<(f64, f64)>,
    pub u2: Vec<(f64, f64)>,
    pub v1: Vec<(f64, f64)>,
    pub v2: Vec<(f64, f64)>,
    pub evaluations: u64,
}

/// Exhaustive lower bound on `max |det Ξ|` over the quantized-phase grid.
pub fn grid_oracle_det(
    h: &ChannelMatrix,
    part: &BlockPartition,
    spec: &GridOracleSpec,
) -> Result<GridDetResult> {
    if spec.levels < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2 phase levels".into()));
    }
    let blocks = matrix_blocks(h, part)?;
    let counts = [
        grid_vector_count(part.m1, spec.levels),
        grid_vector_count(part.m2, spec.levels),
        grid_vector_count(part.n1, spec.levels),
        grid_vector_count(part.n2, spec.levels),
    ];
    check_grid(counts.iter().product(), spec.max_evaluations)?;

    let v1s = grid_vectors(part.m1, spec.levels);
    let v2s = grid_vectors(part.m2, spec.levels);
    let u1s = grid_vectors(part.n1, spec.levels);
    let u2s = grid_vectors(part.n2, spec.levels);
    let mut best = -1.0;
    let mut arg = (0usize, 0usize, 0usize, 0usize);
    let mut evals = 0u64;
    for (i1, v1) in v1s.iter().enumerate() {
        let h11v1 = blocks[0].matvec(v1);
        let h21v1 = blocks[2].matvec(v1);
        for (i2, v2) in v2s.iter().enumerate() {
            let h12v2 = blocks[1].matvec(v2);
            let h22v2 = blocks[3].matvec(v2);
            for (j1, u1) in u1s.iter().enumerate() {
                let alpha = vdot(u1, &h11v1);
                let gamma = vdot(u1, &h12v2);
                for (j2, u2) in u2s.iter().enumerate() {
                    let det = alpha * vdot(u2, &h22v2) - gamma * vdot(u2, &h21v1);
                    evals += 1;
                    if det.norm() > best {
                        best = det.norm();
                        arg = (j1, j2, i1, i2);
                    }
                }
            }
        }
    }
    let pack = |v: &[C64]| v.iter().map(|z| (z.re, z.im)).collect();
    Ok(GridDetResult {
        best,
        u1: pack(&u1s[arg.0]),
        u2: pack(&u2s[arg.1]),
        v1: pack(&v1s[arg.2]),
        v2: pack(&v2s[arg.3]),
        evaluations: evals,
    })
}
