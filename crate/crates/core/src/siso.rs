//! Single-stream beamforming solvers.
//!
//! Three ways to maximize the beamformed channel power with unit transmit
//! and receive weight vectors:
//!
//! - [`power_method`]: classic power iteration on a frequency-flat matrix,
//!   alternating `u ← Hv` and `v ← Hᴴu` with normalization.
//! - [`als_tensor`]: alternating least squares on a tensor channel. Each
//!   half step runs a capped eigen-iteration on the Hermitian accumulation
//!   `Σ_p (H_p v)(H_p v)ᴴ` (resp. its receive-side mirror), warm-started
//!   from the current vector so the objective never decreases.
//! - [`hopm`]: higher-order power method; adds an explicit unit tap-weight
//!   vector `h̃ = h/‖h‖` and takes one power step per factor per iteration.
//!   Converges to the same fixed points as ALS but more slowly.
//!
//! Solvers stop when the relative objective change drops below
//! `SolverConfig::tolerance` or after `max_iterations`. Optional random
//! restarts re-run from seeded random unit vectors and keep the best
//! objective.

use serde::{Deserialize, Serialize};

use crate::channel::{BeamVector, ChannelMatrix, ChannelTensor};
use crate::error::{Error, Result};
use crate::linalg::{normalize, svd, vdot, CMat, C64};
use crate::rng::SplitMix64;

/// Default seed for restart vectors; any fixed value keeps runs reproducible.
pub const DEFAULT_RESTART_SEED: u64 = 0x5EED_BEA3;

/// Iteration controls shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Outer-iteration cap.
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Relative objective-change threshold for declaring convergence.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Extra runs from random initial vectors; the best objective wins.
    #[serde(default)]
    pub restarts: usize,
    /// Cap on the nested least-squares (eigen/power) iterations per half step.
    #[serde(default = "default_inner_iterations")]
    pub inner_iterations: usize,
    /// Seed for the restart vector stream.
    #[serde(default = "default_restart_seed")]
    pub restart_seed: u64,
}

fn default_max_iterations() -> usize {
    8
}
fn default_tolerance() -> f64 {
    1e-9
}
fn default_inner_iterations() -> usize {
    4
}
fn default_restart_seed() -> u64 {
    DEFAULT_RESTART_SEED
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: default_max_iterations(),
            tolerance: default_tolerance(),
            restarts: 0,
            inner_iterations: default_inner_iterations(),
            restart_seed: default_restart_seed(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.inner_iterations == 0 {
            return Err(Error::InvalidConfig("inner_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Converged single-stream beams and the objective history.
#[derive(Debug, Clone, Serialize)]
pub struct SisoResult {
    pub u: BeamVector,
    pub v: BeamVector,
    /// Largest singular value or its tensor equivalent `‖h‖`.
    pub sigma: f64,
    /// Objective value after each outer iteration; non-decreasing.
    pub objective_trace: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

fn axpy(acc: &mut [C64], s: C64, x: &[C64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += s * b;
    }
}

fn uniform_unit(len: usize) -> Vec<C64> {
    vec![C64::new(1.0 / (len as f64).sqrt(), 0.0); len]
}

/// Top right singular vector of the slice stack `[H₁ᵀ, H₂ᵀ, …]ᵀ`; the
/// spectral starting point for the receive vector.
pub fn spectral_init_v(slices: &[CMat]) -> Vec<C64> {
    let stacked = CMat::vstack(slices.iter());
    svd(&stacked).v.col(0)
}

/// Top left singular vector of the row stack `[H₁, H₂, …]`; the spectral
/// starting point for the transmit vector.
pub fn spectral_init_u(slices: &[CMat]) -> Vec<C64> {
    let stacked = CMat::hstack(slices.iter());
    svd(&stacked).u.col(0)
}

fn check_v0(v0: Option<&BeamVector>, rx: usize) -> Result<()> {
    if let Some(v) = v0 {
        if v.len() != rx {
            return Err(Error::LengthMismatch(format!(
                "initial v has {} entries, channel has {rx} receive antennas",
                v.len()
            )));
        }
    }
    Ok(())
}

fn finish(u: Vec<C64>, v: Vec<C64>, trace: Vec<f64>, iterations: usize, converged: bool) -> Result<SisoResult> {
    let sigma = trace.last().copied().unwrap_or(0.0);
    Ok(SisoResult {
        u: BeamVector::canonical(u)?,
        v: BeamVector::canonical(v)?,
        sigma,
        objective_trace: trace,
        iterations_used: iterations,
        converged,
    })
}

fn better(best: &Option<SisoResult>, candidate: &SisoResult) -> bool {
    best.as_ref().map_or(true, |b| candidate.sigma > b.sigma)
}

/// Power iteration for the dominant singular triplet of a matrix channel.
///
/// Default start is the deterministic uniform vector; restarts draw random
/// unit vectors from the config's seeded stream. A zero channel returns
/// `sigma = 0` with `converged = false` and the vectors left at their
/// initialization.
pub fn power_method(h: &ChannelMatrix, cfg: &SolverConfig, v0: Option<&BeamVector>) -> Result<SisoResult> {
    cfg.validate()?;
    check_v0(v0, h.rx())?;
    let mut rng = SplitMix64::new(cfg.restart_seed);
    let mut best: Option<SisoResult> = None;
    for run in 0..=cfg.restarts {
        let start = if run == 0 {
            v0.map(|v| v.entries().to_vec()).unwrap_or_else(|| uniform_unit(h.rx()))
        } else {
            rng.next_unit_vector(h.rx())
        };
        let res = power_run(h.as_mat(), cfg, start)?;
        if better(&best, &res) {
            best = Some(res);
        }
    }
    Ok(best.unwrap())
}

fn power_run(h: &CMat, cfg: &SolverConfig, v_init: Vec<C64>) -> Result<SisoResult> {
    let mut v = v_init;
    let mut u = uniform_unit(h.rows());
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut prev = 0.0;
    for k in 1..=cfg.max_iterations {
        iterations = k;
        let mut ut = h.matvec(&v);
        if normalize(&mut ut).is_none() {
            trace.push(0.0);
            break;
        }
        u = ut;
        let mut vt = h.h_matvec(&u);
        let sigma = match normalize(&mut vt) {
            Some(s) => s,
            None => {
                trace.push(0.0);
                break;
            }
        };
        v = vt;
        trace.push(sigma);
        if (sigma - prev).abs() < cfg.tolerance * sigma {
            converged = true;
            break;
        }
        prev = sigma;
    }
    finish(u, v, trace, iterations, converged)
}

/// Alternating least squares for the dominant rank-1 beamforming of a
/// tensor channel, maximizing `‖h‖` with `h_p = uᴴ H_p v`.
pub fn als_tensor(t: &ChannelTensor, cfg: &SolverConfig, v0: Option<&BeamVector>) -> Result<SisoResult> {
    cfg.validate()?;
    check_v0(v0, t.rx())?;
    let mut rng = SplitMix64::new(cfg.restart_seed);
    let mut best: Option<SisoResult> = None;
    for run in 0..=cfg.restarts {
        let start = if run == 0 {
            v0.map(|v| v.entries().to_vec()).unwrap_or_else(|| spectral_init_v(t.slices()))
        } else {
            rng.next_unit_vector(t.rx())
        };
        let res = als_run(t, cfg, start)?;
        if better(&best, &res) {
            best = Some(res);
        }
    }
    Ok(best.unwrap())
}

fn als_run(t: &ChannelTensor, cfg: &SolverConfig, v_init: Vec<C64>) -> Result<SisoResult> {
    let n = t.tx();
    let mut v = v_init;
    // Warm start inside the active transmit subspace (the P = 1 case makes
    // this the power method's own first half step); later iterations warm
    // from the previous u.
    let mut u = {
        let mut acc = vec![C64::new(0.0, 0.0); n];
        for hp in t.slices() {
            axpy(&mut acc, C64::new(1.0, 0.0), &hp.matvec(&v));
        }
        if normalize(&mut acc).is_some() {
            acc
        } else {
            uniform_unit(n)
        }
    };
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut prev = 0.0;
    for k in 1..=cfg.max_iterations {
        iterations = k;
        // Transmit half step: power-iterate u on Σ_p (H_p v)(H_p v)ᴴ.
        let a: Vec<Vec<C64>> = t.slices().iter().map(|hp| hp.matvec(&v)).collect();
        for _ in 0..cfg.inner_iterations {
            let mut un = vec![C64::new(0.0, 0.0); n];
            for ap in &a {
                axpy(&mut un, vdot(ap, &u), ap);
            }
            if normalize(&mut un).is_none() {
                break;
            }
            u = un;
        }
        // Receive half step, mirrored through c_p = H_pᴴ u.
        let c: Vec<Vec<C64>> = t.slices().iter().map(|hp| hp.h_matvec(&u)).collect();
        for _ in 0..cfg.inner_iterations {
            let mut vn = vec![C64::new(0.0, 0.0); v.len()];
            for cp in &c {
                axpy(&mut vn, vdot(cp, &v), cp);
            }
            if normalize(&mut vn).is_none() {
                break;
            }
            v = vn;
        }
        let sigma = c.iter().map(|cp| vdot(cp, &v).norm_sqr()).sum::<f64>().sqrt();
        trace.push(sigma);
        if sigma == 0.0 {
            break;
        }
        if (sigma - prev).abs() < cfg.tolerance * sigma {
            converged = true;
            break;
        }
        prev = sigma;
    }
    finish(u, v, trace, iterations, converged)
}

/// Higher-order power method for the same tensor objective as
/// [`als_tensor`], with the explicit per-tap weight vector `h̃`.
pub fn hopm(
    t: &ChannelTensor,
    cfg: &SolverConfig,
    u0: Option<&BeamVector>,
    v0: Option<&BeamVector>,
) -> Result<SisoResult> {
    cfg.validate()?;
    check_v0(v0, t.rx())?;
    if let Some(u) = u0 {
        if u.len() != t.tx() {
            return Err(Error::LengthMismatch(format!(
                "initial u has {} entries, channel has {} transmit antennas",
                u.len(),
                t.tx()
            )));
        }
    }
    let mut rng = SplitMix64::new(cfg.restart_seed);
    let mut best: Option<SisoResult> = None;
    for run in 0..=cfg.restarts {
        let (us, vs) = if run == 0 {
            (
                u0.map(|u| u.entries().to_vec()).unwrap_or_else(|| spectral_init_u(t.slices())),
                v0.map(|v| v.entries().to_vec()).unwrap_or_else(|| spectral_init_v(t.slices())),
            )
        } else {
            (rng.next_unit_vector(t.tx()), rng.next_unit_vector(t.rx()))
        };
        let res = hopm_run(t, cfg, us, vs)?;
        if better(&best, &res) {
            best = Some(res);
        }
    }
    Ok(best.unwrap())
}

fn hopm_run(t: &ChannelTensor, cfg: &SolverConfig, u_init: Vec<C64>, v_init: Vec<C64>) -> Result<SisoResult> {
    let n = t.tx();
    let mut u = u_init;
    let mut v = v_init;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut prev = 0.0;
    for k in 1..=cfg.max_iterations {
        iterations = k;
        // Tap weights h̃ from the current beams.
        let hv: Vec<Vec<C64>> = t.slices().iter().map(|hp| hp.matvec(&v)).collect();
        let mut ht: Vec<C64> = hv.iter().map(|x| vdot(&u, x)).collect();
        if normalize(&mut ht).is_none() {
            trace.push(0.0);
            break;
        }
        // One power step per factor: ũ = Σ_p h̃*_p (H_p v), then the receive
        // side v ← Σ_p h̃_p (H_pᴴ u) with σ its norm.
        let mut ut = vec![C64::new(0.0, 0.0); n];
        for (w, x) in ht.iter().zip(&hv) {
            axpy(&mut ut, w.conj(), x);
        }
        if normalize(&mut ut).is_none() {
            trace.push(0.0);
            break;
        }
        u = ut;
        let mut w = vec![C64::new(0.0, 0.0); v.len()];
        for (hw, hp) in ht.iter().zip(t.slices()) {
            axpy(&mut w, *hw, &hp.h_matvec(&u));
        }
        let sigma = match normalize(&mut w) {
            Some(s) => s,
            None => {
                trace.push(0.0);
                break;
            }
        };
        v = w;
        trace.push(sigma);
        if (sigma - prev).abs() < cfg.tolerance * sigma {
            converged = true;
            break;
        }
        prev = sigma;
    }
    finish(u, v, trace, iterations, converged)
}
