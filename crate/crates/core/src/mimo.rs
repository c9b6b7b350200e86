//! Multi-stream beamforming.
//!
//! Two analog architectures are supported:
//!
//! - **Shared** ([`als_shared`]): every antenna carries a weighted sum of all
//!   K streams. Alternating eigen-steps grow the frame objective
//!   `Σ_p ‖Uᴴ H_p V‖²_F`; each half step takes the exact top-K singular
//!   subspace of a slice stack, so the trace is monotone.
//! - **Split** ([`als_split_matrix`], [`als_split_tensor`]): the arrays are
//!   partitioned and each half carries one stream (K = 2). The objective is
//!   the magnitude of the effective 2×2 channel determinant, accumulated
//!   over taps; each half step is a warm-started rank-1 fit of the
//!   determinant coupling matrix, so the `|det|` trace is monotone too.
//!
//! Per-tap singular values of the effective channel feed [`greedy_pairing`],
//! which balances accumulated stream powers tap by tap.

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::channel::{BeamVector, BlockPartition, ChannelMatrix, ChannelTensor};
use crate::error::{Error, Result};
use crate::linalg::{normalize, svd, vdot, CMat, C64};
use crate::siso::SolverConfig;

/// K unit-norm beam columns over one antenna array.
#[derive(Debug, Clone, Serialize)]
pub struct BeamMatrix {
    columns: Vec<BeamVector>,
}

impl BeamMatrix {
    pub fn from_columns(columns: Vec<BeamVector>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidDimension("beam matrix needs at least one column".into()));
        }
        let len = columns[0].len();
        if columns.iter().any(|c| c.len() != len) {
            return Err(Error::LengthMismatch("beam matrix columns differ in length".into()));
        }
        Ok(Self { columns })
    }

    fn from_mat(mat: &CMat, streams: usize) -> Result<Self> {
        let columns = (0..streams)
            .map(|k| BeamVector::canonical(mat.col(k)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(columns)
    }

    pub fn antennas(&self) -> usize {
        self.columns[0].len()
    }

    pub fn streams(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &BeamVector {
        &self.columns[k]
    }

    pub fn to_mat(&self) -> CMat {
        CMat::from_fn(self.antennas(), self.streams(), |r, c| self.columns[c].entries()[r])
    }
}

/// The four beam vectors of a 2×2 split architecture.
///
/// `u1`, `u2`, `v2` follow the canonical phase convention; `v1`'s phase is
/// pinned so the effective determinant comes out real nonnegative.
#[derive(Debug, Clone, Serialize)]
pub struct SplitBeamSet {
    pub u1: BeamVector,
    pub u2: BeamVector,
    pub v1: BeamVector,
    pub v2: BeamVector,
}

/// Beams of either architecture.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MimoBeams {
    Shared { tx: BeamMatrix, rx: BeamMatrix },
    Split(SplitBeamSet),
}

/// Beamformed K×K channel, one slice per tap, with per-slice singular
/// values sorted descending.
#[derive(Debug, Clone)]
pub struct EffectiveMimoChannel {
    slices: Vec<CMat>,
    singular_values: Vec<Vec<f64>>,
}

impl EffectiveMimoChannel {
    pub fn from_slices(slices: Vec<CMat>) -> Self {
        let singular_values = slices.iter().map(|s| svd(s).singular_values).collect();
        Self { slices, singular_values }
    }

    pub fn slices(&self) -> &[CMat] {
        &self.slices
    }

    pub fn taps(&self) -> usize {
        self.slices.len()
    }

    pub fn streams(&self) -> usize {
        self.slices[0].rows()
    }

    /// `σ_{p,k}`, descending in `k` for each tap `p`.
    pub fn singular_values(&self) -> &[Vec<f64>] {
        &self.singular_values
    }
}

impl Serialize for EffectiveMimoChannel {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let k = self.streams();
        let p = self.taps();
        let mut re = Vec::with_capacity(k * k * p);
        let mut im = Vec::with_capacity(k * k * p);
        for s in &self.slices {
            for c in 0..k {
                for r in 0..k {
                    re.push(s[(r, c)].re);
                    im.push(s[(r, c)].im);
                }
            }
        }
        let mut out = ser.serialize_struct("EffectiveMimoChannel", 6)?;
        out.serialize_field("n", &k)?;
        out.serialize_field("m", &k)?;
        out.serialize_field("p", &p)?;
        out.serialize_field("re", &re)?;
        out.serialize_field("im", &im)?;
        out.serialize_field("singular_values", &self.singular_values)?;
        out.end()
    }
}

/// Converged multi-stream beams, effective channel, and pairing.
#[derive(Debug, Clone, Serialize)]
pub struct MimoResult {
    pub beams: MimoBeams,
    pub effective: EffectiveMimoChannel,
    /// Shared: `Σ_p ‖UᴴH_pV‖²_F`. Split: `|Σ_p det Ξ_p|`. Non-decreasing.
    pub objective_trace: Vec<f64>,
    /// Per-stream equivalent powers after greedy pairing, stream-indexed.
    pub stream_powers: Vec<f64>,
    /// `pairing[p][rank]` = stream that received the rank-th largest
    /// singular value of tap `p`.
    pub pairing: Vec<Vec<usize>>,
    pub iterations_used: usize,
    pub converged: bool,
}

impl MimoResult {
    /// `√(stream power)` sorted descending: the per-stream equivalent
    /// singular values (stronger stream first).
    pub fn stream_amplitudes_desc(&self) -> Vec<f64> {
        let mut amps: Vec<f64> = self.stream_powers.iter().map(|p| p.sqrt()).collect();
        amps.sort_by(|a, b| b.partial_cmp(a).unwrap());
        amps
    }
}

/// Greedy per-tap assignment of singular values to streams.
///
/// Taps are processed in input order. Within a tap, values are taken in
/// descending order and handed to streams in ascending order of power
/// accumulated over the previous taps (ties broken by stream index).
pub fn greedy_pairing(per_tap: &[Vec<f64>], streams: usize) -> Result<PairingResult> {
    if streams == 0 {
        return Err(Error::InvalidDimension("stream count must be at least 1".into()));
    }
    for (p, vals) in per_tap.iter().enumerate() {
        if vals.len() != streams {
            return Err(Error::LengthMismatch(format!(
                "tap {p} carries {} singular values, expected {streams}",
                vals.len()
            )));
        }
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NonFinite(format!("tap {p} singular values must be finite and nonnegative")));
        }
    }
    let mut powers = vec![0.0_f64; streams];
    let mut assignment = Vec::with_capacity(per_tap.len());
    for vals in per_tap {
        let mut desc = vals.clone();
        desc.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut order: Vec<usize> = (0..streams).collect();
        order.sort_by(|&a, &b| powers[a].partial_cmp(&powers[b]).unwrap().then(a.cmp(&b)));
        for (rank, &stream) in order.iter().enumerate() {
            powers[stream] += desc[rank] * desc[rank];
        }
        assignment.push(order);
    }
    Ok(PairingResult { stream_powers: powers, assignment })
}

/// Output of [`greedy_pairing`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingResult {
    pub stream_powers: Vec<f64>,
    pub assignment: Vec<Vec<usize>>,
}

/// Sum-rate proxy `Σ_k log₂(1 + σ_k² χ)` where `chi` is the transmit-power
/// to receive-noise ratio.
pub fn capacity_proxy(stream_sigmas: &[f64], chi: f64) -> f64 {
    assert!(chi > 0.0, "chi must be positive");
    stream_sigmas.iter().map(|s| (1.0 + s * s * chi).log2()).sum()
}

/// High-SNR two-stream approximation `2log₂(σ₁σ₂) + 2log₂χ`.
pub fn capacity_high_snr_k2(sigma1: f64, sigma2: f64, chi: f64) -> f64 {
    assert!(chi > 0.0, "chi must be positive");
    2.0 * (sigma1 * sigma2).log2() + 2.0 * chi.log2()
}

/// Ideal array gain `20log₁₀N + 10log₁₀M` in dB.
pub fn ideal_gain_db(n: usize, m: usize) -> f64 {
    assert!(n >= 1 && m >= 1, "antenna counts must be at least 1");
    20.0 * (n as f64).log10() + 10.0 * (m as f64).log10()
}

/// Blocks `[H11, H12, H21, H22]` of a partitioned matrix channel.
pub fn matrix_blocks(h: &ChannelMatrix, part: &BlockPartition) -> Result<[CMat; 4]> {
    part.check_matches(h.tx(), h.rx())?;
    let m = h.as_mat();
    Ok([
        m.block(0, 0, part.n1, part.m1),
        m.block(0, part.m1, part.n1, part.m2),
        m.block(part.n1, 0, part.n2, part.m1),
        m.block(part.n1, part.m1, part.n2, part.m2),
    ])
}

fn tensor_blocks(t: &ChannelTensor, part: &BlockPartition) -> Result<[Vec<CMat>; 4]> {
    part.check_matches(t.tx(), t.rx())?;
    let mut out: [Vec<CMat>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for hp in t.slices() {
        out[0].push(hp.block(0, 0, part.n1, part.m1));
        out[1].push(hp.block(0, part.m1, part.n1, part.m2));
        out[2].push(hp.block(part.n1, 0, part.n2, part.m1));
        out[3].push(hp.block(part.n1, part.m1, part.n2, part.m2));
    }
    Ok(out)
}

/// The N₁×N₂ coupling matrix `A = (H₁₁v₁)(H₂₂v₂)ᵀ − (H₁₂v₂)(H₂₁v₁)ᵀ`
/// satisfying `det Ξ = u₁ᴴ A u₂*`. A sum of two outer products, so its
/// rank never exceeds 2.
pub fn build_det_matrix(blocks: &[CMat; 4], v1: &[C64], v2: &[C64]) -> Result<CMat> {
    let [h11, h12, h21, h22] = blocks;
    if h11.rows() != h12.rows() || h21.rows() != h22.rows() || h11.cols() != h21.cols() || h12.cols() != h22.cols() {
        return Err(Error::InvalidPartition("block shapes are inconsistent".into()));
    }
    if v1.len() != h11.cols() || v2.len() != h12.cols() {
        return Err(Error::LengthMismatch(format!(
            "v1/v2 lengths {}/{} do not match receive blocks {}/{}",
            v1.len(),
            v2.len(),
            h11.cols(),
            h12.cols()
        )));
    }
    let mut a = CMat::outer(&h11.matvec(v1), &h22.matvec(v2));
    a.add_outer(C64::new(-1.0, 0.0), &h12.matvec(v2), &h21.matvec(v1));
    Ok(a)
}

/// The 2×2 effective channel of Eq-style block form:
/// `Ξ_p = [[u₁ᴴH₁₁v₁, u₁ᴴH₁₂v₂], [u₂ᴴH₂₁v₁, u₂ᴴH₂₂v₂]]` for one tap.
fn effective_split_slice(
    blocks: &[Vec<CMat>; 4],
    p: usize,
    u1: &[C64],
    u2: &[C64],
    v1: &[C64],
    v2: &[C64],
) -> CMat {
    let mut x = CMat::zeros(2, 2);
    x[(0, 0)] = vdot(u1, &blocks[0][p].matvec(v1));
    x[(0, 1)] = vdot(u1, &blocks[1][p].matvec(v2));
    x[(1, 0)] = vdot(u2, &blocks[2][p].matvec(v1));
    x[(1, 1)] = vdot(u2, &blocks[3][p].matvec(v2));
    x
}

fn det2(x: &CMat) -> C64 {
    x[(0, 0)] * x[(1, 1)] - x[(0, 1)] * x[(1, 0)]
}

fn conj_vec(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| z.conj()).collect()
}

fn uniform_unit(len: usize) -> Vec<C64> {
    vec![C64::new(1.0 / (len as f64).sqrt(), 0.0); len]
}

/// Shared-architecture ALS for K streams over a tensor channel. Pass a
/// single-slice tensor for the frequency-flat case.
pub fn als_shared(t: &ChannelTensor, streams: usize, cfg: &SolverConfig) -> Result<MimoResult> {
    cfg.validate()?;
    let (n, m) = (t.tx(), t.rx());
    if streams == 0 || streams > n.min(m) {
        return Err(Error::InvalidConfig(format!(
            "stream count {streams} must satisfy 1 <= K <= min(N, M) = {}",
            n.min(m)
        )));
    }
    // Spectral start: top-K right singular vectors of the slice stack.
    let stacked = CMat::vstack(t.slices().iter());
    let init = svd(&stacked);
    let mut v_mat = init.v.block(0, 0, m, streams);
    let mut u_mat = CMat::zeros(n, streams);

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut prev = 0.0;
    for it in 1..=cfg.max_iterations {
        iterations = it;
        // Transmit step: top-K left singular subspace of F = [H₁V, …, H_PV],
        // i.e. the top eigenvectors of D = Σ_p H_pVVᴴH_pᴴ.
        let hv: Vec<CMat> = t.slices().iter().map(|hp| hp.mul(&v_mat)).collect();
        let f = CMat::hstack(hv.iter());
        u_mat = svd(&f).u.block(0, 0, n, streams);
        // Receive step: top-K right singular subspace of G = [UᴴH₁; …; UᴴH_P],
        // i.e. the top eigenvectors of E = Σ_p H_pᴴUUᴴH_p.
        let uh = u_mat.conj_transpose();
        let uhp: Vec<CMat> = t.slices().iter().map(|hp| uh.mul(hp)).collect();
        let g = CMat::vstack(uhp.iter());
        v_mat = svd(&g).v.block(0, 0, m, streams);

        let objective: f64 = uhp.iter().map(|b| b.mul(&v_mat).frob_norm().powi(2)).sum();
        trace.push(objective);
        if objective == 0.0 {
            break;
        }
        if (objective - prev).abs() < cfg.tolerance * objective {
            converged = true;
            break;
        }
        prev = objective;
    }

    let tx = BeamMatrix::from_mat(&u_mat, streams)?;
    let rx = BeamMatrix::from_mat(&v_mat, streams)?;
    let (u_canon, v_canon) = (tx.to_mat(), rx.to_mat());
    let uh = u_canon.conj_transpose();
    let x_slices: Vec<CMat> = t.slices().iter().map(|hp| uh.mul(hp).mul(&v_canon)).collect();
    let effective = EffectiveMimoChannel::from_slices(x_slices);
    let paired = greedy_pairing(effective.singular_values(), streams)?;
    Ok(MimoResult {
        beams: MimoBeams::Shared { tx, rx },
        effective,
        objective_trace: trace,
        stream_powers: paired.stream_powers,
        pairing: paired.assignment,
        iterations_used: iterations,
        converged,
    })
}

/// Split-architecture ALS on a frequency-flat channel: maximizes
/// `|det Ξ| = σ₁(Ξ)σ₂(Ξ)` over the four partitioned beam vectors.
pub fn als_split_matrix(h: &ChannelMatrix, part: &BlockPartition, cfg: &SolverConfig) -> Result<MimoResult> {
    let t = h.clone().into_tensor();
    als_split_tensor(&t, part, cfg)
}

/// Split-architecture ALS on a tensor channel: maximizes `|Σ_p det Ξ_p|`.
/// With P = 1 this is exactly the matrix algorithm.
pub fn als_split_tensor(t: &ChannelTensor, part: &BlockPartition, cfg: &SolverConfig) -> Result<MimoResult> {
    cfg.validate()?;
    let blocks = tensor_blocks(t, part)?;
    let taps = t.taps();
    let (n1, n2, m1, m2) = (part.n1, part.n2, part.m1, part.m2);

    // Spectral start: top-2 right singular vectors of the full slice stack,
    // restricted to their receive blocks and renormalized.
    let stacked = CMat::vstack(t.slices().iter());
    let init = svd(&stacked);
    let mut v1: Vec<C64> = init.v.col(0)[..m1].to_vec();
    if normalize(&mut v1).is_none() {
        v1 = uniform_unit(m1);
    }
    let mut v2: Vec<C64> = init.v.col(1.min(init.v.cols() - 1))[m1..].to_vec();
    if normalize(&mut v2).is_none() {
        v2 = uniform_unit(m2);
    }
    // Warm transmit starts inside the diagonal-block images, so the first
    // rank-1 fit begins in the subspace that carries the signal.
    let mut u1 = {
        let mut acc = vec![C64::new(0.0, 0.0); n1];
        for p in 0..taps {
            for (a, b) in acc.iter_mut().zip(blocks[0][p].matvec(&v1)) {
                *a += b;
            }
        }
        if normalize(&mut acc).is_some() {
            acc
        } else {
            uniform_unit(n1)
        }
    };
    let mut z = {
        let mut acc = vec![C64::new(0.0, 0.0); n2];
        for p in 0..taps {
            for (a, b) in acc.iter_mut().zip(blocks[3][p].matvec(&v2)) {
                *a += b;
            }
        }
        if normalize(&mut acc).is_some() {
            conj_vec(&acc)
        } else {
            conj_vec(&uniform_unit(n2))
        }
    }; // z = u₂*

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut prev = 0.0;
    for it in 1..=cfg.max_iterations {
        iterations = it;
        // Transmit step: rank-1 fit of A, warm-started power iteration
        // alternating u₁ ← Az and z ← Aᴴu₁.
        let mut a = CMat::zeros(n1, n2);
        for p in 0..taps {
            a.add_outer(C64::new(1.0, 0.0), &blocks[0][p].matvec(&v1), &blocks[3][p].matvec(&v2));
            a.add_outer(C64::new(-1.0, 0.0), &blocks[1][p].matvec(&v2), &blocks[2][p].matvec(&v1));
        }
        for _ in 0..cfg.inner_iterations {
            let mut t1 = a.matvec(&z);
            if normalize(&mut t1).is_none() {
                break;
            }
            u1 = t1;
            let mut t2 = a.h_matvec(&u1);
            if normalize(&mut t2).is_none() {
                break;
            }
            z = t2;
        }
        let u2 = conj_vec(&z);
        // Receive step through the mirrored coupling matrix
        // B = Σ_p (H₁₁,ₚᵀu₁*)(H₂₂,ₚᵀu₂*)ᵀ − (H₂₁,ₚᵀu₂*)(H₁₂,ₚᵀu₁*)ᵀ,
        // fit as λ·v₁*v₂ᵀ* so the objective is |v₁ᵀBv₂|.
        let mut b = CMat::zeros(m1, m2);
        for p in 0..taps {
            let c11 = conj_vec(&blocks[0][p].h_matvec(&u1)); // H₁₁ᵀu₁*
            let c22 = conj_vec(&blocks[3][p].h_matvec(&u2));
            let c21 = conj_vec(&blocks[2][p].h_matvec(&u2));
            let c12 = conj_vec(&blocks[1][p].h_matvec(&u1));
            b.add_outer(C64::new(1.0, 0.0), &c11, &c22);
            b.add_outer(C64::new(-1.0, 0.0), &c21, &c12);
        }
        let mut w = conj_vec(&v1); // w = v₁*
        let mut lambda = 0.0;
        for _ in 0..cfg.inner_iterations {
            let mut t1 = b.matvec(&v2);
            if normalize(&mut t1).is_none() {
                break;
            }
            w = t1;
            let mut t2 = b.h_matvec(&w);
            match normalize(&mut t2) {
                Some(s) => {
                    lambda = s;
                    v2 = t2;
                }
                None => break,
            }
        }
        v1 = conj_vec(&w);
        trace.push(lambda);
        if lambda == 0.0 {
            break;
        }
        if (lambda - prev).abs() < cfg.tolerance * lambda {
            converged = true;
            break;
        }
        prev = lambda;
    }

    let u1b = BeamVector::canonical(u1)?;
    let u2b = BeamVector::canonical(conj_vec(&z))?;
    let v2b = BeamVector::canonical(v2)?;
    normalize(&mut v1);
    // Pin v₁'s phase so the accumulated determinant is real nonnegative.
    let det_sum: C64 = (0..taps)
        .map(|p| det2(&effective_split_slice(&blocks, p, u1b.entries(), u2b.entries(), &v1, v2b.entries())))
        .sum();
    if det_sum.norm() > 0.0 {
        let rot = det_sum.conj() / det_sum.norm();
        for zv in v1.iter_mut() {
            *zv *= rot;
        }
    }
    let v1b = BeamVector::unit(v1)?;

    let x_slices: Vec<CMat> = (0..taps)
        .map(|p| effective_split_slice(&blocks, p, u1b.entries(), u2b.entries(), v1b.entries(), v2b.entries()))
        .collect();
    let effective = EffectiveMimoChannel::from_slices(x_slices);
    let paired = greedy_pairing(effective.singular_values(), 2)?;
    Ok(MimoResult {
        beams: MimoBeams::Split(SplitBeamSet { u1: u1b, u2: u2b, v1: v1b, v2: v2b }),
        effective,
        objective_trace: trace,
        stream_powers: paired.stream_powers,
        pairing: paired.assignment,
        iterations_used: iterations,
        converged,
    })
}
