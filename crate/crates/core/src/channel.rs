//! Channel containers, tensor mode products, beamformed-channel evaluation,
//! and seeded random channel generation.
//!
//! A frequency-flat channel is an `N×M` complex matrix `H` (rows index
//! transmit antennas, columns receive antennas). A frequency-selective
//! channel is an `N×M×P` tensor stored slice-major as `P` matrices `H_p`;
//! the tap index `p` is an opaque label, no adjacency between `p` and `p+1`
//! is assumed. Beamforming with unit vectors `u` (transmit) and `v`
//! (receive) turns the tensor into the FIR response `h_p = uᴴ H_p v`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{normalize, svd, vnorm, CMat, Svd};
use crate::rng::SplitMix64;

pub type C64 = Complex64;

fn check_finite(data: &[C64], what: &str) -> Result<()> {
    for (i, z) in data.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(format!("{what} entry {i} = {z}")));
        }
    }
    Ok(())
}

/// Frequency-flat channel matrix `H` (transmit × receive).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    mat: CMat,
}

impl ChannelMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.rows() == 0 || mat.cols() == 0 {
            return Err(Error::InvalidDimension(format!(
                "channel matrix must be at least 1x1, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        check_finite(mat.data(), "channel matrix")?;
        Ok(Self { mat })
    }

    /// Transmit-antenna count N.
    pub fn tx(&self) -> usize {
        self.mat.rows()
    }

    /// Receive-antenna count M.
    pub fn rx(&self) -> usize {
        self.mat.cols()
    }

    pub fn as_mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_tensor(self) -> ChannelTensor {
        ChannelTensor { slices: vec![self.mat] }
    }
}

/// Frequency-selective channel tensor `𝓗`, stored as `P` slice matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    slices: Vec<CMat>,
}

impl ChannelTensor {
    pub fn new(slices: Vec<CMat>) -> Result<Self> {
        if slices.is_empty() {
            return Err(Error::InvalidDimension("tensor needs at least one slice".into()));
        }
        let (n, m) = (slices[0].rows(), slices[0].cols());
        if n == 0 || m == 0 {
            return Err(Error::InvalidDimension(format!(
                "tensor slices must be at least 1x1, got {n}x{m}"
            )));
        }
        for (p, s) in slices.iter().enumerate() {
            if s.rows() != n || s.cols() != m {
                return Err(Error::InvalidDimension(format!(
                    "slice {p} is {}x{}, expected {n}x{m}",
                    s.rows(),
                    s.cols()
                )));
            }
            check_finite(s.data(), &format!("tensor slice {p}"))?;
        }
        Ok(Self { slices })
    }

    pub fn tx(&self) -> usize {
        self.slices[0].rows()
    }

    pub fn rx(&self) -> usize {
        self.slices[0].cols()
    }

    /// Tap count P.
    pub fn taps(&self) -> usize {
        self.slices.len()
    }

    /// Slice matrix `H_p` (zero-based `p`).
    pub fn slice(&self, p: usize) -> &CMat {
        &self.slices[p]
    }

    pub fn slices(&self) -> &[CMat] {
        &self.slices
    }

    /// Total energy `Σ_{n,m,p} |h_{n,m,p}|²`.
    pub fn energy(&self) -> f64 {
        self.slices.iter().map(|s| s.frob_norm().powi(2)).sum()
    }
}

/// Unit-norm beamforming weight vector.
///
/// `canonical` pins the global phase (the largest-magnitude entry is made
/// real nonnegative, ties broken by lowest index) so converged solver
/// outputs are unique. `unit` keeps the caller's phase; split-MIMO results
/// use it for `v₁`, whose phase is pinned by the determinant sign
/// convention instead.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamVector {
    entries: Vec<C64>,
}

impl BeamVector {
    /// Normalize and canonicalize the phase. Errors on a zero vector.
    pub fn canonical(mut entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension("beam vector must be nonempty".into()));
        }
        check_finite(&entries, "beam vector")?;
        normalize(&mut entries)
            .ok_or_else(|| Error::InvalidDimension("beam vector has zero norm".into()))?;
        let mut best = 0;
        for (i, z) in entries.iter().enumerate() {
            if z.norm_sqr() > entries[best].norm_sqr() {
                best = i;
            }
        }
        let phase = entries[best];
        if phase.norm() > 0.0 {
            let rot = phase.conj() / phase.norm();
            for z in entries.iter_mut() {
                *z *= rot;
            }
            // Clear rounding dust on the pinned entry.
            entries[best] = C64::new(entries[best].re.abs(), 0.0);
        }
        Ok(Self { entries })
    }

    /// Accept an already-unit vector without touching its phase.
    pub fn unit(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension("beam vector must be nonempty".into()));
        }
        check_finite(&entries, "beam vector")?;
        let n = vnorm(&entries);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDimension(format!(
                "beam vector norm {n} is not 1 within 1e-12"
            )));
        }
        Ok(Self { entries })
    }

    /// Deterministic uniform vector `(1,…,1)/√len`.
    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidDimension("beam vector must be nonempty".into()));
        }
        let w = C64::new(1.0 / (len as f64).sqrt(), 0.0);
        Ok(Self { entries: vec![w; len] })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }
}

// JSON shape {"re": [...], "im": [...]}, matching the fixture layout.
impl Serialize for BeamVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_complex_slice(&self.entries, ser)
    }
}

fn serialize_complex_slice<S: serde::Serializer>(
    entries: &[C64],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut s = ser.serialize_struct("ComplexVector", 2)?;
    let re: Vec<f64> = entries.iter().map(|z| z.re).collect();
    let im: Vec<f64> = entries.iter().map(|z| z.im).collect();
    s.serialize_field("re", &re)?;
    s.serialize_field("im", &im)?;
    s.end()
}

/// Beamformed FIR response `h` with one complex tap per timing index.
#[derive(Debug, Clone, PartialEq)]
pub struct FirChannel {
    taps: Vec<C64>,
}

impl FirChannel {
    pub fn new(taps: Vec<C64>) -> Self {
        Self { taps }
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn taps(&self) -> &[C64] {
        &self.taps
    }

    /// `‖h‖`, the equivalent singular value of the beamformed channel.
    pub fn norm(&self) -> f64 {
        vnorm(&self.taps)
    }
}

impl Serialize for FirChannel {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_complex_slice(&self.taps, ser)
    }
}

/// 2×2 split of the antenna arrays: transmit `(N₁, N₂)`, receive `(M₁, M₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub n1: usize,
    pub n2: usize,
    pub m1: usize,
    pub m2: usize,
}

impl BlockPartition {
    pub fn new(n1: usize, n2: usize, m1: usize, m2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || m1 == 0 || m2 == 0 {
            return Err(Error::InvalidPartition(format!(
                "all parts must be at least 1, got ({n1},{n2})x({m1},{m2})"
            )));
        }
        Ok(Self { n1, n2, m1, m2 })
    }

    /// Equal split of an `n × m` array; both counts must be even.
    pub fn even(n: usize, m: usize) -> Result<Self> {
        if n < 2 || m < 2 || n % 2 != 0 || m % 2 != 0 {
            return Err(Error::InvalidPartition(format!(
                "equal split needs even antenna counts, got {n}x{m}"
            )));
        }
        Self::new(n / 2, n / 2, m / 2, m / 2)
    }

    pub fn check_matches(&self, tx: usize, rx: usize) -> Result<()> {
        if self.n1 + self.n2 != tx || self.m1 + self.m2 != rx {
            return Err(Error::InvalidPartition(format!(
                "partition ({},{})x({},{}) does not cover a {tx}x{rx} channel",
                self.n1, self.n2, self.m1, self.m2
            )));
        }
        Ok(())
    }
}

/// Operand of a tensor mode product.
pub enum ModeOperand<'a> {
    Matrix(&'a CMat),
    Vector(&'a [C64]),
}

/// Result of a mode product; contracting with a vector drops the reduced
/// dimension, so the result degrades to a matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeProduct {
    Tensor(ChannelTensor),
    Matrix(CMat),
}

impl ModeProduct {
    pub fn expect_matrix(self) -> CMat {
        match self {
            ModeProduct::Matrix(m) => m,
            ModeProduct::Tensor(_) => panic!("expected matrix-valued mode product"),
        }
    }

    pub fn expect_tensor(self) -> ChannelTensor {
        match self {
            ModeProduct::Tensor(t) => t,
            ModeProduct::Matrix(_) => panic!("expected tensor-valued mode product"),
        }
    }
}

/// Contract `tensor` along `mode` (1, 2 or 3) with a matrix or vector.
///
/// With a matrix operand `A` (L×J) the contracted extent L must match the
/// tensor extent along `mode`, and the result is a tensor whose extent along
/// `mode` becomes J; a vector operand drops that dimension. Matrix-operand
/// results, e.g. along mode 2, are `b_{n,j,p} = Σ_l h_{n,l,p} a_{l,j}`.
pub fn mode_multiply(tensor: &ChannelTensor, operand: ModeOperand, mode: usize) -> Result<ModeProduct> {
    let (n, m, p) = (tensor.tx(), tensor.rx(), tensor.taps());
    let dims = [n, m, p];
    if !(1..=3).contains(&mode) {
        return Err(Error::InvalidDimension(format!("mode must be 1, 2 or 3, got {mode}")));
    }
    let tensor_dim = dims[mode - 1];
    let contracted = match &operand {
        ModeOperand::Matrix(a) => a.rows(),
        ModeOperand::Vector(v) => v.len(),
    };
    if contracted != tensor_dim {
        return Err(Error::ModeMismatch {
            mode,
            tensor_dim,
            operand_dim: contracted,
        });
    }

    match operand {
        ModeOperand::Vector(a) => {
            let out = match mode {
                // (𝓗 ×₁ a)_{m,p} = Σ_n h_{n,m,p} a_n
                1 => CMat::from_fn(m, p, |mm, pp| {
                    (0..n).map(|nn| tensor.slice(pp)[(nn, mm)] * a[nn]).sum()
                }),
                // (𝓗 ×₂ a)_{n,p} = Σ_m h_{n,m,p} a_m
                2 => CMat::from_fn(n, p, |nn, pp| {
                    (0..m).map(|mm| tensor.slice(pp)[(nn, mm)] * a[mm]).sum()
                }),
                // (𝓗 ×₃ a)_{n,m} = Σ_p h_{n,m,p} a_p
                _ => CMat::from_fn(n, m, |nn, mm| {
                    (0..p).map(|pp| tensor.slice(pp)[(nn, mm)] * a[pp]).sum()
                }),
            };
            Ok(ModeProduct::Matrix(out))
        }
        ModeOperand::Matrix(a) => {
            let j = a.cols();
            let slices = match mode {
                1 => (0..p)
                    .map(|pp| {
                        CMat::from_fn(j, m, |jj, mm| {
                            (0..n).map(|nn| tensor.slice(pp)[(nn, mm)] * a[(nn, jj)]).sum()
                        })
                    })
                    .collect::<Vec<_>>(),
                2 => (0..p)
                    .map(|pp| {
                        CMat::from_fn(n, j, |nn, jj| {
                            (0..m).map(|mm| tensor.slice(pp)[(nn, mm)] * a[(mm, jj)]).sum()
                        })
                    })
                    .collect::<Vec<_>>(),
                _ => (0..j)
                    .map(|jj| {
                        CMat::from_fn(n, m, |nn, mm| {
                            (0..p).map(|pp| tensor.slice(pp)[(nn, mm)] * a[(pp, jj)]).sum()
                        })
                    })
                    .collect::<Vec<_>>(),
            };
            Ok(ModeProduct::Tensor(ChannelTensor::new(slices)?))
        }
    }
}

/// Beamformed FIR channel `h_p = uᴴ H_p v` (i.e. `𝓗 ×₁ u* ×₂ v`).
pub fn beamformed_fir(tensor: &ChannelTensor, u: &BeamVector, v: &BeamVector) -> Result<FirChannel> {
    if u.len() != tensor.tx() {
        return Err(Error::LengthMismatch(format!(
            "u has {} entries, channel has {} transmit antennas",
            u.len(),
            tensor.tx()
        )));
    }
    if v.len() != tensor.rx() {
        return Err(Error::LengthMismatch(format!(
            "v has {} entries, channel has {} receive antennas",
            v.len(),
            tensor.rx()
        )));
    }
    let taps = tensor
        .slices()
        .iter()
        .map(|hp| {
            let hv = hp.matvec(v.entries());
            crate::linalg::vdot(u.entries(), &hv)
        })
        .collect();
    Ok(FirChannel::new(taps))
}

/// i.i.d. circularly-symmetric complex Gaussian matrix with unit per-entry
/// variance. The same `(n, m, seed)` yields the same matrix everywhere.
pub fn random_gaussian_matrix(n: usize, m: usize, seed: u64) -> Result<ChannelMatrix> {
    let t = random_gaussian_tensor(n, m, 1, seed)?;
    ChannelMatrix::new(t.slices.into_iter().next().unwrap())
}

/// i.i.d. complex Gaussian tensor; entries are drawn slice-major with the
/// transmit index fastest, matching the fixture layout.
pub fn random_gaussian_tensor(n: usize, m: usize, p: usize, seed: u64) -> Result<ChannelTensor> {
    if n == 0 || m == 0 || p == 0 {
        return Err(Error::InvalidDimension(format!(
            "random channel dims must be positive, got {n}x{m}x{p}"
        )));
    }
    let mut g = SplitMix64::new(seed);
    let mut slices = Vec::with_capacity(p);
    for _ in 0..p {
        let mut s = CMat::zeros(n, m);
        for mm in 0..m {
            for nn in 0..n {
                s[(nn, mm)] = g.next_complex_gaussian();
            }
        }
        slices.push(s);
    }
    ChannelTensor::new(slices)
}

/// Full SVD of a channel matrix; test and initialization oracle only — the
/// iterative solvers never call it on their own objective.
pub fn svd_oracle(h: &ChannelMatrix) -> Svd {
    svd(h.as_mat())
}

/// On-disk channel fixture.
///
/// `re`/`im` hold `n*m*p` values in slice-major order with the transmit
/// index fastest: flat index `n_idx + n*m_idx + n*m*p_idx`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFixture {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ChannelFixture {
    pub fn from_tensor(t: &ChannelTensor) -> Self {
        let (n, m, p) = (t.tx(), t.rx(), t.taps());
        let mut re = Vec::with_capacity(n * m * p);
        let mut im = Vec::with_capacity(n * m * p);
        for pp in 0..p {
            for mm in 0..m {
                for nn in 0..n {
                    let z = t.slice(pp)[(nn, mm)];
                    re.push(z.re);
                    im.push(z.im);
                }
            }
        }
        Self { n, m, p, re, im }
    }

    pub fn from_matrix(h: &ChannelMatrix) -> Self {
        Self::from_tensor(&h.clone().into_tensor())
    }

    pub fn to_tensor(&self) -> Result<ChannelTensor> {
        let count = self
            .n
            .checked_mul(self.m)
            .and_then(|x| x.checked_mul(self.p))
            .ok_or_else(|| Error::InvalidFixture("dimension overflow".into()))?;
        if self.re.len() != count || self.im.len() != count {
            return Err(Error::InvalidFixture(format!(
                "fields re/im must each hold n*m*p = {count} values, got {} and {}",
                self.re.len(),
                self.im.len()
            )));
        }
        let mut slices = Vec::with_capacity(self.p);
        for pp in 0..self.p {
            let mut s = CMat::zeros(self.n, self.m);
            for mm in 0..self.m {
                for nn in 0..self.n {
                    let idx = nn + self.n * (mm + self.m * pp);
                    s[(nn, mm)] = C64::new(self.re[idx], self.im[idx]);
                }
            }
            slices.push(s);
        }
        ChannelTensor::new(slices)
    }

    pub fn to_matrix(&self) -> Result<ChannelMatrix> {
        if self.p != 1 {
            return Err(Error::InvalidFixture(format!(
                "expected a frequency-flat fixture (p = 1), got p = {}",
                self.p
            )));
        }
        let t = self.to_tensor()?;
        ChannelMatrix::new(t.slices.into_iter().next().unwrap())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vdot;

    fn tensor_of_ones(n: usize, m: usize, p: usize) -> ChannelTensor {
        ChannelTensor::new((0..p).map(|_| CMat::from_fn(n, m, |_, _| C64::new(1.0, 0.0))).collect())
            .unwrap()
    }

    // Mode-2 contraction with a basis vector selects a column of each slice.
    #[test]
    fn mode2_basis_vector_selects_column() {
        let t = tensor_of_ones(2, 2, 1);
        let e1 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let out = mode_multiply(&t, ModeOperand::Vector(&e1), 2).unwrap().expect_matrix();
        assert_eq!((out.rows(), out.cols()), (2, 1));
        for r in 0..2 {
            assert!((out[(r, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    // Independent triple-loop oracle for the mode-2 product.
    #[test]
    fn mode2_matches_triple_loop() {
        let t = random_gaussian_tensor(3, 2, 2, 5).unwrap();
        let mut g = SplitMix64::new(17);
        let a: Vec<C64> = (0..2).map(|_| g.next_complex_gaussian()).collect();
        let out = mode_multiply(&t, ModeOperand::Vector(&a), 2).unwrap().expect_matrix();
        for nn in 0..3 {
            for pp in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for mm in 0..2 {
                    acc += t.slice(pp)[(nn, mm)] * a[mm];
                }
                assert!((acc - out[(nn, pp)]).norm() < 1e-13);
            }
        }
    }

    // Chained mode products reproduce the beamformed FIR channel; at P = 1
    // the tap is the scalar uᴴHv.
    #[test]
    fn chained_modes_give_fir() {
        let t = random_gaussian_tensor(4, 3, 2, 6).unwrap();
        let mut g = SplitMix64::new(23);
        let u = BeamVector::canonical(g.next_unit_vector(4)).unwrap();
        let v = BeamVector::canonical(g.next_unit_vector(3)).unwrap();
        let h = beamformed_fir(&t, &u, &v).unwrap();

        let uc: Vec<C64> = u.entries().iter().map(|z| z.conj()).collect();
        let a = mode_multiply(&t, ModeOperand::Vector(&uc), 1).unwrap().expect_matrix(); // M x P
        for pp in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for mm in 0..3 {
                acc += a[(mm, pp)] * v.entries()[mm];
            }
            assert!((acc - h.taps()[pp]).norm() < 1e-13);
        }

        let single = random_gaussian_tensor(4, 3, 1, 99).unwrap();
        let h1 = beamformed_fir(&single, &u, &v).unwrap();
        let hv = single.slice(0).matvec(v.entries());
        let direct = vdot(u.entries(), &hv);
        assert!((h1.taps()[0] - direct).norm() < 1e-14);
    }

    #[test]
    fn mode_mismatch_is_reported() {
        let t = tensor_of_ones(2, 3, 1);
        let a = vec![C64::new(1.0, 0.0); 2];
        let err = mode_multiply(&t, ModeOperand::Vector(&a), 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mode-2") && msg.contains('3') && msg.contains('2'), "{msg}");
    }

    // diag(3, 1) with u = v = e1 gives a single tap of 3.
    #[test]
    fn fir_diagonal_single_slice() {
        let mut d = CMat::zeros(2, 2);
        d[(0, 0)] = C64::new(3.0, 0.0);
        d[(1, 1)] = C64::new(1.0, 0.0);
        let t = ChannelTensor::new(vec![d]).unwrap();
        let e1 = BeamVector::canonical(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let h = beamformed_fir(&t, &e1, &e1).unwrap();
        assert!((h.norm() - 3.0).abs() < 1e-15);
    }

    // Slice-wise oracle for ‖h‖².
    #[test]
    fn fir_norm_matches_slice_sum() {
        let t = random_gaussian_tensor(4, 4, 3, 8).unwrap();
        let mut g = SplitMix64::new(31);
        let u = BeamVector::canonical(g.next_unit_vector(4)).unwrap();
        let v = BeamVector::canonical(g.next_unit_vector(4)).unwrap();
        let h = beamformed_fir(&t, &u, &v).unwrap();
        let mut acc = 0.0;
        for p in 0..3 {
            let hv = t.slice(p).matvec(v.entries());
            acc += vdot(u.entries(), &hv).norm_sqr();
        }
        assert!((h.norm().powi(2) - acc).abs() < 1e-12);
    }

    // At the top singular pair the FIR norm reaches σ₁.
    #[test]
    fn fir_attains_sigma1_at_top_pair() {
        let h = random_gaussian_matrix(5, 4, 77).unwrap();
        let f = svd_oracle(&h);
        let u = BeamVector::canonical(f.u.col(0)).unwrap();
        let v = BeamVector::canonical(f.v.col(0)).unwrap();
        let t = h.clone().into_tensor();
        let fir = beamformed_fir(&t, &u, &v).unwrap();
        assert!((fir.norm() - f.singular_values[0]).abs() < 1e-10);
    }

    #[test]
    fn gaussian_is_deterministic() {
        let a = random_gaussian_matrix(16, 16, 3).unwrap();
        let b = random_gaussian_matrix(16, 16, 3).unwrap();
        assert_eq!(a, b);
        let t1 = random_gaussian_tensor(4, 5, 3, 11).unwrap();
        let t2 = random_gaussian_tensor(4, 5, 3, 11).unwrap();
        assert_eq!(t1, t2);
    }

    // Law-of-large-numbers check: per-entry variance 1 within 1%.
    #[test]
    fn gaussian_unit_variance() {
        let mut acc = 0.0;
        let mut count = 0usize;
        let per = 16 * 16;
        let draws = 1_000_000usize;
        let mats = draws / per + 1;
        for seed in 0..mats {
            let h = random_gaussian_matrix(16, 16, 1000 + seed as u64).unwrap();
            acc += h.as_mat().data().iter().map(|z| z.norm_sqr()).sum::<f64>();
            count += per;
        }
        let var = acc / count as f64;
        assert!((0.99..=1.01).contains(&var), "sample variance {var}");
    }

    // Tap slices are uncorrelated across p.
    #[test]
    fn gaussian_slices_uncorrelated() {
        let mut cross = C64::new(0.0, 0.0);
        let mut count = 0usize;
        for seed in 0..400 {
            let t = random_gaussian_tensor(16, 16, 2, 5000 + seed).unwrap();
            for (a, b) in t.slice(0).data().iter().zip(t.slice(1).data()) {
                cross += a.conj() * b;
                count += 1;
            }
        }
        let corr = (cross / count as f64).norm();
        assert!(corr < 0.01, "cross-slice correlation {corr}");
    }

    #[test]
    fn gaussian_rejects_zero_dims() {
        assert!(random_gaussian_matrix(0, 4, 1).is_err());
        assert!(random_gaussian_tensor(4, 4, 0, 1).is_err());
    }

    #[test]
    fn beam_vector_phase_convention() {
        let v = BeamVector::canonical(vec![C64::new(0.0, 2.0), C64::new(1.0, 0.0)]).unwrap();
        // Largest entry must be real nonnegative after canonicalization.
        assert!(v.entries()[0].im.abs() < 1e-15);
        assert!(v.entries()[0].re > 0.0);
        assert!((vnorm(v.entries()) - 1.0).abs() < 1e-12);
        // Ties break toward the lowest index.
        let t = BeamVector::canonical(vec![C64::new(0.0, 1.0), C64::new(0.0, 1.0)]).unwrap();
        assert!(t.entries()[0].im.abs() < 1e-15 && t.entries()[0].re > 0.0);
        assert!(BeamVector::canonical(vec![C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn fixture_roundtrip_and_validation() {
        let t = random_gaussian_tensor(3, 4, 2, 21).unwrap();
        let f = ChannelFixture::from_tensor(&t);
        let back = f.to_tensor().unwrap();
        assert_eq!(t, back);

        let mut broken = ChannelFixture::from_tensor(&t);
        broken.re.pop();
        assert!(broken.to_tensor().is_err());

        let m = random_gaussian_matrix(2, 2, 4).unwrap();
        let fm = ChannelFixture::from_matrix(&m);
        assert_eq!(fm.p, 1);
        assert_eq!(fm.to_matrix().unwrap(), m);
        let ft = ChannelFixture::from_tensor(&random_gaussian_tensor(2, 2, 3, 4).unwrap());
        assert!(ft.to_matrix().is_err());
    }

    // Fixture layout: flat index n + N*m + N*M*p.
    #[test]
    fn fixture_layout_is_tx_fastest() {
        let mut s0 = CMat::zeros(2, 2);
        s0[(0, 0)] = C64::new(1.0, 0.0);
        s0[(1, 0)] = C64::new(2.0, 0.0);
        s0[(0, 1)] = C64::new(3.0, 0.0);
        s0[(1, 1)] = C64::new(4.0, 0.0);
        let s1 = s0.scale(C64::new(10.0, 0.0));
        let t = ChannelTensor::new(vec![s0, s1]).unwrap();
        let f = ChannelFixture::from_tensor(&t);
        assert_eq!(f.re, vec![1.0, 2.0, 3.0, 4.0, 10.0, 20.0, 30.0, 40.0]);
    }
}
