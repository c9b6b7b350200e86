//! Analog-beamforming solvers for millimeter-wave antenna arrays.
//!
//! The crate covers single- and dual-stream beam design over two channel
//! models — a frequency-flat complex matrix and a frequency-selective
//! tensor (one matrix slice per timing tap) — plus a reproducible
//! Monte-Carlo harness for singular-value distribution experiments:
//!
//! - [`channel`]: channel containers, tensor mode products, the beamformed
//!   FIR response, seeded Gaussian channel generation, JSON fixtures, and a
//!   from-scratch Jacobi SVD oracle.
//! - [`siso`]: power iteration, alternating least squares, and the
//!   higher-order power method for single-stream beams.
//! - [`mimo`]: shared-architecture ALS for K streams and split-architecture
//!   determinant-maximizing ALS for 2 streams, with greedy per-tap pairing
//!   of stream powers and capacity/gain metrics.
//! - [`harness`]: deterministic ensemble runner (rayon-parallel behind the
//!   default `parallel` feature, with a sequential fallback), CDF/percentile
//!   reports, ensemble comparison, and exhaustive phase-grid oracles.
//!
//! Determinism is a contract: every random quantity derives from a seeded
//! [`rng::SplitMix64`] stream, and ensemble output is identical for any
//! thread count or schedule.

pub mod channel;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mimo;
pub mod rng;
pub mod siso;

pub use channel::{
    beamformed_fir, mode_multiply, random_gaussian_matrix, random_gaussian_tensor, svd_oracle,
    BeamVector, BlockPartition, ChannelFixture, ChannelMatrix, ChannelTensor, FirChannel,
    ModeOperand, ModeProduct,
};
pub use error::{Error, Result};
pub use harness::{
    compare_ensembles, grid_oracle_det, grid_oracle_fir, run_ensemble, run_ensemble_serial,
    run_ensemble_with_threads, Algorithm, Architecture, ChannelKind, ComparisonReport,
    EnsembleStats, ExperimentSpec, GridOracleSpec,
};
pub use linalg::{svd, CMat, Svd, C64};
pub use mimo::{
    als_shared, als_split_matrix, als_split_tensor, build_det_matrix, capacity_high_snr_k2,
    capacity_proxy, greedy_pairing, ideal_gain_db, BeamMatrix, EffectiveMimoChannel, MimoBeams,
    MimoResult, PairingResult, SplitBeamSet,
};
pub use siso::{als_tensor, hopm, power_method, SisoResult, SolverConfig};
