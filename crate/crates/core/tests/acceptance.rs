//! Acceptance suite. One test per criterion; each prints a single
//! `criterion NN (<label>): PASS/FAIL — details` line (visible with
//! `--nocapture`, and always shown for failing tests).
//!
//! Criteria 01 and 03a are known-red: the asserted bounds are kept as
//! specified even though the measured behavior of a faithful
//! implementation sits outside them. The failure messages carry the
//! measured numbers; see the repository documentation for the runtime
//! story and the sequential/parallel equivalence contract.

use std::time::Instant;

use beamsim_core::linalg::{svd, vdot, C64};
use beamsim_core::rng::{trial_seed, SplitMix64};
use beamsim_core::{
    als_shared, als_split_matrix, als_split_tensor, als_tensor, build_det_matrix, greedy_pairing,
    grid_oracle_det, grid_oracle_fir, hopm, power_method, random_gaussian_matrix,
    random_gaussian_tensor, run_ensemble, run_ensemble_with_threads, svd_oracle, Algorithm,
    Architecture, BlockPartition, ChannelKind, ExperimentSpec, GridOracleSpec, SolverConfig,
};

const SEED_C1: u64 = 1;
const SEED_C2: u64 = 2;
const SEED_C3: u64 = 3;
const SEED_C4: u64 = 4;
const SEED_C5_SHARED_MAT: u64 = 5;
const SEED_C5_SPLIT_MAT: u64 = 6;
const SEED_C5_SHARED_TEN: u64 = 7;
const SEED_C5_SPLIT_TEN: u64 = 8;
const SEED_C6: u64 = 60;
const SEED_C8_FIR: u64 = 80;
const SEED_C8_DET: u64 = 81;
const SEED_C9: u64 = 9;
const SEED_C10: u64 = 10;

fn spec(
    channel: ChannelKind,
    n: usize,
    m: usize,
    p: usize,
    architecture: Architecture,
    algorithm: Algorithm,
    streams: usize,
    trials: usize,
    solver: SolverConfig,
    seed: u64,
) -> ExperimentSpec {
    ExperimentSpec {
        channel,
        n,
        m,
        p,
        architecture,
        algorithm,
        streams,
        trials,
        solver,
        seed,
        output: None,
    }
}

fn c1_spec() -> ExperimentSpec {
    spec(
        ChannelKind::Matrix,
        16,
        16,
        1,
        Architecture::Siso,
        Algorithm::Power,
        1,
        10_000,
        SolverConfig::default(),
        SEED_C1,
    )
}

// Criterion 1: 16x16 Gaussian ensemble median sigma1 within +-5% of
// 2*sqrt(16) = 8 after 8 power iterations.
//
// Known red: the 2*sqrt(N) edge is asymptotic; at N = 16 the finite-size
// (Tracy-Widom) correction puts the true median near 7.27 (exact SVD) and
// 7.19 after 8 power iterations, outside [7.6, 8.4] for any faithful
// implementation.
#[test]
fn criterion_01_random_matrix_anchor() {
    let t0 = Instant::now();
    let stats = run_ensemble(&c1_spec()).unwrap();
    let median = stats.quantities[0].median();
    let secs = t0.elapsed().as_secs_f64();
    let pass = (7.6..=8.4).contains(&median);
    println!(
        "criterion 01 (random-matrix anchor): {} — median sigma1 {:.4} vs window [7.6, 8.4], 10000 trials in {:.1}s (runtime target 60s)",
        if pass { "PASS" } else { "FAIL" },
        median,
        secs
    );
    assert!(
        pass,
        "median sigma1 {median:.4} outside [7.6, 8.4]; finite-size Tracy-Widom correction of the \
         asymptotic 2*sqrt(N) edge puts the N=16 median near 7.27 (exact) / 7.19 (8 iterations)"
    );
}

fn c2_channels() -> Vec<beamsim_core::ChannelMatrix> {
    let mut kept = Vec::with_capacity(1000);
    let mut i = 0u64;
    while kept.len() < 1000 {
        let h = random_gaussian_matrix(8, 8, trial_seed(SEED_C2, i)).unwrap();
        let sv = svd_oracle(&h).singular_values;
        if sv[0] - sv[1] > 0.01 * sv[0] {
            kept.push(h);
        }
        i += 1;
    }
    kept
}

fn c2_solver() -> SolverConfig {
    SolverConfig { max_iterations: 5000, tolerance: 1e-13, ..Default::default() }
}

// Criterion 2: with a spectral gap above 1%, the power method matches the
// SVD oracle to 1e-8 relative on 1000 of 1000 matrices.
#[test]
fn criterion_02_svd_oracle_equivalence() {
    let cfg = c2_solver();
    let mut worst = 0.0_f64;
    let mut failures = 0usize;
    for h in c2_channels() {
        let sigma_oracle = svd_oracle(&h).singular_values[0];
        let res = power_method(&h, &cfg, None).unwrap();
        let rel = (res.sigma - sigma_oracle).abs() / sigma_oracle;
        worst = worst.max(rel);
        if rel > 1e-8 {
            failures += 1;
        }
    }
    let pass = failures == 0;
    println!(
        "criterion 02 (SVD-oracle equivalence): {} — {}/1000 within 1e-8, worst rel {:.2e}",
        if pass { "PASS" } else { "FAIL" },
        1000 - failures,
        worst
    );
    assert!(pass, "{failures} matrices exceeded 1e-8 relative error (worst {worst:.2e})");
}

// Criterion 3, first half: per-channel ALS/HOPM agreement to 1e-6 after
// 100 iterations on 1000 random 16x16x2 tensors.
//
// Known red: with the paper's initializations (stacked-right v0 for both,
// stacked-left u0 for HOPM) the two algorithms converge to different local
// optima on roughly 13% of channels; the disagreement persists at 3000
// iterations and each point is a fixed point of the other algorithm, so no
// iteration budget closes it.
#[test]
fn criterion_03a_als_hopm_agreement_at_100_iterations() {
    let cfg = SolverConfig { max_iterations: 100, tolerance: 1e-15, ..Default::default() };
    let mut disagreements = 0usize;
    let mut worst = 0.0_f64;
    for t in 0..1000u64 {
        let ten = random_gaussian_tensor(16, 16, 2, trial_seed(SEED_C3, t)).unwrap();
        let a = als_tensor(&ten, &cfg, None).unwrap();
        let h = hopm(&ten, &cfg, None, None).unwrap();
        let rel = (a.sigma - h.sigma).abs() / a.sigma;
        worst = worst.max(rel);
        if rel > 1e-6 {
            disagreements += 1;
        }
    }
    let pass = disagreements == 0;
    println!(
        "criterion 03a (ALS/HOPM agreement at 100 iterations): {} — {}/1000 channels within 1e-6, worst rel {:.2e}",
        if pass { "PASS" } else { "FAIL" },
        1000 - disagreements,
        worst
    );
    assert!(
        pass,
        "{disagreements}/1000 channels disagree beyond 1e-6 (worst {worst:.2e}); ALS and HOPM \
         reach different local optima from their published initializations"
    );
}

// Criterion 3, second half: at 8 iterations HOPM's ensemble mean trails
// ALS's (slower convergence).
#[test]
fn criterion_03b_hopm_mean_below_als_at_8_iterations() {
    let cfg = SolverConfig::default();
    let mut sum_als = 0.0;
    let mut sum_hopm = 0.0;
    for t in 0..1000u64 {
        let ten = random_gaussian_tensor(16, 16, 2, trial_seed(SEED_C3, t)).unwrap();
        sum_als += als_tensor(&ten, &cfg, None).unwrap().sigma;
        sum_hopm += hopm(&ten, &cfg, None, None).unwrap().sigma;
    }
    let mean_als = sum_als / 1000.0;
    let mean_hopm = sum_hopm / 1000.0;
    let pass = mean_hopm <= mean_als;
    println!(
        "criterion 03b (HOPM mean <= ALS mean at 8 iterations): {} — HOPM {:.4} vs ALS {:.4}",
        if pass { "PASS" } else { "FAIL" },
        mean_hopm,
        mean_als
    );
    assert!(pass, "mean HOPM {mean_hopm:.4} > mean ALS {mean_als:.4}");
}

fn c4_matrix_spec() -> ExperimentSpec {
    spec(
        ChannelKind::Matrix,
        16,
        16,
        1,
        Architecture::Siso,
        Algorithm::Power,
        1,
        10_000,
        SolverConfig::default(),
        SEED_C4,
    )
}

fn c4_tensor_spec() -> ExperimentSpec {
    spec(
        ChannelKind::Tensor,
        16,
        16,
        2,
        Architecture::Siso,
        Algorithm::Als,
        1,
        10_000,
        SolverConfig::default(),
        SEED_C4,
    )
}

// Criterion 4: the tensor channel's equivalent sigma1 median is at least
// the matrix channel's.
#[test]
fn criterion_04_tensor_vs_matrix_ordering() {
    let matrix = run_ensemble(&c4_matrix_spec()).unwrap();
    let tensor = run_ensemble(&c4_tensor_spec()).unwrap();
    let m_med = matrix.quantities[0].median();
    let t_med = tensor.quantities[0].median();
    let pass = t_med >= m_med;
    println!(
        "criterion 04 (tensor vs matrix SISO median): {} — tensor {:.4} vs matrix {:.4} (10000 trials each)",
        if pass { "PASS" } else { "FAIL" },
        t_med,
        m_med
    );
    assert!(pass, "tensor median {t_med:.4} < matrix median {m_med:.4}");
}

fn c5_specs() -> [ExperimentSpec; 4] {
    let cfg = SolverConfig::default();
    [
        spec(ChannelKind::Matrix, 16, 16, 1, Architecture::Shared, Algorithm::AlsShared, 2, 5000, cfg, SEED_C5_SHARED_MAT),
        spec(ChannelKind::Matrix, 32, 32, 1, Architecture::Split, Algorithm::AlsSplit, 2, 5000, cfg, SEED_C5_SPLIT_MAT),
        spec(ChannelKind::Tensor, 16, 16, 2, Architecture::Shared, Algorithm::AlsShared, 2, 5000, cfg, SEED_C5_SHARED_TEN),
        spec(ChannelKind::Tensor, 32, 32, 2, Architecture::Split, Algorithm::AlsSplit, 2, 5000, cfg, SEED_C5_SPLIT_TEN),
    ]
}

// Criterion 5, matrix half: for equal phase-shifter counts the split
// architecture's weaker stream beats the shared architecture's.
#[test]
fn criterion_05a_split_beats_shared_on_matrix_channel() {
    let [shared_mat, split_mat, _, _] = c5_specs();
    let shared = run_ensemble(&shared_mat).unwrap();
    let split = run_ensemble(&split_mat).unwrap();
    let shared_weak = shared.quantity("weaker_stream").unwrap().median();
    let split_weak = split.quantity("weaker_stream").unwrap().median();
    let pass = split_weak > shared_weak;
    println!(
        "criterion 05a (split > shared weaker stream, matrix): {} — split 32x32 {:.4} vs shared 16x16 {:.4} (5000 trials)",
        if pass { "PASS" } else { "FAIL" },
        split_weak,
        shared_weak
    );
    assert!(pass, "split weaker median {split_weak:.4} <= shared weaker median {shared_weak:.4}");
}

// Criterion 5, tensor half: shared and split deliver medians within 10%
// of each other on both streams.
#[test]
fn criterion_05b_tensor_shared_split_within_ten_percent() {
    let [_, _, shared_ten, split_ten] = c5_specs();
    let shared = run_ensemble(&shared_ten).unwrap();
    let split = run_ensemble(&split_ten).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for name in ["stronger_stream", "weaker_stream"] {
        let a = shared.quantity(name).unwrap().median();
        let b = split.quantity(name).unwrap().median();
        let rel = (a - b).abs() / a.min(b);
        detail.push_str(&format!("{name}: shared {a:.4} split {b:.4} rel {rel:.3}; "));
        if rel > 0.10 {
            pass = false;
        }
    }
    println!(
        "criterion 05b (tensor shared vs split within 10%): {} — {}",
        if pass { "PASS" } else { "FAIL" },
        detail
    );
    assert!(pass, "{detail}");
}

// Criterion 6: determinant identity and rank-2 structure on 1000 random
// split instances with random partitions.
#[test]
fn criterion_06_determinant_identity() {
    let mut g = SplitMix64::new(SEED_C6);
    let mut worst_identity = 0.0_f64;
    let mut rank_leaks = 0usize;
    for i in 0..1000u64 {
        let n1 = 1 + (g.next_u64() % 4) as usize;
        let n2 = 1 + (g.next_u64() % 4) as usize;
        let m1 = 1 + (g.next_u64() % 4) as usize;
        let m2 = 1 + (g.next_u64() % 4) as usize;
        let h = random_gaussian_matrix(n1 + n2, m1 + m2, trial_seed(SEED_C6, i)).unwrap();
        let part = BlockPartition::new(n1, n2, m1, m2).unwrap();
        let blocks = beamsim_core::mimo::matrix_blocks(&h, &part).unwrap();
        let v1 = g.next_unit_vector(m1);
        let v2 = g.next_unit_vector(m2);
        let u1 = g.next_unit_vector(n1);
        let u2 = g.next_unit_vector(n2);
        let a = build_det_matrix(&blocks, &v1, &v2).unwrap();
        let u2c: Vec<C64> = u2.iter().map(|z| z.conj()).collect();
        let lhs = vdot(&u1, &a.matvec(&u2c));
        let xi00 = vdot(&u1, &blocks[0].matvec(&v1));
        let xi01 = vdot(&u1, &blocks[1].matvec(&v2));
        let xi10 = vdot(&u2, &blocks[2].matvec(&v1));
        let xi11 = vdot(&u2, &blocks[3].matvec(&v2));
        let det = xi00 * xi11 - xi01 * xi10;
        let scale = h.as_mat().frob_norm().powi(2);
        worst_identity = worst_identity.max((lhs - det).norm() / scale);
        let sv = svd(&a).singular_values;
        if sv.len() > 2 && sv[2] > 1e-12 * sv[0].max(1e-300) {
            rank_leaks += 1;
        }
    }
    let pass = worst_identity <= 1e-12 && rank_leaks == 0;
    println!(
        "criterion 06 (determinant identity): {} — worst |u1^H A u2* - det| / ||H||^2 = {:.2e}, rank>2 cases {}",
        if pass { "PASS" } else { "FAIL" },
        worst_identity,
        rank_leaks
    );
    assert!(pass, "identity residual {worst_identity:.2e} (tol 1e-12), rank leaks {rank_leaks}");
}

fn monotone_violations(trace: &[f64]) -> usize {
    trace
        .windows(2)
        .filter(|w| w[1] - w[0] < -1e-12 * w[1].abs().max(w[0].abs()).max(1e-300))
        .count()
}

// Criterion 7: replay every solver run behind criteria 1-5 and count
// objective-trace decreases beyond -1e-12 relative. Zero allowed.
#[test]
fn criterion_07_monotonicity_suite() {
    let mut violations = 0usize;
    let mut traces = 0usize;

    // Criterion 1 runs.
    let c1 = c1_spec();
    for t in 0..c1.trials as u64 {
        let h = random_gaussian_matrix(16, 16, trial_seed(c1.seed, t)).unwrap();
        violations += monotone_violations(&power_method(&h, &c1.solver, None).unwrap().objective_trace);
        traces += 1;
    }
    // Criterion 2 runs.
    let cfg2 = c2_solver();
    for h in c2_channels() {
        violations += monotone_violations(&power_method(&h, &cfg2, None).unwrap().objective_trace);
        traces += 1;
    }
    // Criterion 3 runs (both iteration budgets).
    let cfg3 = SolverConfig { max_iterations: 100, tolerance: 1e-15, ..Default::default() };
    let cfg3b = SolverConfig::default();
    for t in 0..1000u64 {
        let ten = random_gaussian_tensor(16, 16, 2, trial_seed(SEED_C3, t)).unwrap();
        violations += monotone_violations(&als_tensor(&ten, &cfg3, None).unwrap().objective_trace);
        violations += monotone_violations(&hopm(&ten, &cfg3, None, None).unwrap().objective_trace);
        violations += monotone_violations(&als_tensor(&ten, &cfg3b, None).unwrap().objective_trace);
        violations += monotone_violations(&hopm(&ten, &cfg3b, None, None).unwrap().objective_trace);
        traces += 4;
    }
    // Criterion 4 runs.
    let c4m = c4_matrix_spec();
    let c4t = c4_tensor_spec();
    for t in 0..c4m.trials as u64 {
        let h = random_gaussian_matrix(16, 16, trial_seed(c4m.seed, t)).unwrap();
        violations += monotone_violations(&power_method(&h, &c4m.solver, None).unwrap().objective_trace);
        let ten = random_gaussian_tensor(16, 16, 2, trial_seed(c4t.seed, t)).unwrap();
        violations += monotone_violations(&als_tensor(&ten, &c4t.solver, None).unwrap().objective_trace);
        traces += 2;
    }
    // Criterion 5 runs.
    let [shared_mat, split_mat, shared_ten, split_ten] = c5_specs();
    for t in 0..shared_mat.trials as u64 {
        let h = random_gaussian_tensor(16, 16, 1, trial_seed(shared_mat.seed, t)).unwrap();
        violations += monotone_violations(&als_shared(&h, 2, &shared_mat.solver).unwrap().objective_trace);
        let hm = random_gaussian_matrix(32, 32, trial_seed(split_mat.seed, t)).unwrap();
        let part = BlockPartition::even(32, 32).unwrap();
        violations += monotone_violations(&als_split_matrix(&hm, &part, &split_mat.solver).unwrap().objective_trace);
        let ts = random_gaussian_tensor(16, 16, 2, trial_seed(shared_ten.seed, t)).unwrap();
        violations += monotone_violations(&als_shared(&ts, 2, &shared_ten.solver).unwrap().objective_trace);
        let tt = random_gaussian_tensor(32, 32, 2, trial_seed(split_ten.seed, t)).unwrap();
        violations += monotone_violations(&als_split_tensor(&tt, &part, &split_ten.solver).unwrap().objective_trace);
        traces += 4;
    }

    let pass = violations == 0;
    println!(
        "criterion 07 (monotone objectives): {} — {} violations across {} solver traces",
        if pass { "PASS" } else { "FAIL" },
        violations,
        traces
    );
    assert!(pass, "{violations} monotonicity violations across {traces} traces");
}

// Criterion 8, FIR half: ALS reaches the 16-level exhaustive grid bound
// minus 2% on at least 99 of 100 random 2x2x2 tensors.
#[test]
fn criterion_08a_grid_oracle_fir() {
    let cfg = SolverConfig { max_iterations: 50, tolerance: 1e-12, ..Default::default() };
    let grid = GridOracleSpec::default();
    let mut failures = 0usize;
    for t in 0..100u64 {
        let ten = random_gaussian_tensor(2, 2, 2, trial_seed(SEED_C8_FIR, t)).unwrap();
        let als = als_tensor(&ten, &cfg, None).unwrap();
        let oracle = grid_oracle_fir(&ten, &grid).unwrap();
        if als.sigma < oracle.best * 0.98 {
            failures += 1;
        }
    }
    let pass = failures <= 1;
    println!(
        "criterion 08a (ALS vs exhaustive grid, ||h||): {} — {}/100 within 2% of the grid bound",
        if pass { "PASS" } else { "FAIL" },
        100 - failures
    );
    assert!(pass, "{failures} of 100 trials fell below grid best - 2%");
}

// Criterion 8, determinant half: split ALS reaches the grid |det| bound
// minus 2% on at least 99 of 100 random 4x4 channels with a 2+2 split.
#[test]
fn criterion_08b_grid_oracle_det() {
    let cfg = SolverConfig { max_iterations: 20, ..Default::default() };
    let grid = GridOracleSpec::default();
    let part = BlockPartition::even(4, 4).unwrap();
    let mut failures = 0usize;
    for t in 0..100u64 {
        let h = random_gaussian_matrix(4, 4, trial_seed(SEED_C8_DET, t)).unwrap();
        let res = als_split_matrix(&h, &part, &cfg).unwrap();
        let sig = &res.effective.singular_values()[0];
        let det = sig[0] * sig[1];
        let oracle = grid_oracle_det(&h, &part, &grid).unwrap();
        if det < oracle.best * 0.98 {
            failures += 1;
        }
    }
    let pass = failures <= 1;
    println!(
        "criterion 08b (split ALS vs exhaustive grid, |det|): {} — {}/100 within 2% of the grid bound",
        if pass { "PASS" } else { "FAIL" },
        100 - failures
    );
    assert!(pass, "{failures} of 100 trials fell below grid best - 2%");
}

// Criterion 9, stated optimum: for K = 2, P = 2 with generic descending
// values, the pairing is the cross combination, and it is globally
// optimal among all per-tap assignments.
#[test]
fn criterion_09a_pairing_cross_combination() {
    let mut g = SplitMix64::new(SEED_C9);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let mut s1 = [g.next_f64() * 4.0, g.next_f64() * 4.0];
        let mut s2 = [g.next_f64() * 4.0, g.next_f64() * 4.0];
        s1.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s2.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if s1[0] == s1[1] || s2[0] == s2[1] {
            continue;
        }
        let res = greedy_pairing(&[s1.to_vec(), s2.to_vec()], 2).unwrap();
        let expect = [s1[0] * s1[0] + s2[1] * s2[1], s1[1] * s1[1] + s2[0] * s2[0]];
        assert_eq!(res.stream_powers, expect.to_vec(), "cross combination violated for {s1:?} {s2:?}");

        // Global exhaustive optimum over the 4 assignments at P = 2.
        let balance = (res.stream_powers[0] - res.stream_powers[1]).abs();
        let mut best = f64::INFINITY;
        for first in [[0, 1], [1, 0]] {
            for second in [[0, 1], [1, 0]] {
                let mut p = [0.0, 0.0];
                p[first[0]] += s1[0] * s1[0];
                p[first[1]] += s1[1] * s1[1];
                p[second[0]] += s2[0] * s2[0];
                p[second[1]] += s2[1] * s2[1];
                best = best.min((p[0] - p[1]).abs());
            }
        }
        assert!(
            balance <= best + 1e-12,
            "greedy balance {balance} worse than exhaustive optimum {best} for {s1:?} {s2:?}"
        );
        checked += 1;
    }
    println!("criterion 09a (P=2 cross pairing, exhaustive-optimal): PASS — {checked} generic instances");
    assert!(checked > 900);
}

// Criterion 9, oracle agreement: greedy matches a per-tap exhaustive
// balance oracle (enumerate both assignments at each tap, keep the most
// balanced, ties resolved exactly like the documented rule) on 1000
// random K = 2, P <= 4 instances.
#[test]
fn criterion_09b_pairing_exhaustive_oracle() {
    let mut g = SplitMix64::new(SEED_C9 ^ 0xFF);
    for case in 0..1000 {
        let taps = 1 + (g.next_u64() % 4) as usize;
        let per_tap: Vec<Vec<f64>> = (0..taps)
            .map(|_| {
                let mut v = [g.next_f64() * 5.0, g.next_f64() * 5.0];
                v.sort_by(|a, b| b.partial_cmp(a).unwrap());
                v.to_vec()
            })
            .collect();
        let greedy = greedy_pairing(&per_tap, 2).unwrap();

        // Stepwise oracle.
        let mut powers = [0.0_f64, 0.0_f64];
        for vals in &per_tap {
            let (a, b) = (vals[0], vals[1]);
            let opt_a = [(powers[0] + a * a), (powers[1] + b * b)]; // larger to stream 0
            let opt_b = [(powers[0] + b * b), (powers[1] + a * a)];
            let diff_a = (opt_a[0] - opt_a[1]).abs();
            let diff_b = (opt_b[0] - opt_b[1]).abs();
            powers = if diff_a < diff_b {
                opt_a
            } else if diff_b < diff_a {
                opt_b
            } else {
                // Tie: larger value goes to the lower-power stream, stream
                // index breaking power ties.
                if powers[0] <= powers[1] {
                    opt_a
                } else {
                    opt_b
                }
            };
        }
        assert_eq!(
            greedy.stream_powers,
            powers.to_vec(),
            "case {case}: greedy {:?} vs oracle {powers:?} on {per_tap:?}",
            greedy.stream_powers
        );
    }
    println!("criterion 09b (pairing vs stepwise exhaustive oracle): PASS — 1000/1000 instances agree");
}

// Criterion 10: reruns and thread counts never change a byte of output.
#[test]
fn criterion_10_determinism_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let specs = [
        spec(ChannelKind::Matrix, 16, 16, 1, Architecture::Siso, Algorithm::Power, 1, 1000, SolverConfig::default(), SEED_C10),
        spec(ChannelKind::Tensor, 8, 8, 2, Architecture::Split, Algorithm::AlsSplit, 2, 200, SolverConfig::default(), SEED_C10),
    ];
    for (i, sp) in specs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, threads) in [(0usize, 1usize), (1, 2), (2, 1)] {
            let stats = run_ensemble_with_threads(sp, threads).unwrap();
            let csv = dir.path().join(format!("c10_{i}_{run}.csv"));
            let side = dir.path().join(format!("c10_{i}_{run}.json"));
            beamsim_core::harness::write_csv(&stats, &csv).unwrap();
            beamsim_core::harness::write_sidecar(&stats, sp, &side).unwrap();
            outputs.push((std::fs::read(&csv).unwrap(), std::fs::read(&side).unwrap()));
        }
        assert_eq!(outputs[0], outputs[1], "spec {i}: 1-thread vs 2-thread output differs");
        assert_eq!(outputs[0], outputs[2], "spec {i}: rerun output differs");
    }
    println!("criterion 10 (byte-identical outputs across threads and reruns): PASS — 2 specs x 3 runs");
}
