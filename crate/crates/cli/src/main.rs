//! Command-line front-end for the beamsim solvers and experiments.
//!
//! Subcommands:
//! - `gen`       write a random Gaussian channel fixture (JSON)
//! - `solve`     run one solver on a fixture or generated channel
//! - `oracle`    exhaustive phase-grid bound next to the solver result
//! - `reproduce` Monte-Carlo distribution experiments (fig3 / fig6 presets)
//!
//! Exit codes: 0 success, 1 usage or input error, 2 solver did not converge
//! (the result is still printed).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use beamsim_core::{
    als_shared, als_split_matrix, als_split_tensor, als_tensor, compare_ensembles,
    grid_oracle_det, grid_oracle_fir, hopm, power_method, random_gaussian_tensor,
    run_ensemble_with_threads, Algorithm, Architecture, BlockPartition, ChannelFixture,
    ChannelKind, ChannelMatrix, ChannelTensor, EnsembleStats, ExperimentSpec, GridOracleSpec,
    MimoResult, SisoResult, SolverConfig,
};

#[derive(Parser)]
#[command(name = "beamsim", version, about = "Analog beamforming solvers and Monte-Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random complex-Gaussian channel fixture.
    Gen(GenArgs),
    /// Run one solver on a channel and print the result as JSON.
    Solve(SolveArgs),
    /// Compare a solver against the exhaustive phase-grid oracle.
    Oracle(OracleArgs),
    /// Reproduce the singular-value distribution experiments.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Matrix,
    Tensor,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Alg {
    Power,
    Als,
    Hopm,
    AlsShared,
    AlsSplit,
}

impl Alg {
    fn name(self) -> &'static str {
        match self {
            Alg::Power => "power",
            Alg::Als => "als",
            Alg::Hopm => "hopm",
            Alg::AlsShared => "als-shared",
            Alg::AlsSplit => "als-split",
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Channel kind; `matrix` is frequency-flat (p = 1).
    #[arg(value_enum)]
    kind: GenKind,
    /// Transmit antennas.
    #[arg(long)]
    n: usize,
    /// Receive antennas.
    #[arg(long)]
    m: usize,
    /// Timing taps (tensor only; matrix fixtures are p = 1).
    #[arg(long)]
    p: Option<usize>,
    /// Generator seed.
    #[arg(long)]
    seed: u64,
    /// Output fixture path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Channel fixture to load.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generate the channel instead of loading one.
    #[arg(long, value_enum)]
    gen: Option<GenKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Timing taps for `--gen tensor` (default 2).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Solver to run.
    #[arg(long, value_enum)]
    alg: Alg,
    /// Stream count for `als-shared`.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Split partition `N1,N2` (square receive side implied) or
    /// `N1,N2,M1,M2`; defaults to the even split.
    #[arg(long)]
    split: Option<String>,
    /// Outer iteration cap.
    #[arg(long, default_value_t = 8)]
    iters: usize,
    /// Relative objective-change tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Extra random-restart runs (best objective wins).
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    /// Inner least-squares iteration cap.
    #[arg(long = "inner-iters", default_value_t = 4)]
    inner_iters: usize,
    /// Write the result JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also report amplitude quantities in dB (20·log10).
    #[arg(long)]
    db: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Channel fixture to load.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Phase quantization levels.
    #[arg(long = "grid-levels", default_value_t = 16)]
    grid_levels: usize,
    /// Objective: `fir` (max ‖h‖) or `det` (max |det Ξ| over a split).
    #[arg(long, value_enum, default_value_t = Objective::Fir)]
    objective: Objective,
    /// Split partition for the det objective (defaults to the even split).
    #[arg(long)]
    split: Option<String>,
    /// Solver iteration cap for the comparison run.
    #[arg(long, default_value_t = 50)]
    iters: usize,
    /// Write the report JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    Fir,
    Det,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    Fig3,
    Fig6,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Which experiment preset to run.
    #[arg(value_enum)]
    figure: Figure,
    /// Monte-Carlo trials per curve (at least 100).
    #[arg(long)]
    trials: usize,
    /// Base seed; trial t uses the documented seed mix.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Solver iterations per trial.
    #[arg(long, default_value_t = 8)]
    iters: usize,
    /// Output directory for CSVs and the summary JSON.
    #[arg(long, default_value = "beamsim_out")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::Reproduce(a) => cmd_reproduce(a),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

type CliResult = Result<i32, Box<dyn std::error::Error>>;

fn emit(doc: &Value, out: Option<&Path>) -> CliResult {
    let text = serde_json::to_string_pretty(doc)?;
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            println!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(0)
}

fn db(x: f64) -> f64 {
    20.0 * x.log10()
}

fn cmd_gen(a: GenArgs) -> CliResult {
    let p = match a.kind {
        GenKind::Matrix => match a.p {
            None | Some(1) => 1,
            Some(other) => return Err(format!("matrix fixtures are frequency-flat; got --p {other}").into()),
        },
        GenKind::Tensor => a.p.unwrap_or(2),
    };
    let t = random_gaussian_tensor(a.n, a.m, p, a.seed)?;
    ChannelFixture::from_tensor(&t).save(&a.out)?;
    println!("wrote {} ({}x{}x{}, seed {})", a.out.display(), a.n, a.m, p, a.seed);
    Ok(0)
}

/// Resolve the channel for `solve`/`oracle`: either a fixture file or a
/// generated Gaussian channel. Returns the tensor and a JSON description.
fn resolve_channel(
    input: Option<&Path>,
    gen: Option<GenKind>,
    n: Option<usize>,
    m: Option<usize>,
    p: Option<usize>,
    seed: Option<u64>,
) -> Result<(ChannelTensor, Value), Box<dyn std::error::Error>> {
    match (input, gen) {
        (Some(path), None) => {
            let fixture = ChannelFixture::load(path)?;
            let t = fixture.to_tensor()?;
            let desc = json!({
                "n": t.tx(), "m": t.rx(), "p": t.taps(),
                "source": format!("file:{}", path.display()),
            });
            Ok((t, desc))
        }
        (None, Some(kind)) => {
            let n = n.ok_or("--gen requires --n")?;
            let m = m.ok_or("--gen requires --m")?;
            let seed = seed.ok_or("--gen requires --seed")?;
            let p = match kind {
                GenKind::Matrix => match p {
                    None | Some(1) => 1,
                    Some(other) => return Err(format!("matrix channels are frequency-flat; got --p {other}").into()),
                },
                GenKind::Tensor => p.unwrap_or(2),
            };
            let t = random_gaussian_tensor(n, m, p, seed)?;
            let desc = json!({
                "n": n, "m": m, "p": p,
                "source": format!("generated:seed={seed}"),
            });
            Ok((t, desc))
        }
        (None, None) => Err("pass a channel with --in FILE or --gen matrix|tensor".into()),
        (Some(_), Some(_)) => Err("--in and --gen are mutually exclusive".into()),
    }
}

fn parse_split(text: Option<&str>, n: usize, m: usize) -> Result<BlockPartition, Box<dyn std::error::Error>> {
    let Some(text) = text else {
        return Ok(BlockPartition::even(n, m)?);
    };
    let parts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("--split expects comma-separated antenna counts, got {text:?}"))?;
    let part = match parts.as_slice() {
        [n1, n2] => {
            if n1 + n2 != m {
                return Err(format!(
                    "--split {n1},{n2} leaves the {m} receive antennas unspecified; pass N1,N2,M1,M2"
                )
                .into());
            }
            BlockPartition::new(*n1, *n2, *n1, *n2)?
        }
        [n1, n2, m1, m2] => BlockPartition::new(*n1, *n2, *m1, *m2)?,
        _ => return Err("--split expects 2 or 4 comma-separated counts".into()),
    };
    if part.n1 + part.n2 != n || part.m1 + part.m2 != m {
        return Err(format!(
            "split ({},{})x({},{}) does not cover the {n}x{m} channel",
            part.n1, part.n2, part.m1, part.m2
        )
        .into());
    }
    Ok(part)
}

fn siso_doc(alg: Alg, channel: Value, r: &SisoResult, with_db: bool) -> Value {
    let mut doc = json!({
        "schema": 1,
        "algorithm": alg.name(),
        "channel": channel,
        "sigma": r.sigma,
        "u": r.u,
        "v": r.v,
        "objective_trace": r.objective_trace,
        "iterations_used": r.iterations_used,
        "converged": r.converged,
    });
    if with_db {
        doc["sigma_db"] = json!(db(r.sigma));
    }
    doc
}

fn mimo_doc(alg: Alg, channel: Value, streams: usize, r: &MimoResult, with_db: bool) -> Value {
    let amplitudes = r.stream_amplitudes_desc();
    let mut doc = json!({
        "schema": 1,
        "algorithm": alg.name(),
        "channel": channel,
        "streams": streams,
        "stream_powers": r.stream_powers,
        "stream_amplitudes": amplitudes,
        "pairing": r.pairing,
        "beams": r.beams,
        "effective": r.effective,
        "objective_trace": r.objective_trace,
        "iterations_used": r.iterations_used,
        "converged": r.converged,
    });
    if with_db {
        doc["stream_amplitudes_db"] = json!(amplitudes.iter().map(|a| db(*a)).collect::<Vec<_>>());
    }
    doc
}

fn matrix_of(t: &ChannelTensor) -> Result<ChannelMatrix, Box<dyn std::error::Error>> {
    ChannelMatrix::new(t.slice(0).clone()).map_err(Into::into)
}

fn cmd_solve(a: SolveArgs) -> CliResult {
    let (tensor, channel) = resolve_channel(
        a.input.as_deref(),
        a.gen,
        a.n,
        a.m,
        a.p,
        a.seed,
    )?;
    let cfg = SolverConfig {
        max_iterations: a.iters,
        tolerance: a.tol,
        restarts: a.restarts,
        inner_iterations: a.inner_iters,
        ..Default::default()
    };
    let (doc, converged) = match a.alg {
        Alg::Power => {
            if tensor.taps() != 1 {
                return Err(format!(
                    "the power method runs on frequency-flat channels; this one has p = {}",
                    tensor.taps()
                )
                .into());
            }
            let r = power_method(&matrix_of(&tensor)?, &cfg, None)?;
            (siso_doc(a.alg, channel, &r, a.db), r.converged)
        }
        Alg::Als => {
            let r = als_tensor(&tensor, &cfg, None)?;
            (siso_doc(a.alg, channel, &r, a.db), r.converged)
        }
        Alg::Hopm => {
            let r = hopm(&tensor, &cfg, None, None)?;
            (siso_doc(a.alg, channel, &r, a.db), r.converged)
        }
        Alg::AlsShared => {
            let r = als_shared(&tensor, a.k, &cfg)?;
            (mimo_doc(a.alg, channel, a.k, &r, a.db), r.converged)
        }
        Alg::AlsSplit => {
            let part = parse_split(a.split.as_deref(), tensor.tx(), tensor.rx())?;
            let r = if tensor.taps() == 1 {
                als_split_matrix(&matrix_of(&tensor)?, &part, &cfg)?
            } else {
                als_split_tensor(&tensor, &part, &cfg)?
            };
            (mimo_doc(a.alg, channel, 2, &r, a.db), r.converged)
        }
    };
    emit(&doc, a.out.as_deref())?;
    Ok(if converged { 0 } else { 2 })
}

fn cmd_oracle(a: OracleArgs) -> CliResult {
    let (tensor, channel) = resolve_channel(Some(&a.input), None, None, None, None, None)?;
    let grid_spec = GridOracleSpec { levels: a.grid_levels, ..Default::default() };
    let cfg = SolverConfig { max_iterations: a.iters, ..Default::default() };
    let doc = match a.objective {
        Objective::Fir => {
            let grid = grid_oracle_fir(&tensor, &grid_spec)?;
            let solver = als_tensor(&tensor, &cfg, None)?;
            json!({
                "schema": 1,
                "objective": "fir",
                "channel": channel,
                "grid": { "best": grid.best, "evaluations": grid.evaluations, "u": grid.u, "v": grid.v },
                "solver": { "algorithm": "als", "sigma": solver.sigma, "converged": solver.converged,
                            "iterations_used": solver.iterations_used },
                "solver_minus_grid": solver.sigma - grid.best,
            })
        }
        Objective::Det => {
            if tensor.taps() != 1 {
                return Err("the det objective runs on frequency-flat channels (p = 1)".into());
            }
            let h = matrix_of(&tensor)?;
            let part = parse_split(a.split.as_deref(), tensor.tx(), tensor.rx())?;
            let grid = grid_oracle_det(&h, &part, &grid_spec)?;
            let solver = als_split_matrix(&h, &part, &cfg)?;
            let sig = &solver.effective.singular_values()[0];
            let det = sig[0] * sig[1];
            json!({
                "schema": 1,
                "objective": "det",
                "channel": channel,
                "split": { "n1": part.n1, "n2": part.n2, "m1": part.m1, "m2": part.m2 },
                "grid": { "best": grid.best, "evaluations": grid.evaluations,
                          "u1": grid.u1, "u2": grid.u2, "v1": grid.v1, "v2": grid.v2 },
                "solver": { "algorithm": "als-split", "det": det,
                            "singular_values": sig, "converged": solver.converged,
                            "iterations_used": solver.iterations_used },
                "solver_minus_grid": det - grid.best,
            })
        }
    };
    emit(&doc, a.out.as_deref())
}

struct Curve {
    name: &'static str,
    spec: ExperimentSpec,
}

fn curve(
    name: &'static str,
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
) -> Curve {
    Curve {
        name,
        spec: ExperimentSpec {
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
        },
    }
}

fn quantity_summaries(stats: &EnsembleStats) -> Value {
    json!(stats
        .quantities
        .iter()
        .map(|q| {
            json!({
                "name": q.name,
                "mean": q.mean,
                "stddev": q.stddev,
                "percentiles": q.percentiles,
            })
        })
        .collect::<Vec<_>>())
}

fn cmd_reproduce(a: ReproduceArgs) -> CliResult {
    if a.trials < 100 {
        return Err(format!("--trials must be at least 100 (got {})", a.trials).into());
    }
    std::fs::create_dir_all(&a.out)?;
    let solver = SolverConfig { max_iterations: a.iters, ..Default::default() };
    let (figure, curves, comparisons): (&str, Vec<Curve>, Vec<(&str, &str, &str)>) = match a.figure {
        Figure::Fig3 => (
            "fig3",
            vec![
                curve("matrix_power", ChannelKind::Matrix, 16, 16, 1, Architecture::Siso, Algorithm::Power, 1, a.trials, solver, a.seed),
                curve("tensor_als", ChannelKind::Tensor, 16, 16, 2, Architecture::Siso, Algorithm::Als, 1, a.trials, solver, a.seed),
                curve("tensor_hopm", ChannelKind::Tensor, 16, 16, 2, Architecture::Siso, Algorithm::Hopm, 1, a.trials, solver, a.seed),
            ],
            vec![
                ("tensor_als_vs_matrix_power", "tensor_als", "matrix_power"),
                ("tensor_hopm_vs_tensor_als", "tensor_hopm", "tensor_als"),
            ],
        ),
        Figure::Fig6 => (
            "fig6",
            vec![
                curve("matrix_shared", ChannelKind::Matrix, 16, 16, 1, Architecture::Shared, Algorithm::AlsShared, 2, a.trials, solver, a.seed),
                curve("matrix_split", ChannelKind::Matrix, 32, 32, 1, Architecture::Split, Algorithm::AlsSplit, 2, a.trials, solver, a.seed),
                curve("tensor_shared", ChannelKind::Tensor, 16, 16, 2, Architecture::Shared, Algorithm::AlsShared, 2, a.trials, solver, a.seed),
                curve("tensor_split", ChannelKind::Tensor, 32, 32, 2, Architecture::Split, Algorithm::AlsSplit, 2, a.trials, solver, a.seed),
            ],
            vec![
                ("matrix_split_vs_matrix_shared", "matrix_split", "matrix_shared"),
                ("tensor_split_vs_tensor_shared", "tensor_split", "tensor_shared"),
            ],
        ),
    };

    let mut results: Vec<(&str, EnsembleStats)> = Vec::new();
    let mut curve_docs = Vec::new();
    for c in &curves {
        let stats = run_ensemble_with_threads(&c.spec, a.threads)?;
        let csv_name = format!("{figure}_{}.csv", c.name);
        beamsim_core::harness::write_csv(&stats, &a.out.join(&csv_name))?;
        println!("wrote {}", a.out.join(&csv_name).display());
        curve_docs.push(json!({
            "name": c.name,
            "csv": csv_name,
            "spec": c.spec,
            "non_converged": stats.non_converged,
            "quantities": quantity_summaries(&stats),
        }));
        results.push((c.name, stats));
    }

    let mut comparison_docs = Vec::new();
    for (label, left, right) in comparisons {
        let a_stats = &results.iter().find(|(n, _)| *n == left).unwrap().1;
        let b_stats = &results.iter().find(|(n, _)| *n == right).unwrap().1;
        comparison_docs.push(json!({
            "name": label,
            "report": compare_ensembles(a_stats, b_stats)?,
        }));
    }

    let summary = json!({
        "schema": 1,
        "figure": figure,
        "trials": a.trials,
        "seed": a.seed,
        "iterations": a.iters,
        "curves": curve_docs,
        "comparisons": comparison_docs,
    });
    let summary_path = a.out.join(format!("{figure}_summary.json"));
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
    println!("wrote {}", summary_path.display());
    Ok(0)
}
