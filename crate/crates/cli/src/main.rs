//! `lpvred`: validate, simulate, reduce, minimize, and compare discrete-time
//! LPV state-space models with affine scheduling dependence.
//!
//! Exit codes: 0 success (including a passing check), 1 validation or check
//! failure, 2 size-cap refusal (an enumeration or matrix that would exceed
//! its cap), 3 rank-condition failure of the two-sided reduction, 64 command
//! line usage errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DVector;

use lpvred_cli::experiment::{run_compare, write_report, ExperimentSpec};
use lpvred_cli::signals::{per_component_ranges, random_signals, SchedRange};
use lpvred_core::hankel::{hankel, DEFAULT_HANKEL_CAP};
use lpvred_core::markov::{enumerate_sub_markov, markov_count, DEFAULT_ENUMERATION_CAP};
use lpvred_core::reduce::{
    certify_partial_realization, check_partial_realization, minimize, reduce,
};
use lpvred_core::subspace::{is_observable, is_reachable, numerical_rank};
use lpvred_core::{io, Error, Mode};

#[derive(Parser)]
#[command(name = "lpvred", version)]
#[command(about = "Moment-matching model reduction for LPV state-space models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_sched_range(s: &str) -> Result<SchedRange, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Comma-separated initial state, e.g. `0.1,0,-2`.
#[derive(Debug, Clone)]
struct X0(Vec<f64>);

fn parse_x0(s: &str) -> Result<X0, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad x0 component {part:?}: {e}"))
        })
        .collect::<Result<Vec<f64>, String>>()
        .map(X0)
}

#[derive(Subcommand)]
enum Command {
    /// Check that a model file is well formed and report its dimensions.
    Validate { model: PathBuf },
    /// Simulate a model under seeded random excitation and dump the series.
    Simulate {
        model: PathBuf,
        /// Number of time steps.
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial state, comma-separated (default: zero).
        #[arg(long, value_parser = parse_x0)]
        x0: Option<X0>,
        /// Scheduling range "lo,hi"; repeat for per-component ranges
        /// (default [-1, 1] everywhere).
        #[arg(long = "sched-range", value_parser = parse_sched_range)]
        sched_range: Vec<SchedRange>,
    },
    /// Enumerate the sub-Markov parameters up to a word length.
    Markov {
        model: PathBuf,
        /// Largest word length to enumerate.
        #[arg(long = "N")]
        depth: usize,
        /// Refuse enumerations with more parameters than this.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Reduce a model so parameters up to a word length are preserved.
    Reduce {
        model: PathBuf,
        /// Word length to preserve (modes R and O; mode T preserves 2N).
        #[arg(long = "N")]
        depth: usize,
        /// Projection mode: R (reachability), O (observability), T (two-sided).
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        /// Rank threshold (0 = automatic).
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        /// Output model file; metadata goes to "<out>.meta.json".
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Reduce a model to a minimal realization of the same response map.
    Minimize {
        model: PathBuf,
        /// Rank threshold (0 = automatic).
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compare the sub-Markov parameters of two models up to a word length.
    Check {
        model1: PathBuf,
        model2: PathBuf,
        /// Largest word length to compare.
        #[arg(long = "N")]
        depth: usize,
        /// Relative tolerance for a pass.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Refuse enumerations with more parameters than this.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        /// Use the subspace certificate instead of enumerating; polynomial
        /// in the orders, so deep comparisons stay feasible.
        #[arg(long)]
        certify: bool,
    },
    /// Reduce, then score the reduced model against the original by best fit
    /// rate over seeded random trials.
    Compare {
        model: PathBuf,
        /// Word length to preserve.
        #[arg(long = "N")]
        depth: usize,
        /// Projection mode: R, O, or T.
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        /// Rank threshold for the reduction (0 = automatic).
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Steps simulated beyond N (total N + horizon per trial).
        #[arg(long, default_value_t = 50)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scheduling range "lo,hi"; repeat for per-component ranges
        /// (default [-1, 1] everywhere).
        #[arg(long = "sched-range", value_parser = parse_sched_range)]
        sched_range: Vec<SchedRange>,
        /// Directory for per-trial series dumps (TSV, one file per trial).
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Numerical rank of the explicit finite Hankel matrix.
    HankelRank {
        model: PathBuf,
        /// Hankel depth (both factors use this depth).
        #[arg(long = "N")]
        depth: usize,
        /// Rank threshold (0 = automatic).
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        /// Refuse matrices with more entries than this.
        #[arg(long, env = "LPVRED_HANKEL_CAP", default_value_t = DEFAULT_HANKEL_CAP)]
        cap: u64,
        /// Also write the Hankel matrix as plain text (rows of numbers).
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", render_chain(&e));
            exit_code_for(&e)
        }
    }
}

/// Join the error chain with `: `, skipping causes already embedded in their
/// parent's message (the crate's typed errors display their sources
/// themselves).
fn render_chain(e: &anyhow::Error) -> String {
    let mut message = e.to_string();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !message.contains(&text) {
            message.push_str(": ");
            message.push_str(&text);
        }
    }
    message
}

/// Load a model with the file name attached to any failure.
fn load(path: &std::path::Path) -> anyhow::Result<lpvred_core::LpvSsModel> {
    use anyhow::Context;
    io::load_model(path).with_context(|| format!("loading {}", path.display()))
}

/// Map an error to the documented exit codes by the root cause: size-cap
/// refusals are 2, the two-sided rank condition is 3, everything else
/// (validation, parse, i/o, dimension defects) is 1.
fn exit_code_for(e: &anyhow::Error) -> ExitCode {
    match e.downcast_ref::<Error>() {
        Some(Error::EnumerationTooLarge { .. })
        | Some(Error::MatrixTooLarge { .. })
        | Some(Error::CountOverflow { .. }) => ExitCode::from(2),
        Some(Error::RankCondition { .. }) => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Validate { model } => {
            let m = load(&model)?;
            println!(
                "valid: n_x={}, n_u={}, n_y={}, n_p={}",
                m.n_x(),
                m.n_u(),
                m.n_y(),
                m.n_p()
            );
            println!(
                "reachable: {}, observable: {}",
                if is_reachable(&m, 0.0) { "yes" } else { "no" },
                if is_observable(&m, 0.0) { "yes" } else { "no" }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            model,
            steps,
            seed,
            x0,
            sched_range,
        } => {
            let m = load(&model)?;
            let ranges = per_component_ranges(&sched_range, m.n_p())?;
            let (u, p) = random_signals(seed, 0, steps, m.n_u(), &ranges);
            let x0 = match x0 {
                Some(X0(values)) => DVector::from_vec(values),
                None => DVector::zeros(m.n_x()),
            };
            let trajectory = m.simulate(&x0, &u, &p)?;
            let out = std::io::stdout();
            let mut out = out.lock();
            write!(out, "t")?;
            for i in 0..m.n_u() {
                write!(out, "\tu{i}")?;
            }
            for i in 0..m.n_p() {
                write!(out, "\tp{i}")?;
            }
            for i in 0..m.n_y() {
                write!(out, "\ty{i}")?;
            }
            writeln!(out)?;
            for t in 0..steps {
                write!(out, "{t}")?;
                for v in u[t].iter().chain(p[t].iter()).chain(trajectory.y[t].iter()) {
                    write!(out, "\t{v}")?;
                }
                writeln!(out)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Markov { model, depth, cap } => {
            let m = load(&model)?;
            let count = markov_count(m.n_p(), depth)?;
            let params = enumerate_sub_markov(&m, depth, cap)?;
            let out = std::io::stdout();
            let mut out = out.lock();
            writeln!(
                out,
                "# {count} sub-Markov parameters through word length {depth} \
                 ({} x {} each; word q q0 entries...)",
                m.n_y(),
                m.n_u()
            )?;
            for (index, value) in &params {
                write!(out, "{} {} {}", index.word, index.q, index.q0)?;
                for r in 0..value.nrows() {
                    for c in 0..value.ncols() {
                        write!(out, " {}", value[(r, c)])?;
                    }
                }
                writeln!(out)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce {
            model,
            depth,
            mode,
            tol,
            out,
        } => {
            let m = load(&model)?;
            let result = reduce(&m, depth, mode, tol)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            io::save_model(&out, &result.reduced)?;
            let meta = io::ReductionMeta::from_result(m.n_x(), &result);
            io::save_reduction_meta(meta_path(&out), &meta)?;
            println!(
                "reduced: order {} -> {}, mode {}, depth {}, parameters matched through word length {}",
                m.n_x(),
                result.order,
                result.mode,
                result.depth,
                result.matched_depth
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Minimize { model, tol, out } => {
            let m = load(&model)?;
            let minimal = minimize(&m, tol)?;
            io::save_model(&out, &minimal)?;
            println!("minimized: order {} -> {}", m.n_x(), minimal.n_x());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            model1,
            model2,
            depth,
            tol,
            cap,
            certify,
        } => {
            let m1 = load(&model1)?;
            let m2 = load(&model2)?;
            let pass = if certify {
                let cert = certify_partial_realization(&m1, &m2, depth, tol)?;
                println!(
                    "certificate through word length {}: residual {} (tolerance {}), \
                     subspace depths {} + {}",
                    cert.depth, cert.residual, cert.tol, cert.obs_depth, cert.reach_depth
                );
                cert.pass
            } else {
                let report = check_partial_realization(&m1, &m2, depth, tol, cap)?;
                println!(
                    "compared {} parameters through word length {}: \
                     max abs {}, max rel {} (tolerance {})",
                    report.count, report.depth, report.max_abs, report.max_rel, report.tol
                );
                report.pass
            };
            if pass {
                println!("PASS");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAIL");
                Ok(ExitCode::from(1))
            }
        }
        Command::Compare {
            model,
            depth,
            mode,
            tol,
            trials,
            horizon,
            seed,
            sched_range,
            dump,
        } => {
            let spec = ExperimentSpec {
                model_path: model,
                depth,
                mode,
                tol,
                trials,
                horizon,
                seed,
                sched_ranges: sched_range,
                dump_dir: dump,
            };
            let (report, reduction_seconds) = run_compare(&spec)?;
            eprintln!("reduction wall-clock: {reduction_seconds:.6} s");
            let out = std::io::stdout();
            write_report(out.lock(), &report)?;
            // Matched parameters through word length N force agreement over
            // at least the first N + 1 steps (2N + 1 for mode T); a shorter
            // measured prefix would disprove the reduction.
            let required = match mode {
                Mode::TwoSided => 2 * depth + 1,
                _ => depth + 1,
            };
            let required = required.min(report.steps);
            if report.min_exact_match_prefix < required {
                eprintln!(
                    "check failed: exact-match prefix {} is below the guaranteed {}",
                    report.min_exact_match_prefix, required
                );
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::HankelRank {
            model,
            depth,
            tol,
            cap,
            dump,
        } => {
            let m = load(&model)?;
            let artifacts = hankel(&m, depth, cap)?;
            let rank = numerical_rank(&artifacts.hankel, tol);
            if let Some(path) = dump {
                let mut file = std::fs::File::create(path)?;
                io::write_matrix_text(&mut file, &artifacts.hankel)?;
            }
            println!(
                "hankel rank at depth {}: {} ({} x {} matrix)",
                depth,
                rank,
                artifacts.hankel.nrows(),
                artifacts.hankel.ncols()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Sidecar path for reduction metadata: the output path with `.meta.json`
/// appended.
fn meta_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}
