//! The reduction-versus-original simulation experiment behind `lpvred
//! compare`: reduce once, then score the reduced model's response against the
//! original over many seeded trials.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use nalgebra::DVector;

use lpvred_core::reduce::reduce;
use lpvred_core::{io, LpvSsModel, Mode};

use crate::bfr::{bfr, BfrStats};
use crate::signals::{per_component_ranges, random_signals, SchedRange};

/// Everything that determines a comparison experiment. Two equal specs
/// produce byte-identical reports.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub model_path: PathBuf,
    /// Word length the reduction preserves (the subspace iteration depth).
    pub depth: usize,
    pub mode: Mode,
    /// Rank threshold for the reduction (`0` = automatic).
    pub tol: f64,
    /// Number of independent signal draws; at least 1.
    pub trials: usize,
    /// Simulated steps beyond `depth`; each trial runs `depth + horizon`
    /// steps. At least 1.
    pub horizon: usize,
    pub seed: u64,
    /// Per-component scheduling ranges as given on the command line: empty
    /// means the default `[-1, 1]` everywhere, a single entry applies to all
    /// components.
    pub sched_ranges: Vec<SchedRange>,
    /// Directory for per-trial series dumps (one file per trial), if any.
    pub dump_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.trials >= 1, "trials must be at least 1");
        anyhow::ensure!(self.horizon >= 1, "horizon must be at least 1");
        Ok(())
    }
}

/// Deterministic outcome of a comparison experiment — everything except the
/// wall-clock timing, which [`run_compare`] returns separately so reports
/// stay byte-identical across runs.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub model_path: PathBuf,
    pub n_u: usize,
    pub n_y: usize,
    pub n_p: usize,
    pub mode: Mode,
    pub depth: usize,
    pub original_order: usize,
    pub order: usize,
    /// Word length through which sub-Markov parameters are provably matched.
    pub matched_depth: usize,
    pub trials: usize,
    /// Simulated steps per trial (`depth + horizon`).
    pub steps: usize,
    pub seed: u64,
    /// One range per scheduling component.
    pub sched_ranges: Vec<SchedRange>,
    pub stats: BfrStats,
    /// Per trial, the number of leading time steps over which the outputs
    /// agree (within `1e-9` relative to the reference magnitude); equal to
    /// `steps` when they never disagree. A prefix of `k` steps means the
    /// outputs agree for every `t < k`.
    pub exact_match_prefix: Vec<usize>,
    /// The shortest `exact_match_prefix` over all trials.
    pub min_exact_match_prefix: usize,
    /// Lower bound on every prefix implied by the matched word length:
    /// parameters matched through word length `k` force equal outputs through
    /// `t = k + 1`, i.e. a prefix of at least `k + 2` steps.
    pub guaranteed_prefix: usize,
    pub warnings: Vec<String>,
}

/// Number of leading time steps over which `y` and `ybar` agree, where
/// "agree" at time `t` is `|y_i - ybar_i| <= 1e-9 (1 + max|y(t)|)` per
/// component; `y.len()` when they never disagree.
fn exact_match_prefix(y: &[DVector<f64>], ybar: &[DVector<f64>]) -> usize {
    y.iter()
        .zip(ybar)
        .take_while(|(a, b)| {
            let scale = 1.0 + a.amax();
            a.iter()
                .zip(b.iter())
                .all(|(x, z)| (x - z).abs() <= 1e-9 * scale)
        })
        .count()
}

/// Run the comparison: load the model, reduce it once (timed), then for each
/// trial draw seeded signals, simulate original and reduced model from zero
/// initial state over `depth + horizon` steps, and score with the best fit
/// rate. Returns the deterministic report and the wall-clock seconds of the
/// reduction call.
///
/// A trial whose simulation fails aborts the whole run with the trial index
/// in the error.
pub fn run_compare(spec: &ExperimentSpec) -> anyhow::Result<(CompareReport, f64)> {
    spec.validate()?;
    let model = io::load_model(&spec.model_path)
        .with_context(|| format!("loading {}", spec.model_path.display()))?;
    let ranges = per_component_ranges(&spec.sched_ranges, model.n_p())?;

    let started = Instant::now();
    let result = reduce(&model, spec.depth, spec.mode, spec.tol)?;
    let reduction_seconds = started.elapsed().as_secs_f64();

    let steps = spec.depth + spec.horizon;
    let x0_full = DVector::zeros(model.n_x());
    let x0_red = DVector::zeros(result.reduced.n_x());
    let mut values = Vec::with_capacity(spec.trials);
    let mut exact = Vec::with_capacity(spec.trials);
    for trial in 0..spec.trials {
        let (u, p) = random_signals(spec.seed, trial as u64, steps, model.n_u(), &ranges);
        let y = simulate_outputs(&model, &x0_full, &u, &p, trial)?;
        let ybar = simulate_outputs(&result.reduced, &x0_red, &u, &p, trial)?;
        values.push(bfr(&y, &ybar).with_context(|| format!("scoring trial {trial}"))?);
        exact.push(exact_match_prefix(&y, &ybar));
        if let Some(dir) = &spec.dump_dir {
            dump_trial(dir, trial, &y, &ybar)
                .with_context(|| format!("dumping trial {trial}"))?;
        }
    }

    let stats = BfrStats::from_values(values).expect("trials >= 1");
    let min_exact = exact.iter().copied().min().expect("trials >= 1");
    let report = CompareReport {
        model_path: spec.model_path.clone(),
        n_u: model.n_u(),
        n_y: model.n_y(),
        n_p: model.n_p(),
        mode: spec.mode,
        depth: spec.depth,
        original_order: model.n_x(),
        order: result.order,
        matched_depth: result.matched_depth,
        trials: spec.trials,
        steps,
        seed: spec.seed,
        sched_ranges: ranges,
        stats,
        exact_match_prefix: exact,
        min_exact_match_prefix: min_exact,
        guaranteed_prefix: result.matched_depth + 2,
        warnings: result.warnings,
    };
    Ok((report, reduction_seconds))
}

fn simulate_outputs(
    model: &LpvSsModel,
    x0: &DVector<f64>,
    u: &[DVector<f64>],
    p: &[DVector<f64>],
    trial: usize,
) -> anyhow::Result<Vec<DVector<f64>>> {
    Ok(model
        .simulate(x0, u, p)
        .with_context(|| format!("simulating trial {trial}"))?
        .y)
}

/// One tab-separated file per trial: time index, reference outputs, reduced
/// outputs. Suitable for external plotting.
fn dump_trial(
    dir: &std::path::Path,
    trial: usize,
    y: &[DVector<f64>],
    ybar: &[DVector<f64>],
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut file = std::fs::File::create(dir.join(format!("trial-{trial:04}.tsv")))?;
    write!(file, "t")?;
    for i in 0..y[0].len() {
        write!(file, "\ty{i}")?;
    }
    for i in 0..y[0].len() {
        write!(file, "\tybar{i}")?;
    }
    writeln!(file)?;
    for (t, (a, b)) in y.iter().zip(ybar).enumerate() {
        write!(file, "{t}")?;
        for v in a.iter().chain(b.iter()) {
            write!(file, "\t{v}")?;
        }
        writeln!(file)?;
    }
    Ok(())
}

/// Render the report: a human-readable summary followed by one `key value`
/// line per quantity (the machine-readable half; per-trial values included).
/// Uses shortest round-tripping decimal formatting throughout, so the output
/// is byte-identical across runs of the same spec.
pub fn write_report(mut out: impl Write, report: &CompareReport) -> std::io::Result<()> {
    let r = report;
    writeln!(
        out,
        "model: {} (n_x={}, n_u={}, n_y={}, n_p={})",
        r.model_path.display(),
        r.original_order,
        r.n_u,
        r.n_y,
        r.n_p
    )?;
    writeln!(
        out,
        "reduction: mode {} at depth {}, order {} -> {}, parameters matched through word length {}",
        r.mode, r.depth, r.original_order, r.order, r.matched_depth
    )?;
    for w in &r.warnings {
        writeln!(out, "warning: {w}")?;
    }
    let ranges: Vec<String> = r.sched_ranges.iter().map(|s| s.to_string()).collect();
    writeln!(out, "scheduling: uniform over {}", ranges.join(" x "))?;
    writeln!(
        out,
        "trials: {}, {} steps each, seed {}",
        r.trials, r.steps, r.seed
    )?;
    writeln!(
        out,
        "exact match: the first {} steps agree on every trial (guaranteed: {})",
        r.min_exact_match_prefix, r.guaranteed_prefix
    )?;
    writeln!(
        out,
        "BFR: mean {}%, best {}%, worst {}%",
        r.stats.mean, r.stats.best, r.stats.worst
    )?;
    writeln!(out)?;
    writeln!(out, "bfr_mean {}", r.stats.mean)?;
    writeln!(out, "bfr_best {}", r.stats.best)?;
    writeln!(out, "bfr_worst {}", r.stats.worst)?;
    writeln!(out, "exact_match_min_prefix {}", r.min_exact_match_prefix)?;
    for (trial, (v, k)) in r
        .stats
        .values
        .iter()
        .zip(&r.exact_match_prefix)
        .enumerate()
    {
        writeln!(out, "trial {trial} bfr {v} exact_prefix {k}")?;
    }
    Ok(())
}
