//! Seeded random excitation signals for simulation experiments.
//!
//! Inputs are i.i.d. standard normal ("white noise"), scheduling components
//! are i.i.d. uniform over per-component ranges (default `[-1, 1]`). Each
//! trial draws from its own counter-mode stream of the generator, so trial
//! `k` produces the same signals no matter how many trials ran before it or
//! in what order.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use lpvred_core::{Error, Result};

/// Closed interval a scheduling component is drawn uniformly from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedRange {
    pub lo: f64,
    pub hi: f64,
}

impl SchedRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonFinite(format!(
                "scheduling range [{lo}, {hi}] must be finite"
            )));
        }
        if lo > hi {
            return Err(Error::DimensionMismatch(format!(
                "scheduling range [{lo}, {hi}] is empty"
            )));
        }
        Ok(SchedRange { lo, hi })
    }
}

impl Default for SchedRange {
    fn default() -> Self {
        SchedRange { lo: -1.0, hi: 1.0 }
    }
}

impl fmt::Display for SchedRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl FromStr for SchedRange {
    type Err = Error;

    /// Parse `"lo,hi"`, e.g. `-1,1` or `0.2,0.8`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected \"lo,hi\", got {s:?}")))?;
        let parse = |part: &str| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad range endpoint {part:?}: {e}")))
        };
        SchedRange::new(parse(lo)?, parse(hi)?)
    }
}

/// Expand the ranges given on a command line to one per scheduling component:
/// none means the default range everywhere, a single range applies to every
/// component, and otherwise exactly `n_p` ranges are required.
pub fn per_component_ranges(given: &[SchedRange], n_p: usize) -> Result<Vec<SchedRange>> {
    match given.len() {
        0 => Ok(vec![SchedRange::default(); n_p]),
        1 => Ok(vec![given[0]; n_p]),
        n if n == n_p => Ok(given.to_vec()),
        n => Err(Error::DimensionMismatch(format!(
            "{n} scheduling ranges given for n_p = {n_p} components; \
             give none, one, or exactly n_p"
        ))),
    }
}

/// The generator for one `(seed, trial)` pair: a fixed-key ChaCha stream
/// selected by the trial index. Streams of one key are statistically
/// independent, and selecting by index keeps trials reproducible in isolation.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draw the excitation for one trial: `len` standard-normal input samples of
/// dimension `n_u` and `len` scheduling samples uniform over `ranges`
/// (one range per component). Deterministic given `(seed, trial)`.
pub fn random_signals(
    seed: u64,
    trial: u64,
    len: usize,
    n_u: usize,
    ranges: &[SchedRange],
) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let mut rng = trial_rng(seed, trial);
    let u = (0..len)
        .map(|_| DVector::from_fn(n_u, |_, _| rng.sample(StandardNormal)))
        .collect();
    let p = (0..len)
        .map(|_| {
            DVector::from_fn(ranges.len(), |i, _| {
                rng.random_range(ranges[i].lo..=ranges[i].hi)
            })
        })
        .collect();
    (u, p)
}
