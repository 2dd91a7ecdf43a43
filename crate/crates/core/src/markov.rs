//! Sub-Markov parameters: words, canonical enumeration order, exact counts,
//! and streaming evaluation.
//!
//! A word `s = (j_1, ..., j_m)` over the alphabet `{0, ..., n_p}` selects a
//! product of state coefficients, and together with an output index `q` and an
//! input index `q0` it names the parameter
//!
//! ```text
//! eta_{q,q0}(s) = C_q A_{j_1} A_{j_2} ... A_{j_m} B_{q0},
//! ```
//!
//! with the empty word giving `C_q B_{q0}`. These are the coefficients of the
//! model's response expansion; two models with equal parameters up to word
//! length `N` produce identical zero-state outputs up to time `N + 1`. Their
//! number grows like `(n_p + 1)^{N}`, which is why every bulk operation here
//! takes an explicit cap and refuses oversized requests before allocating.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::LpvSsModel;

/// Default ceiling on the number of parameters a bulk enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 4_000_000;

/// A word over the symbol alphabet `{0, ..., n_p}` indexing a product of state
/// coefficients, in left-to-right product order. The empty word indexes the
/// empty product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Word {
    fn from(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }
}

/// Shortlex: shorter words first, ties broken lexicographically.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// The empty word prints as `-`, otherwise symbols joined by dots: `1.0.2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Full name of one sub-Markov parameter. The derived ordering (word, then
/// output index, then input index, with words compared shortlex) is the
/// canonical enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubMarkovIndex {
    pub word: Word,
    pub q: usize,
    pub q0: usize,
}

/// Number of words of length at most `depth` over `n_p + 1` symbols:
/// `((n_p + 1)^{depth + 1} - 1) / n_p`. `None` on arithmetic overflow.
pub(crate) fn word_count(n_p: usize, depth: usize) -> Option<u128> {
    let base = n_p as u128 + 1;
    let exp = u32::try_from(depth.checked_add(1)?).ok()?;
    let pow = base.checked_pow(exp)?;
    Some((pow - 1) / (base - 1))
}

/// Exact number of sub-Markov parameters with word length at most `depth`:
/// `(n_p + 1)^2 ((n_p + 1)^{depth + 1} - 1) / n_p`. Errors when the count
/// overflows 64 bits, instead of saturating silently.
pub fn markov_count(n_p: usize, depth: usize) -> Result<u64> {
    if n_p == 0 {
        return Err(Error::DimensionMismatch(
            "n_p must be at least 1".into(),
        ));
    }
    let base = n_p as u128 + 1;
    let count = word_count(n_p, depth)
        .and_then(|w| w.checked_mul(base * base))
        .ok_or(Error::CountOverflow { n_p, depth })?;
    u64::try_from(count).map_err(|_| Error::CountOverflow { n_p, depth })
}

impl LpvSsModel {
    /// Evaluate a single sub-Markov parameter
    /// `C_q A_{j_1} ... A_{j_m} B_{q0}` (an `n_y x n_u` matrix).
    pub fn sub_markov(&self, index: &SubMarkovIndex) -> Result<DMatrix<f64>> {
        let n_p = self.n_p();
        for (name, value) in [("q", index.q), ("q0", index.q0)] {
            if value > n_p {
                return Err(Error::IndexOutOfRange(format!(
                    "{name} = {value} exceeds n_p = {n_p}"
                )));
            }
        }
        if let Some(&j) = index.word.symbols().iter().find(|&&j| j > n_p) {
            return Err(Error::IndexOutOfRange(format!(
                "word symbol {j} exceeds n_p = {n_p}"
            )));
        }
        let mut row = self.c()[index.q].clone();
        for &j in index.word.symbols() {
            row *= &self.a()[j];
        }
        Ok(row * &self.b()[index.q0])
    }

    /// All output coefficients stacked vertically: `(n_p + 1) n_y x n_x`, the
    /// block for output index `q` at rows `q n_y ..`.
    pub(crate) fn stacked_c(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros((self.n_p() + 1) * self.n_y(), self.n_x());
        for (q, cq) in self.c().iter().enumerate() {
            out.view_mut((q * self.n_y(), 0), (self.n_y(), self.n_x()))
                .copy_from(cq);
        }
        out
    }

    /// All input coefficients stacked horizontally: `n_x x (n_p + 1) n_u`, the
    /// block for input index `q0` at columns `q0 n_u ..`.
    pub(crate) fn stacked_b(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n_x(), (self.n_p() + 1) * self.n_u());
        for (q0, bq) in self.b().iter().enumerate() {
            out.view_mut((0, q0 * self.n_u()), (self.n_x(), self.n_u()))
                .copy_from(bq);
        }
        out
    }
}

/// Enumerate every sub-Markov parameter with word length at most `depth`, in
/// canonical order: ascending word length, then lexicographic word, then output
/// index `q`, then input index `q0`. The exact count is checked against `cap`
/// before anything is allocated.
pub fn enumerate_sub_markov(
    model: &LpvSsModel,
    depth: usize,
    cap: u64,
) -> Result<Vec<(SubMarkovIndex, DMatrix<f64>)>> {
    let required = markov_count(model.n_p(), depth)?;
    if required > cap {
        return Err(Error::EnumerationTooLarge {
            required: required as u128,
            cap,
        });
    }
    let (n_y, n_u, n_p) = (model.n_y(), model.n_u(), model.n_p());
    let cstack = model.stacked_c();
    let bstack = model.stacked_b();
    let mut out = Vec::with_capacity(required as usize);
    // Walk words breadth-first, one level per word length; within a level the
    // children of lexicographically sorted parents, visited with ascending
    // symbol, stay lexicographically sorted.
    let mut level: Vec<(Vec<usize>, DMatrix<f64>)> =
        vec![(Vec::new(), DMatrix::identity(model.n_x(), model.n_x()))];
    for len in 0..=depth {
        for (word, product) in &level {
            let all = &cstack * product * &bstack;
            for q in 0..=n_p {
                for q0 in 0..=n_p {
                    let block = all.view((q * n_y, q0 * n_u), (n_y, n_u)).into_owned();
                    out.push((
                        SubMarkovIndex {
                            word: Word(word.clone()),
                            q,
                            q0,
                        },
                        block,
                    ));
                }
            }
        }
        if len == depth {
            break;
        }
        let mut next = Vec::with_capacity(level.len() * (n_p + 1));
        for (word, product) in &level {
            for (j, aj) in model.a().iter().enumerate() {
                let mut w = word.clone();
                w.push(j);
                next.push((w, product * aj));
            }
        }
        level = next;
    }
    Ok(out)
}

/// Visit the stacked parameter blocks of two models in lockstep, one call per
/// word with `|s| <= depth`, without materializing anything. Each block is the
/// `(n_p + 1) n_y x (n_p + 1) n_u` matrix holding `eta_{q,q0}(s)` for all
/// `q, q0` at once. Callers are responsible for capping the depth.
pub(crate) fn walk_sub_markov_blocks<F>(
    m1: &LpvSsModel,
    m2: &LpvSsModel,
    depth: usize,
    f: &mut F,
) where
    F: FnMut(&DMatrix<f64>, &DMatrix<f64>),
{
    let (c1, b1) = (m1.stacked_c(), m1.stacked_b());
    let (c2, b2) = (m2.stacked_c(), m2.stacked_b());

    fn rec<F: FnMut(&DMatrix<f64>, &DMatrix<f64>)>(
        m1: &LpvSsModel,
        m2: &LpvSsModel,
        c1: &DMatrix<f64>,
        b1: &DMatrix<f64>,
        c2: &DMatrix<f64>,
        b2: &DMatrix<f64>,
        q1: &DMatrix<f64>,
        q2: &DMatrix<f64>,
        depth_left: usize,
        f: &mut F,
    ) {
        f(&(c1 * q1 * b1), &(c2 * q2 * b2));
        if depth_left == 0 {
            return;
        }
        for (a1, a2) in m1.a().iter().zip(m2.a()) {
            rec(
                m1,
                m2,
                c1,
                b1,
                c2,
                b2,
                &(q1 * a1),
                &(q2 * a2),
                depth_left - 1,
                f,
            );
        }
    }

    let id1 = DMatrix::identity(m1.n_x(), m1.n_x());
    let id2 = DMatrix::identity(m2.n_x(), m2.n_x());
    rec(m1, m2, &c1, &b1, &c2, &b2, &id1, &id2, depth, f);
}
