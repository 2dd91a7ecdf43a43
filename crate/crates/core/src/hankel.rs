//! Explicit extended reachability and observability matrices and the finite
//! Hankel matrix they factor.
//!
//! These are the brute-force counterparts of the iterated subspaces in
//! [`crate::subspace`]: the extended reachability matrix stacks the state
//! vectors `A_{j_k} ... A_{j_1} B_{q0}` for every word of length at most `N`
//! side by side, the extended observability matrix stacks the row blocks
//! `C_q A_{j_1} ... A_{j_k}`, and their product is the Hankel matrix whose
//! block at (row word, column word) is the sub-Markov parameter indexed by the
//! row word followed by the reversed column word.
//!
//! Their dimensions grow like `(n_p + 1)^{N + 1}`, so every constructor here
//! computes the exact dimensions first and refuses to allocate anything when
//! the entry count exceeds the cap.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::markov::{word_count, SubMarkovIndex, Word};
use crate::model::LpvSsModel;
use crate::subspace::numerical_rank;

/// Default ceiling on the number of entries an explicit matrix may hold.
pub const DEFAULT_HANKEL_CAP: u64 = 1_000_000;

/// Column count of the depth-`N` extended reachability matrix:
/// `n_u (n_p + 1) ((n_p + 1)^{N+1} - 1) / n_p`.
pub fn extended_reach_cols(n_u: usize, n_p: usize, depth: usize) -> Result<u128> {
    let words = word_count(n_p, depth).ok_or(Error::CountOverflow { n_p, depth })?;
    words
        .checked_mul(n_p as u128 + 1)
        .and_then(|v| v.checked_mul(n_u as u128))
        .ok_or(Error::CountOverflow { n_p, depth })
}

/// Row count of the depth-`N` extended observability matrix:
/// `n_y (n_p + 1) ((n_p + 1)^{N+1} - 1) / n_p`.
pub fn extended_obs_rows(n_y: usize, n_p: usize, depth: usize) -> Result<u128> {
    extended_reach_cols(n_y, n_p, depth)
}

fn check_entries(rows: u128, cols: u128, cap: u64) -> Result<()> {
    let entries = rows
        .checked_mul(cols)
        .ok_or(Error::MatrixTooLarge {
            rows,
            cols,
            entries: u128::MAX,
            cap,
        })?;
    if entries > cap as u128 {
        return Err(Error::MatrixTooLarge {
            rows,
            cols,
            entries,
            cap,
        });
    }
    Ok(())
}

/// Level-by-level construction shared by both extended matrices. Each level
/// holds one `n_x`-by-`(n_p + 1) n_u` (or transposed) block per word; pushing a
/// level applies every `A_j` and extends the words, preserving lexicographic
/// order within each length.
fn reach_blocks(model: &LpvSsModel, depth: usize) -> Vec<(Word, DMatrix<f64>)> {
    let mut out = Vec::new();
    let mut level = vec![(Vec::new(), model.stacked_b())];
    for len in 0..=depth {
        out.extend(
            level
                .iter()
                .map(|(w, block)| (Word(w.clone()), block.clone())),
        );
        if len == depth {
            break;
        }
        let mut next = Vec::with_capacity(level.len() * (model.n_p() + 1));
        for (word, block) in &level {
            for (j, aj) in model.a().iter().enumerate() {
                let mut w = word.clone();
                w.push(j);
                // Appending a symbol applies that state map on the left, so a
                // column for word (j_1 ... j_k) is A_{j_k} ... A_{j_1} B_{q0}.
                next.push((w, aj * block));
            }
        }
        level = next;
    }
    out
}

fn obs_blocks(model: &LpvSsModel, depth: usize) -> Vec<(Word, DMatrix<f64>)> {
    let mut out = Vec::new();
    let mut level = vec![(Vec::new(), model.stacked_c())];
    for len in 0..=depth {
        out.extend(
            level
                .iter()
                .map(|(w, block)| (Word(w.clone()), block.clone())),
        );
        if len == depth {
            break;
        }
        let mut next = Vec::with_capacity(level.len() * (model.n_p() + 1));
        for (word, block) in &level {
            for (j, aj) in model.a().iter().enumerate() {
                let mut w = word.clone();
                w.push(j);
                // Appending a symbol multiplies on the right, so a row block
                // for word (j_1 ... j_k) is C_q A_{j_1} ... A_{j_k}.
                next.push((w, block * aj));
            }
        }
        level = next;
    }
    out
}

fn assemble_reach(
    model: &LpvSsModel,
    blocks: Vec<(Word, DMatrix<f64>)>,
) -> (DMatrix<f64>, Vec<(Word, usize)>) {
    let group = (model.n_p() + 1) * model.n_u();
    let mut matrix = DMatrix::zeros(model.n_x(), blocks.len() * group);
    let mut labels = Vec::with_capacity(blocks.len() * (model.n_p() + 1));
    for (i, (word, block)) in blocks.iter().enumerate() {
        matrix
            .view_mut((0, i * group), (model.n_x(), group))
            .copy_from(block);
        for q0 in 0..=model.n_p() {
            labels.push((word.clone(), q0));
        }
    }
    (matrix, labels)
}

fn assemble_obs(
    model: &LpvSsModel,
    blocks: Vec<(Word, DMatrix<f64>)>,
) -> (DMatrix<f64>, Vec<(Word, usize)>) {
    let group = (model.n_p() + 1) * model.n_y();
    let mut matrix = DMatrix::zeros(blocks.len() * group, model.n_x());
    let mut labels = Vec::with_capacity(blocks.len() * (model.n_p() + 1));
    for (i, (word, block)) in blocks.iter().enumerate() {
        matrix
            .view_mut((i * group, 0), (group, model.n_x()))
            .copy_from(block);
        for q in 0..=model.n_p() {
            labels.push((word.clone(), q));
        }
    }
    (matrix, labels)
}

/// Explicit depth-`N` extended reachability matrix (`n_x` rows, one column
/// block per word and input index in canonical order). Refuses before
/// allocating when its entry count exceeds `cap`.
pub fn extended_reach_matrix(model: &LpvSsModel, depth: usize, cap: u64) -> Result<DMatrix<f64>> {
    let cols = extended_reach_cols(model.n_u(), model.n_p(), depth)?;
    check_entries(model.n_x() as u128, cols, cap)?;
    Ok(assemble_reach(model, reach_blocks(model, depth)).0)
}

/// Explicit depth-`N` extended observability matrix (`n_x` columns, one row
/// block per word and output index in canonical order). Refuses before
/// allocating when its entry count exceeds `cap`.
pub fn extended_obs_matrix(model: &LpvSsModel, depth: usize, cap: u64) -> Result<DMatrix<f64>> {
    let rows = extended_obs_rows(model.n_y(), model.n_p(), depth)?;
    check_entries(rows, model.n_x() as u128, cap)?;
    Ok(assemble_obs(model, obs_blocks(model, depth)).0)
}

/// The factored finite Hankel matrix `H = O_N R_N` with its block labels.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelArtifacts {
    /// Extended reachability factor, `n_x` rows.
    pub reach: DMatrix<f64>,
    /// Extended observability factor, `n_x` columns.
    pub obs: DMatrix<f64>,
    /// Their product; block (i, k) is a sub-Markov parameter.
    pub hankel: DMatrix<f64>,
    pub depth: usize,
    /// Per block row (`n_y` rows each): the word and output index `q`.
    pub row_labels: Vec<(Word, usize)>,
    /// Per block column (`n_u` columns each): the word and input index `q0`.
    pub col_labels: Vec<(Word, usize)>,
}

impl HankelArtifacts {
    /// The sub-Markov parameter occupying the given block: its word is the row
    /// word followed by the reversed column word.
    pub fn block_index(&self, row_block: usize, col_block: usize) -> SubMarkovIndex {
        let (row_word, q) = &self.row_labels[row_block];
        let (col_word, q0) = &self.col_labels[col_block];
        let mut symbols = row_word.symbols().to_vec();
        symbols.extend(col_word.symbols().iter().rev());
        SubMarkovIndex {
            word: Word(symbols),
            q: *q,
            q0: *q0,
        }
    }

    /// Copy of the `n_y x n_u` block at the given block coordinates.
    pub fn block(&self, n_y: usize, n_u: usize, row_block: usize, col_block: usize) -> DMatrix<f64> {
        self.hankel
            .view((row_block * n_y, col_block * n_u), (n_y, n_u))
            .into_owned()
    }
}

/// Build the depth-`N` Hankel matrix together with its two factors and block
/// labels. The cap applies to the product and to both factors, so nothing is
/// allocated unless all three fit.
pub fn hankel(model: &LpvSsModel, depth: usize, cap: u64) -> Result<HankelArtifacts> {
    let rows = extended_obs_rows(model.n_y(), model.n_p(), depth)?;
    let cols = extended_reach_cols(model.n_u(), model.n_p(), depth)?;
    check_entries(rows, cols, cap)?;
    check_entries(rows, model.n_x() as u128, cap)?;
    check_entries(model.n_x() as u128, cols, cap)?;
    let (reach, col_labels) = assemble_reach(model, reach_blocks(model, depth));
    let (obs, row_labels) = assemble_obs(model, obs_blocks(model, depth));
    let hankel = &obs * &reach;
    Ok(HankelArtifacts {
        reach,
        obs,
        hankel,
        depth,
        row_labels,
        col_labels,
    })
}

/// Numerical rank of the depth-`N` Hankel matrix. For a model that is both
/// reachable and observable this equals `n_x` once `N` is at least `n_x - 1`.
pub fn hankel_rank(model: &LpvSsModel, depth: usize, tol: f64, cap: u64) -> Result<usize> {
    Ok(numerical_rank(&hankel(model, depth, cap)?.hankel, tol))
}
