//! Shared helpers for the integration suites: seeded random models.
#![allow(dead_code)] // each suite links this module and uses a subset

use lpvred_core::LpvSsModel;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random model with small integer coefficients. Integer-valued f64 products
/// stay exact (well inside 2^53 at the sizes used here), so rank decisions and
/// cross-checks against explicitly assembled matrices are unambiguous.
pub fn random_integer_model(
    rng: &mut ChaCha8Rng,
    n_x: usize,
    n_u: usize,
    n_y: usize,
    n_p: usize,
) -> LpvSsModel {
    let int = |rng: &mut ChaCha8Rng, r: usize, c: usize| {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-2i32..=2) as f64)
    };
    let a = (0..=n_p).map(|_| int(rng, n_x, n_x)).collect();
    let b = (0..=n_p).map(|_| int(rng, n_x, n_u)).collect();
    let c = (0..=n_p).map(|_| int(rng, n_y, n_x)).collect();
    LpvSsModel::new(n_x, n_u, n_y, n_p, a, b, c).expect("random model is valid")
}

/// Random dense model with uniform entries in (-1, 1).
pub fn random_model(
    rng: &mut ChaCha8Rng,
    n_x: usize,
    n_u: usize,
    n_y: usize,
    n_p: usize,
) -> LpvSsModel {
    let dense = |rng: &mut ChaCha8Rng, r: usize, c: usize| {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    };
    let a = (0..=n_p).map(|_| dense(rng, n_x, n_x)).collect();
    let b = (0..=n_p).map(|_| dense(rng, n_x, n_u)).collect();
    let c = (0..=n_p).map(|_| dense(rng, n_y, n_x)).collect();
    LpvSsModel::new(n_x, n_u, n_y, n_p, a, b, c).expect("random model is valid")
}

/// Random input/scheduling signal pair of the given length, entries in (-1, 1).
pub fn random_signals(
    rng: &mut ChaCha8Rng,
    n_u: usize,
    n_p: usize,
    len: usize,
) -> (Vec<nalgebra::DVector<f64>>, Vec<nalgebra::DVector<f64>>) {
    let vecs = |rng: &mut ChaCha8Rng, dim: usize, len: usize| {
        (0..len)
            .map(|_| nalgebra::DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0)))
            .collect()
    };
    (vecs(rng, n_u, len), vecs(rng, n_p, len))
}
