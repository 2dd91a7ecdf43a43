//! Built-in example models used by tests, the benchmark harness, and
//! documentation.

use nalgebra::DMatrix;

use crate::model::LpvSsModel;

/// Seven-state single-input single-output cascade with five varying scheduling
/// components.
///
/// State `i` is driven by state `i + 1` through scheduling component `i` (the
/// first link through the constant term), each link with its own gain pair;
/// the six input coefficients inject into distinct states through unit
/// columns, and every output coefficient reads the first state. The model is
/// reachable and observable, its reachability rank saturates after one
/// iteration (6, then 7), while its observability rank grows by one per
/// iteration (1 through 7 at depth 6) — which is what makes it a good
/// stress case for depth-dependent reduction.
pub fn cascade_model() -> LpvSsModel {
    let n = 7;
    let gains: [(usize, f64, f64); 6] = [
        (0, -0.5, 0.5471),
        (1, 0.3, 0.2285),
        (2, -0.4, 0.4741),
        (3, -0.7, 0.9362),
        (4, 0.5, 0.4367),
        (5, 0.1, 0.0573),
    ];
    let a: Vec<_> = gains
        .iter()
        .map(|&(row, diag, upper)| {
            let mut m = DMatrix::zeros(n, n);
            m[(row, row)] = diag;
            m[(row, row + 1)] = upper;
            m
        })
        .collect();
    let b: Vec<_> = [6, 5, 4, 0, 1, 2]
        .iter()
        .map(|&row| {
            let mut m = DMatrix::zeros(n, 1);
            m[(row, 0)] = 1.0;
            m
        })
        .collect();
    let c = vec![
        {
            let mut m = DMatrix::zeros(1, n);
            m[(0, 0)] = 1.0;
            m
        };
        6
    ];
    LpvSsModel::new(n, 1, 1, 5, a, b, c).expect("fixture is valid")
}

/// Embed a model into a larger state space by appending `extra` states with
/// zero rows and columns everywhere: the appended states are unreachable and
/// unobservable, and the response map is unchanged.
pub fn zero_pad_states(model: &LpvSsModel, extra: usize) -> LpvSsModel {
    let (n, n_u, n_y) = (model.n_x(), model.n_u(), model.n_y());
    let big = n + extra;
    let a: Vec<_> = model
        .a()
        .iter()
        .map(|ai| {
            let mut m = DMatrix::zeros(big, big);
            m.view_mut((0, 0), (n, n)).copy_from(ai);
            m
        })
        .collect();
    let b: Vec<_> = model
        .b()
        .iter()
        .map(|bi| {
            let mut m = DMatrix::zeros(big, n_u);
            m.view_mut((0, 0), (n, n_u)).copy_from(bi);
            m
        })
        .collect();
    let c: Vec<_> = model
        .c()
        .iter()
        .map(|ci| {
            let mut m = DMatrix::zeros(n_y, big);
            m.view_mut((0, 0), (n_y, n)).copy_from(ci);
            m
        })
        .collect();
    LpvSsModel::new(big, n_u, n_y, model.n_p(), a, b, c).expect("padding preserves validity")
}
