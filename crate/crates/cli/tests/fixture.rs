//! The committed model file must stay bit-for-bit equal to the programmatic
//! fixture it was generated from.

use std::path::PathBuf;

use lpvred_core::fixtures::cascade_model;
use lpvred_core::io::load_model;
use lpvred_core::subspace::{is_observable, is_reachable};

fn cascade_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models/cascade7.json")
}

#[test]
fn the_committed_model_file_equals_the_programmatic_fixture() {
    let loaded = load_model(cascade_path()).unwrap();
    assert_eq!(loaded, cascade_model());
}

#[test]
fn the_committed_model_is_minimal() {
    let m = load_model(cascade_path()).unwrap();
    assert!(is_reachable(&m, 0.0));
    assert!(is_observable(&m, 0.0));
}

#[test]
fn spot_checked_entries_match_the_published_values() {
    let m = load_model(cascade_path()).unwrap();
    assert_eq!(m.n_x(), 7);
    assert_eq!(m.n_p(), 5);
    assert_eq!((m.n_u(), m.n_y()), (1, 1));
    assert_eq!(m.a()[0][(0, 0)], -0.5);
    assert_eq!(m.a()[0][(0, 1)], 0.5471);
    assert_eq!(m.a()[3][(3, 3)], -0.7);
    assert_eq!(m.a()[5][(5, 6)], 0.0573);
    assert_eq!(m.b()[0][(6, 0)], 1.0);
    assert_eq!(m.b()[3][(0, 0)], 1.0);
    assert_eq!(m.c()[2][(0, 0)], 1.0);
}
