//! Best-fit-rate metric: formula spot checks, degenerate cases, and the
//! aggregate ordering invariant.

use approx::assert_abs_diff_eq;
use nalgebra::DVector;

use lpvred_cli::bfr::{bfr, BfrStats};

fn seq(values: &[f64]) -> Vec<DVector<f64>> {
    values.iter().map(|&v| DVector::from_vec(vec![v])).collect()
}

#[test]
fn a_perfect_match_scores_one_hundred() {
    let y = seq(&[1.0, -2.0, 0.5, 3.0]);
    assert_eq!(bfr(&y, &y.clone()).unwrap(), 100.0);
}

#[test]
fn predicting_the_constant_mean_scores_zero() {
    let y = seq(&[1.0, 3.0, 5.0, 7.0]); // mean 4, nonconstant
    let ybar = seq(&[4.0, 4.0, 4.0, 4.0]);
    assert_eq!(bfr(&y, &ybar).unwrap(), 0.0);
}

#[test]
fn a_residual_twice_the_mean_deviation_clamps_to_zero() {
    // y deviates from its mean by (-1, 1); ybar errs by twice that, so the
    // ratio is 2 and the unclamped score would be -100.
    let y = seq(&[1.0, 3.0]);
    let ybar = seq(&[3.0, 1.0]);
    assert_eq!(bfr(&y, &ybar).unwrap(), 0.0);
}

#[test]
fn identical_constant_signals_score_one_hundred() {
    let y = seq(&[2.0, 2.0, 2.0]);
    assert_eq!(bfr(&y, &y.clone()).unwrap(), 100.0);
}

#[test]
fn a_constant_reference_with_any_error_scores_zero() {
    let y = seq(&[2.0, 2.0, 2.0]);
    let ybar = seq(&[2.0, 2.0, 2.0000001]);
    assert_eq!(bfr(&y, &ybar).unwrap(), 0.0);
}

#[test]
fn a_halved_error_scores_fifty_percent() {
    // Deviation from the mean is (-1, 1); an error of exactly half that norm
    // gives 100 (1 - 1/2) = 50.
    let y = seq(&[1.0, 3.0]);
    let ybar = seq(&[1.5, 2.5]);
    assert_abs_diff_eq!(bfr(&y, &ybar).unwrap(), 50.0, epsilon = 1e-12);
}

#[test]
fn vector_outputs_use_the_euclidean_norm_per_step() {
    let y = vec![
        DVector::from_vec(vec![1.0, 0.0]),
        DVector::from_vec(vec![-1.0, 0.0]),
    ];
    // Error vector (0, 1) each step: residual sqrt(2), deviation sqrt(2).
    let ybar = vec![
        DVector::from_vec(vec![1.0, 1.0]),
        DVector::from_vec(vec![-1.0, 1.0]),
    ];
    assert_abs_diff_eq!(bfr(&y, &ybar).unwrap(), 0.0, epsilon = 1e-12);
}

#[test]
fn mismatched_inputs_are_rejected() {
    let y = seq(&[1.0, 2.0]);
    assert!(bfr(&y, &seq(&[1.0])).is_err(), "length mismatch");
    assert!(bfr(&[], &[]).is_err(), "empty sequences");
    let wider = vec![DVector::from_vec(vec![1.0, 2.0]); 2];
    assert!(bfr(&y, &wider).is_err(), "dimension mismatch");
}

#[test]
fn stats_preserve_trial_order_and_satisfy_the_ordering_invariant() {
    let stats = BfrStats::from_values(vec![90.0, 100.0, 20.0, 55.5]).unwrap();
    assert_eq!(stats.values, vec![90.0, 100.0, 20.0, 55.5]);
    assert_eq!(stats.best, 100.0);
    assert_eq!(stats.worst, 20.0);
    assert_abs_diff_eq!(stats.mean, 66.375, epsilon = 1e-12);
    assert!(stats.best >= stats.mean && stats.mean >= stats.worst);
    assert!(BfrStats::from_values(Vec::new()).is_none());
}

#[test]
fn scores_stay_within_zero_and_one_hundred() {
    // A fixed pseudo-random battery; every score must land in [0, 100] by
    // the clamp and the ordering invariant must hold for the aggregate.
    let mut values = Vec::new();
    for k in 0..50u32 {
        let phase = k as f64 * 0.7;
        let y = seq(&[phase.sin(), (phase + 1.0).sin(), (phase + 2.0).sin(), 0.3]);
        let ybar = seq(&[
            phase.sin() + 0.1 * (k as f64).cos(),
            (phase + 1.0).sin() - 0.2,
            (phase + 2.0).sin() + 0.05 * k as f64,
            0.3,
        ]);
        values.push(bfr(&y, &ybar).unwrap());
    }
    assert!(values.iter().all(|v| (0.0..=100.0).contains(v)));
    let stats = BfrStats::from_values(values).unwrap();
    assert!(stats.best >= stats.mean && stats.mean >= stats.worst);
}
