//! Monte Carlo growth of log R² for the decaying random model, compared with
//! the second-moment prediction for uniform disorder.
//!
//! Each step multiplies R² by `1 + t sin 2φ + t² sin² φ` with
//! `t = β' ω_n n^{-α}`; averaging over the phase gives
//! `E log R²(n) ≈ (β'²/4) E[ω²] Σ_{m<n} m^{-2α}`, and `β'²/4 = 2p` at α = 1/2.
//! Uniform ω on `[-1, 1]` has `E[ω²] = 1/3`.

use std::f64::consts::PI;

use deltacomb::random_spectra::{decay_exponent, least_squares_slope, prufer_log_r2_at};
use deltacomb::RandomModel;

const LAMBDA: f64 = PI * PI / 9.0;
const OMEGA_SQ: f64 = 1.0 / 3.0;

fn mean_log_r2(model: &RandomModel, checkpoints: &[usize], trials: u64) -> Vec<f64> {
    let mut mean = vec![0.0; checkpoints.len()];
    for r in 0..trials {
        for (m, x) in mean.iter_mut().zip(prufer_log_r2_at(model, LAMBDA, checkpoints, r).unwrap()) {
            *m += x / trials as f64;
        }
    }
    mean
}

#[test]
fn critical_growth_rate_is_two_p_times_second_moment() {
    let model = RandomModel::new(2.0, 0.5, 0.0, 77).unwrap();
    let p = decay_exponent(LAMBDA, 0.0, 2.0).unwrap();
    assert!((p - 0.4559).abs() < 1e-4);
    let checkpoints: Vec<usize> = (0..=8).map(|i| (1000.0 * 10f64.powf(i as f64 / 4.0)).round() as usize).collect();
    let mean = mean_log_r2(&model, &checkpoints, 200);
    let x: Vec<f64> = checkpoints.iter().map(|&n| (n as f64).ln()).collect();
    let slope = least_squares_slope(&x, &mean).unwrap();
    let expected = 2.0 * p * OMEGA_SQ;
    assert!((slope / expected - 1.0).abs() < 0.15, "slope {slope} vs {expected}");
}

#[test]
fn subcritical_stretched_exponent_matches_second_moment() {
    let alpha = 0.3;
    let model = RandomModel::new(2.0, alpha, 0.0, 79).unwrap();
    let p = decay_exponent(LAMBDA, 0.0, 2.0).unwrap();
    let checkpoints: Vec<usize> = (0..=12).map(|i| (100.0 * 10f64.powf(i as f64 / 4.0)).round() as usize).collect();
    let mean = mean_log_r2(&model, &checkpoints, 200);
    let x: Vec<f64> = checkpoints.iter().map(|&n| (n as f64).powf(1.0 - 2.0 * alpha)).collect();
    // Σ m^{-2α} ≈ n^{1-2α}/(1-2α), and log R² ≈ 2τ n^{1-2α}
    let tau = 0.5 * least_squares_slope(&x, &mean).unwrap();
    let expected = p * OMEGA_SQ / (1.0 - 2.0 * alpha);
    assert!((tau / expected - 1.0).abs() < 0.2, "tau {tau} vs {expected}");
}
