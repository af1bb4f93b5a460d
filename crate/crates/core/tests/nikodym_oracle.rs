//! Closed-form norms of the dumbbell-chain test functions against
//! quadrature.

use fuglede_core::nikodym::{band_height, band_length, build_u_p, grad1_sq, poincare_quotient, side, NikodymParams};

mod common;
use common::{grad_oracle, grid_integral};

#[test]
fn norm_against_two_dimensional_grid() {
    let params = NikodymParams::default();
    for p in 1..=4 {
        let u = build_u_p(&params, p).unwrap();
        let total: f64 = u.support().iter().map(|&piece| grid_integral(&u, piece, |v| v * v)).sum();
        assert!((total.sqrt() - u.norm()).abs() < 1e-6, "p={p}: {total}");
        assert!((u.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn integral_against_two_dimensional_grid() {
    let params = NikodymParams::default();
    let u = build_u_p(&params, 1).unwrap();
    let total: f64 = u.support().iter().map(|&piece| grid_integral(&u, piece, |v| v)).sum();
    assert!((total - u.integral()).abs() < 1e-6 * u.integral().abs().max(1.0));
}

#[test]
fn gradient_against_adaptive_quadrature() {
    let params = NikodymParams::default();
    for p in 1..=4 {
        let closed = grad1_sq(&params, p).unwrap();
        let oracle = grad_oracle(&params, p);
        assert!((closed - oracle).abs() <= 1e-6 * oracle, "p={p}: {closed} vs {oracle}");
    }
    assert!(grad_oracle(&params, 1) <= (-18f64).exp2());
    for p in 1..=2 {
        assert!(grad_oracle(&params, p) / grad_oracle(&params, p + 1) >= 27f64.exp2());
    }
}

#[test]
fn quotient_against_quadrature() {
    let params = NikodymParams::default();
    let m: f64 = (1..=params.n_max()).map(|n| side(n).powi(2) + band_length(n) * band_height(n)).sum();
    let mut previous = 0.0;
    for p in 1..=3 {
        let u = build_u_p(&params, p).unwrap();
        let mass: f64 = u.support().iter().map(|&piece| grid_integral(&u, piece, |v| v)).sum();
        let energy: f64 = u.support().iter().map(|&piece| grid_integral(&u, piece, |v| v * v)).sum();
        let oracle = (energy - mass * mass / m) / grad_oracle(&params, p);
        let closed = poincare_quotient(&params, p).unwrap();
        assert!((closed - oracle).abs() <= 1e-6 * oracle, "p={p}: {closed} vs {oracle}");
        assert!(oracle > previous);
        previous = oracle;
    }
    assert!(poincare_quotient(&params, 1).unwrap() >= 1e5);
    assert!(poincare_quotient(&params, 2).unwrap() / poincare_quotient(&params, 1).unwrap() >= 1e7);
}
