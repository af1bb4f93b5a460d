//! Quadrature oracles shared by the integration tests and the acceptance
//! suite.
#![allow(dead_code)]

use fuglede_core::interval_domain::exponential;
use fuglede_core::nikodym::{
    band_height, band_length, build_u_p, side, smoothstep_derivative, x_left, NikodymParams, Piece, UProfile,
};
use fuglede_core::Complex64;

/// Composite 8-point Gauss–Legendre quadrature of `e^{2πiνx}` over `[a,b]`.
pub fn quad_exp(nu: f64, a: f64, b: f64) -> Complex64 {
    const X: [f64; 4] = [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
    const W: [f64; 4] = [0.362683783378362, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
    let panels = (((b - a) * nu.abs()).ceil() as usize + 1) * 8;
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            for s in [-1.0, 1.0] {
                acc += exponential(nu, mid + s * x * h / 2.0) * (w * h / 2.0);
            }
        }
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 40)
}

pub fn rect(piece: Piece) -> (f64, f64, f64, f64) {
    match piece {
        Piece::Square(n) => (x_left(n), x_left(n) + side(n), 0.0, side(n)),
        Piece::Band(n) => {
            let x0 = x_left(n) + side(n);
            (x0, x0 + band_length(n), 0.0, band_height(n))
        }
    }
}

/// `∫_piece g(u)` on a 100×100 midpoint grid.
pub fn grid_integral(u: &UProfile, piece: Piece, g: impl Fn(f64) -> f64) -> f64 {
    let (x0, x1, y0, y1) = rect(piece);
    let (hx, hy) = ((x1 - x0) / 100.0, (y1 - y0) / 100.0);
    let mut acc = 0.0;
    for i in 0..100 {
        let x = x0 + (i as f64 + 0.5) * hx;
        let v = g(u.value(x));
        for _ in 0..100 {
            acc += v * hx * hy;
        }
    }
    acc
}

/// `α²·δ·∫|f′|²` by adaptive quadrature along each band.
pub fn grad_oracle(params: &NikodymParams, p: usize) -> f64 {
    let u = build_u_p(params, p).unwrap();
    let n = 4 * p;
    let mut total = 0.0;
    for (band, ramp) in [(n - 1, u.rise), (n, u.fall)] {
        let l = band_length(band);
        let slope = |x: f64| (ramp.height / l * smoothstep_derivative(x / l)).powi(2);
        total += band_height(band) * adaptive_simpson(&slope, 0.0, l, 1e-12 * ramp.height.powi(2) / l);
    }
    u.alpha * u.alpha * total
}

