//! A bounded connected planar domain on which the Poincaré inequality fails.
//!
//! `Ω` is a chain of squares `S_n = (x_n, x_n+s_n) × (0, s_n)` joined by thin
//! bands `B_n = [x_n+s_n, x_{n+1}] × (0, δ_n)` with `s_n = l_n = 2^{−n}` and
//! `δ_n = 2^{−10n}`. The test functions `u_p` equal a constant on `S_{4p}`,
//! ramp down to zero along the two adjacent bands and vanish elsewhere. They
//! have unit norm and disjoint supports while their gradients go to zero, so
//! the Poincaré quotient of `u_p` grows without bound.
//!
//! Every quantity below is a closed-form integral of a piecewise polynomial.

use num::{BigRational, One};
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: usize = 16;

/// Side of `S_n`.
pub fn side(n: usize) -> f64 {
    (-(n as f64)).exp2()
}

/// Length of `B_n`.
pub fn band_length(n: usize) -> f64 {
    (-(n as f64)).exp2()
}

/// Height of `B_n`.
pub fn band_height(n: usize) -> f64 {
    (-10.0 * n as f64).exp2()
}

/// Plateau value `c_p = 2^{4p}`, chosen so that `c_p² s_{4p}² = 1`.
pub fn plateau(p: usize) -> f64 {
    (4.0 * p as f64).exp2()
}

fn pow2(e: i64) -> BigRational {
    let two = BigRational::from_integer(2.into());
    if e >= 0 {
        num::pow(two, e as usize)
    } else {
        BigRational::one() / num::pow(two, (-e) as usize)
    }
}

/// `x_n` from `x_1 = 0`, `x_{n+1} = x_n + s_n + l_n`.
pub fn x_recursive(n: usize) -> BigRational {
    let mut x = BigRational::from_integer(0.into());
    for k in 1..n {
        x += pow2(-(k as i64)) + pow2(-(k as i64));
    }
    x
}

/// `x_n = 2(1 − 2^{−(n−1)})`.
pub fn x_closed(n: usize) -> BigRational {
    BigRational::from_integer(2.into()) * (BigRational::one() - pow2(-(n as i64 - 1)))
}

pub fn x_left(n: usize) -> f64 {
    2.0 * (1.0 - (-(n as f64 - 1.0)).exp2())
}

/// How much of the infinite chain is materialized: squares and bands
/// `1..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NikodymParams {
    n_max: usize,
}

impl Default for NikodymParams {
    fn default() -> Self {
        Self { n_max: DEFAULT_N_MAX }
    }
}

impl NikodymParams {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Input("need at least one square".into()));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Largest `p` with `4p ≤ n_max`.
    pub fn max_p(&self) -> usize {
        self.n_max / 4
    }

    /// Area of the materialized domain.
    pub fn measure(&self) -> f64 {
        (1..=self.n_max).map(|n| side(n) * side(n) + band_length(n) * band_height(n)).sum()
    }

    pub fn geometry(&self) -> Vec<Rect> {
        (1..=self.n_max)
            .flat_map(|n| {
                let x = x_left(n);
                let s = side(n);
                [
                    Rect { piece: Piece::Square(n), x0: x, x1: x + s, y0: 0.0, y1: s },
                    Rect { piece: Piece::Band(n), x0: x + s, x1: x + s + band_length(n), y0: 0.0, y1: band_height(n) },
                ]
            })
            .collect()
    }

    fn check(&self, p: usize) -> Result<()> {
        let needed = 4 * p;
        if p == 0 || needed > self.n_max {
            return Err(Error::Index { p, needed, n_max: self.n_max });
        }
        Ok(())
    }

    fn check_piece(&self, piece: Piece) -> Result<()> {
        let n = piece.index();
        if n == 0 || n > self.n_max {
            return Err(Error::Spec(format!("{piece:?} is not materialized (n_max = {})", self.n_max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Piece {
    Square(usize),
    Band(usize),
}

impl Piece {
    pub fn index(&self) -> usize {
        match *self {
            Piece::Square(n) | Piece::Band(n) => n,
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Piece::Square(n) => side(n) * side(n),
            Piece::Band(n) => band_length(n) * band_height(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub piece: Piece,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// `g(σ) = 3σ² − 2σ³`.
pub fn smoothstep(s: f64) -> f64 {
    s * s * (3.0 - 2.0 * s)
}

pub fn smoothstep_derivative(s: f64) -> f64 {
    6.0 * s * (1.0 - s)
}

/// The transition `f_p`: rises from 0 to `height` over `length` along the
/// smoothstep. Its slope peaks at `1.5·height/length`, within twice the
/// average slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampProfile {
    pub height: f64,
    pub length: f64,
}

impl RampProfile {
    pub fn value(&self, x: f64) -> f64 {
        self.height * smoothstep((x / self.length).clamp(0.0, 1.0))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if !(0.0..=self.length).contains(&x) {
            return 0.0;
        }
        self.height / self.length * smoothstep_derivative(x / self.length)
    }

    pub fn max_slope(&self) -> f64 {
        1.5 * self.height / self.length
    }

    /// `∫ f`.
    pub fn integral(&self) -> f64 {
        self.height * self.length / 2.0
    }

    /// `∫ f²`.
    pub fn integral_sq(&self) -> f64 {
        self.height * self.height * self.length * 13.0 / 35.0
    }

    /// `∫ |f′|²`.
    pub fn derivative_sq_integral(&self) -> f64 {
        1.2 * self.height * self.height / self.length
    }
}

/// `u_p = α_p ũ_p`, supported on `B_{4p−1} ∪ S_{4p} ∪ B_{4p}` and constant in
/// the vertical direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UProfile {
    pub p: usize,
    pub plateau: f64,
    /// `1/‖ũ_p‖`.
    pub alpha: f64,
    pub rise: RampProfile,
    pub fall: RampProfile,
}

impl UProfile {
    pub fn square(&self) -> usize {
        4 * self.p
    }

    pub fn support(&self) -> [Piece; 3] {
        [Piece::Band(4 * self.p - 1), Piece::Square(4 * self.p), Piece::Band(4 * self.p)]
    }

    /// `‖ũ_p‖²`: plateau `c_p² s_{4p}²` plus both band integrals.
    pub fn unnormalized_norm_sq(&self) -> f64 {
        let n = self.square();
        self.plateau * self.plateau * side(n) * side(n)
            + band_height(n - 1) * self.rise.integral_sq()
            + band_height(n) * self.fall.integral_sq()
    }

    pub fn norm(&self) -> f64 {
        self.alpha * self.unnormalized_norm_sq().sqrt()
    }

    /// `∫_Ω u_p`.
    pub fn integral(&self) -> f64 {
        let n = self.square();
        self.alpha
            * (self.plateau * side(n) * side(n)
                + band_height(n - 1) * self.rise.integral()
                + band_height(n) * self.fall.integral())
    }

    /// `∫_piece u_p`.
    pub fn integral_over(&self, piece: Piece) -> f64 {
        let n = self.square();
        match piece {
            Piece::Square(k) if k == n => self.alpha * self.plateau * side(n) * side(n),
            Piece::Band(k) if k == n - 1 => self.alpha * band_height(k) * self.rise.integral(),
            Piece::Band(k) if k == n => self.alpha * band_height(k) * self.fall.integral(),
            _ => 0.0,
        }
    }

    pub fn support_measure(&self) -> f64 {
        self.support().iter().map(Piece::area).sum()
    }

    /// `u_p(x, y)` for a point of `Ω`; the caller is responsible for `y`
    /// being inside the piece that contains `x`.
    pub fn value(&self, x: f64) -> f64 {
        let n = self.square();
        let rise_start = x_left(n - 1) + side(n - 1);
        let square_start = x_left(n);
        let fall_start = square_start + side(n);
        let fall_end = fall_start + band_length(n);
        let v = if x < rise_start || x > fall_end {
            0.0
        } else if x < square_start {
            self.rise.value(x - rise_start)
        } else if x <= fall_start {
            self.plateau
        } else {
            self.fall.value(fall_end - x)
        };
        self.alpha * v
    }
}

pub fn build_u_p(params: &NikodymParams, p: usize) -> Result<UProfile> {
    params.check(p)?;
    let n = 4 * p;
    let plateau = plateau(p);
    let rise = RampProfile { height: plateau, length: band_length(n - 1) };
    let fall = RampProfile { height: plateau, length: band_length(n) };
    let mut u = UProfile { p, plateau, alpha: 1.0, rise, fall };
    u.alpha = 1.0 / u.unnormalized_norm_sq().sqrt();
    Ok(u)
}

/// `‖D₁u_p‖²`; `D₂u_p` vanishes identically.
pub fn grad1_sq(params: &NikodymParams, p: usize) -> Result<f64> {
    let u = build_u_p(params, p)?;
    let n = u.square();
    Ok(u.alpha
        * u.alpha
        * (band_height(n - 1) * u.rise.derivative_sq_integral() + band_height(n) * u.fall.derivative_sq_integral()))
}

/// `(‖D₁u_p‖, ‖D₂u_p‖)`.
pub fn grad_norms(params: &NikodymParams, p: usize) -> Result<(f64, f64)> {
    Ok((grad1_sq(params, p)?.sqrt(), 0.0))
}

/// `‖u_p − mean(u_p)‖² / (‖D₁u_p‖² + ‖D₂u_p‖²)`, a lower bound for the
/// Poincaré constant of the materialized domain.
pub fn poincare_quotient(params: &NikodymParams, p: usize) -> Result<f64> {
    let u = build_u_p(params, p)?;
    let norm_sq = u.norm().powi(2);
    let mean_part = u.integral().powi(2) / params.measure();
    let denom = grad1_sq(params, p)?;
    if denom <= 0.0 {
        return Err(Error::ZeroGradient);
    }
    Ok((norm_sq - mean_part) / denom)
}

/// Test functions for [`weak_decay`].
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// Constant on each listed square or band, zero elsewhere.
    Piecewise(Vec<(Piece, f64)>),
    /// The same constant on all of the materialized `Ω`.
    Constant(f64),
    /// `u_q`.
    Profile(usize),
}

/// `|⟨u_p, g⟩|`, exact for the supported test functions.
pub fn weak_decay(params: &NikodymParams, p: usize, g: &TestFunction) -> Result<f64> {
    let u = build_u_p(params, p)?;
    let value = match g {
        TestFunction::Piecewise(pieces) => {
            let mut acc = 0.0;
            for &(piece, v) in pieces {
                params.check_piece(piece)?;
                acc += v * u.integral_over(piece);
            }
            acc
        }
        TestFunction::Constant(v) => v * u.integral(),
        TestFunction::Profile(q) => {
            let other = build_u_p(params, *q).map_err(|e| Error::Spec(e.to_string()))?;
            if other.p == u.p {
                u.norm() * other.norm()
            } else {
                0.0
            }
        }
    };
    Ok(value.abs())
}

/// One row of the CLI report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NikodymRow {
    pub p: usize,
    pub norm: f64,
    pub grad1_sq: f64,
    pub grad2_sq: f64,
    pub quotient: f64,
}

pub fn report_row(params: &NikodymParams, p: usize) -> Result<NikodymRow> {
    let u = build_u_p(params, p)?;
    Ok(NikodymRow {
        p,
        norm: u.norm(),
        grad1_sq: grad1_sq(params, p)?,
        grad2_sq: 0.0,
        quotient: poincare_quotient(params, p)?,
    })
}
