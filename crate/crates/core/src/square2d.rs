//! The unit square with the mixed lattice `(ℤ×2ℤ) ∪ ((ℤ+½)×(2ℤ+1))`.
//!
//! Horizontal translation wraps around and applies the half-turn
//! `s(x₂) = (x₂+½) mod 1` once per crossing; vertical translation wraps
//! plainly. On a `G×G` midpoint grid with `G` even both are exact index
//! permutations, so translations are snapped to multiples of `1/G`.

use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::TAU;

const INTEGRALITY_TOL: f64 = 1e-9;

fn near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= INTEGRALITY_TOL).then_some(r as i64)
}

/// Whether `(λ₁, λ₂)` lies in the mixed lattice.
pub fn membership(l1: f64, l2: f64) -> bool {
    match near_integer(l2) {
        Some(k) if k.rem_euclid(2) == 0 => near_integer(l1).is_some(),
        Some(_) => near_integer(l1 - 0.5).is_some(),
        None => false,
    }
}

/// `s(x₂) = (x₂ + ½) mod 1`.
pub fn flip(x2: f64) -> f64 {
    (x2 + 0.5).rem_euclid(1.0)
}

/// Lattice points with `max(|λ₁|, |λ₂|) ≤ lmax`, ordered by `λ₂` then `λ₁`.
pub fn lattice_points(lmax: f64) -> Vec<(f64, f64)> {
    let bound = lmax.floor() as i64;
    let mut out = Vec::new();
    for k2 in -bound..=bound {
        let offset = if k2.rem_euclid(2) == 0 { 0.0 } else { 0.5 };
        let lo = (-lmax - offset).ceil() as i64;
        let hi = (lmax - offset).floor() as i64;
        for k1 in lo..=hi {
            out.push((k1 as f64 + offset, k2 as f64));
        }
    }
    out
}

/// Samples at the cell midpoints `((i+½)/G, (k+½)/G)`, stored with `x₂`
/// varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareSample {
    g: usize,
    values: Vec<Complex64>,
}

impl SquareSample {
    pub fn new(g: usize, values: Vec<Complex64>) -> Result<Self> {
        if g == 0 || !g.is_multiple_of(2) {
            return Err(Error::GridMismatch(format!("grid size {g} must be even and positive")));
        }
        if values.len() != g * g {
            return Err(Error::DimensionMismatch { expected: g * g, got: values.len() });
        }
        Ok(Self { g, values })
    }

    pub fn from_fn(g: usize, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let h = 1.0 / g as f64;
        let values = (0..g * g)
            .map(|idx| f((((idx / g) as f64) + 0.5) * h, (((idx % g) as f64) + 0.5) * h))
            .collect();
        Self::new(g, values)
    }

    /// `e_λ(x) = e^{2πi(λ₁x₁ + λ₂x₂)}` on the grid.
    pub fn exponential(g: usize, l1: f64, l2: f64) -> Result<Self> {
        Self::from_fn(g, |x1, x2| Complex64::cis(TAU * (l1 * x1 + l2 * x2)))
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        self.values[i * self.g + k]
    }

    /// Discrete `L²` norm with cell weight `1/G²`. Squared moduli are summed
    /// in sorted order, so permuted samples give bit-identical norms.
    pub fn norm(&self) -> f64 {
        let mut sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        sq.sort_by(f64::total_cmp);
        sq.iter().sum::<f64>().sqrt() / self.g as f64
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { g: self.g, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.g != other.g {
            return Err(Error::GridMismatch(format!("{} vs {}", self.g, other.g)));
        }
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(s.sqrt() / self.g as f64)
    }

    /// Translation by `steps/G` in `x₁`, with a flip for every wrap.
    pub fn shift_h(&self, steps: i64) -> Self {
        let g = self.g as i64;
        let half = g / 2;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for i in 0..g {
            let src = i + steps;
            let wraps = src.div_euclid(g);
            let col = src.rem_euclid(g) as usize;
            let turn = if wraps.rem_euclid(2) == 1 { half } else { 0 };
            for k in 0..g {
                let row = (k + turn).rem_euclid(g) as usize;
                values[(i as usize) * self.g + k as usize] = self.get(col, row);
            }
        }
        Self { g: self.g, values }
    }

    /// Translation by `steps/G` in `x₂`, wrapping.
    pub fn shift_v(&self, steps: i64) -> Self {
        let g = self.g as i64;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for i in 0..self.g {
            for k in 0..g {
                let row = (k + steps).rem_euclid(g) as usize;
                values[i * self.g + k as usize] = self.get(i, row);
            }
        }
        Self { g: self.g, values }
    }
}

/// A translation rounded to the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snap {
    pub requested: f64,
    pub steps: i64,
    pub snapped: f64,
    pub error: f64,
}

pub fn snap(t: f64, g: usize) -> Snap {
    let steps = (t * g as f64).round() as i64;
    let snapped = steps as f64 / g as f64;
    Snap { requested: t, steps, snapped, error: (snapped - t).abs() }
}

pub fn evolve_h(f: &SquareSample, t1: f64) -> (SquareSample, Snap) {
    let s = snap(t1, f.g);
    (f.shift_h(s.steps), s)
}

pub fn evolve_v(f: &SquareSample, t2: f64) -> (SquareSample, Snap) {
    let s = snap(t2, f.g);
    (f.shift_v(s.steps), s)
}

/// Relative residual of `U(t₁,t₂) e_λ = e^{2πi(λ₁t₁+λ₂t₂)} e_λ` on the grid,
/// with the phase taken at the snapped translation.
pub fn eigen_check(l1: f64, l2: f64, t1: f64, t2: f64, g: usize) -> Result<f64> {
    if !membership(l1, l2) {
        return Err(Error::NotInSpectrum(l1, l2));
    }
    let e = SquareSample::exponential(g, l1, l2)?;
    let (v, s2) = evolve_v(&e, t2);
    let (moved, s1) = evolve_h(&v, t1);
    let phase = Complex64::cis(TAU * (l1 * s1.snapped + l2 * s2.snapped));
    Ok(moved.distance(&e.scale(phase))? / e.norm())
}

/// Discrete Gram matrix `⟨e_λ, e_μ⟩` with cell weight `1/G²`.
pub fn discrete_gram(points: &[(f64, f64)], g: usize) -> Result<DMatrix<Complex64>> {
    let mut a = DMatrix::<Complex64>::zeros(g * g, points.len());
    for (c, &(l1, l2)) in points.iter().enumerate() {
        let e = SquareSample::exponential(g, l1, l2)?;
        for (r, v) in e.values.iter().enumerate() {
            a[(r, c)] = *v;
        }
    }
    Ok(a.adjoint() * &a / Complex64::new((g * g) as f64, 0.0))
}

/// Largest off-diagonal modulus of a Gram matrix.
pub fn off_diagonal_max(gram: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            if i != j {
                worst = worst.max(gram[(i, j)].norm());
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenRow {
    pub l1: f64,
    pub l2: f64,
    pub t1: f64,
    pub t2: f64,
    pub residual: f64,
    pub pass: bool,
}
