//! The unitary group `U(t) = exp(2πitH)`, realised two independent ways.
//!
//! [`SpectralEvolver`] expands `f` in the orthogonal exponentials of a
//! truncated spectrum and multiplies each coefficient by `e^{2πiλt}`.
//! [`BoundaryEvolver`] never looks at the spectrum: it translates samples
//! inside the intervals and applies the boundary matrix `B` once per pass
//! through a right endpoint. On functions in the span of the truncated
//! spectrum the two must agree.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num::complex::Complex64;

use crate::boundary_spectrum::{BoundaryMatrix, CMatrix};
use crate::error::{Error, Result};
use crate::interval_domain::{check_distinct, exponential, gram, Frequency, IntervalUnion, SampledFunction, Signal};

/// Orthogonality required of a spectral evolver's frequencies.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Anything that can apply `U(t)` to sampled functions.
pub trait Evolver {
    fn domain(&self) -> &IntervalUnion;
    fn evolve(&self, f: &SampledFunction, t: f64) -> Result<SampledFunction>;
}

fn same_domain(a: &IntervalUnion, b: &IntervalUnion) -> bool {
    a.intervals() == b.intervals()
}

/// `U(t)` as modulation of the coefficients `⟨f, e_λ⟩/m(Ω)` over a finite set
/// of mutually orthogonal frequencies.
#[derive(Debug, Clone)]
pub struct SpectralEvolver {
    domain: IntervalUnion,
    spectrum: Vec<Frequency>,
}

impl SpectralEvolver {
    pub fn new(domain: &IntervalUnion, spectrum: &[Frequency]) -> Result<Self> {
        check_distinct(spectrum)?;
        let g = gram(domain, spectrum)?;
        let m = domain.measure();
        let mut defect: f64 = 0.0;
        for j in 0..spectrum.len() {
            for k in 0..spectrum.len() {
                if j != k {
                    defect = defect.max(g[(j, k)].norm() / m);
                }
            }
        }
        if defect >= ORTHOGONALITY_TOL {
            return Err(Error::NonOrthogonal { defect });
        }
        Ok(Self { domain: domain.clone(), spectrum: spectrum.to_vec() })
    }

    pub fn spectrum(&self) -> &[Frequency] {
        &self.spectrum
    }

    /// Samples per interval needed before coefficients may be taken by
    /// midpoint quadrature: `16·(1 + max|λ|·ℓ)`.
    pub fn required_samples(&self) -> usize {
        let max_l = self.spectrum.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
        let max_len = self.domain.lengths().into_iter().fold(0.0, f64::max);
        (16.0 * (1.0 + max_l * max_len)).ceil() as usize
    }

    /// `⟨f, e_λ⟩ / m(Ω)` for each retained `λ`. Closed form when `f` carries
    /// its [`Signal`], midpoint quadrature otherwise.
    pub fn coefficients(&self, f: &SampledFunction) -> Result<Vec<Complex64>> {
        if !same_domain(f.domain(), &self.domain) {
            return Err(Error::DomainMismatch);
        }
        let m = self.domain.measure();
        if let Some(signal) = f.signal() {
            return self.spectrum.iter().map(|&l| Ok(signal.coefficient(&self.domain, l)? / m)).collect();
        }
        let required = self.required_samples();
        if f.samples_per_interval() < required {
            return Err(Error::Resolution { required, got: f.samples_per_interval() });
        }
        let n = self.domain.interval_count();
        let samples = f.samples_per_interval();
        Ok(self
            .spectrum
            .iter()
            .map(|&l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let h = f.cell_width(i);
                    let row: Complex64 =
                        (0..samples).map(|k| f.value(i, k) * exponential(-l, f.grid_point(i, k))).sum();
                    acc += row * h;
                }
                acc / m
            })
            .collect())
    }

    /// `Σ c_λ e_λ` sampled on `m` points per interval, remembering the
    /// expansion.
    pub fn synthesize(&self, coeffs: &[Complex64], m: usize) -> SampledFunction {
        let terms = self.spectrum.iter().copied().zip(coeffs.iter().copied()).collect();
        SampledFunction::from_signal(&self.domain, m, Signal::Exponentials(terms))
    }

    /// Orthogonal projection onto the span of the retained exponentials.
    pub fn project(&self, f: &SampledFunction) -> Result<SampledFunction> {
        Ok(self.synthesize(&self.coefficients(f)?, f.samples_per_interval()))
    }

    /// `Σ_λ e^{2πiλt} c_λ e_λ`.
    pub fn evolve_spectral(&self, f: &SampledFunction, t: f64) -> Result<SampledFunction> {
        let coeffs: Vec<Complex64> = self
            .coefficients(f)?
            .into_iter()
            .zip(&self.spectrum)
            .map(|(c, &l)| c * exponential(l, t))
            .collect();
        Ok(self.synthesize(&coeffs, f.samples_per_interval()))
    }
}

impl Evolver for SpectralEvolver {
    fn domain(&self) -> &IntervalUnion {
        &self.domain
    }

    fn evolve(&self, f: &SampledFunction, t: f64) -> Result<SampledFunction> {
        self.evolve_spectral(f, t)
    }
}

/// Output of [`BoundaryEvolver::evolve_boundary`].
#[derive(Debug, Clone)]
pub struct BoundaryEvolution {
    pub function: SampledFunction,
    /// The grid multiple actually used.
    pub snapped_t: f64,
    /// `|t − snapped_t|`.
    pub snap_error: f64,
}

/// `U(t)` from the boundary matrix alone, on unions of equal-length
/// intervals.
///
/// Samples at the same offset inside each interval are stacked into an
/// `n`-vector. Shifting by `t` moves offsets to the right; each time an
/// offset runs past the right end it re-enters at the left end and the
/// stacked vector is multiplied by `B`, so `k` passes give `B^k` (negative
/// `k` for negative time).
#[derive(Debug, Clone)]
pub struct BoundaryEvolver {
    domain: IntervalUnion,
    bmatrix: BoundaryMatrix,
    length: f64,
}

impl BoundaryEvolver {
    pub fn new(domain: &IntervalUnion, bmatrix: &BoundaryMatrix) -> Result<Self> {
        if bmatrix.n() != domain.interval_count() {
            return Err(Error::DimensionMismatch { expected: domain.interval_count(), got: bmatrix.n() });
        }
        let lengths = domain.lengths();
        let expected = lengths[0];
        for (index, &length) in lengths.iter().enumerate() {
            if (length - expected).abs() > 1e-12 * expected {
                return Err(Error::UnequalLength { index, length, expected });
            }
        }
        Ok(Self { domain: domain.clone(), bmatrix: bmatrix.clone(), length: expected })
    }

    pub fn bmatrix(&self) -> &BoundaryMatrix {
        &self.bmatrix
    }

    /// Grid step for `m` samples per interval.
    pub fn grid_step(&self, m: usize) -> f64 {
        self.length / m as f64
    }

    /// Nearest multiple of the grid step.
    pub fn snap(&self, t: f64, m: usize) -> f64 {
        let h = self.grid_step(m);
        (t / h).round() * h
    }

    pub fn evolve_boundary(&self, f: &SampledFunction, t: f64) -> Result<BoundaryEvolution> {
        if !same_domain(f.domain(), &self.domain) {
            return Err(Error::DomainMismatch);
        }
        let m = f.samples_per_interval();
        let h = self.grid_step(m);
        let steps = (t / h).round();
        if !steps.is_finite() || steps.abs() > 1e15 {
            return Err(Error::GridMismatch(format!("time {t} is not representable on a grid of step {h}")));
        }
        let shift = steps as i64;
        let snapped_t = steps * h;
        let n = self.domain.interval_count();
        let m_i = m as i64;

        let mut powers: BTreeMap<i64, CMatrix> = BTreeMap::new();
        let mut out = vec![Complex64::new(0.0, 0.0); n * m];
        for k in 0..m {
            let j = k as i64 + shift;
            let wraps = j.div_euclid(m_i);
            let src = j.rem_euclid(m_i) as usize;
            let stacked = DVector::from_iterator(n, (0..n).map(|i| f.value(i, src)));
            let p = powers.entry(wraps).or_insert_with(|| self.bmatrix.power(wraps));
            let moved = &*p * stacked;
            for i in 0..n {
                out[i * m + k] = moved[i];
            }
        }
        Ok(BoundaryEvolution { function: f.with_values(out, None), snapped_t, snap_error: (t - snapped_t).abs() })
    }
}

impl Evolver for BoundaryEvolver {
    fn domain(&self) -> &IntervalUnion {
        &self.domain
    }

    fn evolve(&self, f: &SampledFunction, t: f64) -> Result<SampledFunction> {
        Ok(self.evolve_boundary(f, t)?.function)
    }
}

/// `max |(U(t)f)(x) − f(x+t)|` over grid points `x` with both `x` and `x+t`
/// inside `Ω`, one cell away from every endpoint.
///
/// `f(x+t)` is evaluated exactly when `original` carries its closed form and
/// by linear interpolation between midpoints otherwise. Returns 0 when no
/// grid point qualifies and `+∞` when the grids differ.
pub fn check_local_translation(evolved: &SampledFunction, original: &SampledFunction, t: f64) -> f64 {
    if !evolved.same_grid(original) {
        return f64::INFINITY;
    }
    let domain = original.domain();
    let m = original.samples_per_interval();
    let mut worst: f64 = 0.0;
    for i in 0..domain.interval_count() {
        for k in 1..m.saturating_sub(1) {
            let y = evolved.grid_point(i, k) + t;
            let Some(j) = domain.locate(y) else { continue };
            let (a, b) = domain.intervals()[j];
            let h = original.cell_width(j);
            if y < a + h || y > b - h {
                continue;
            }
            let target = match original.signal() {
                Some(signal) => signal.eval(y),
                None => match original.interpolate(y) {
                    Some(v) => v,
                    None => continue,
                },
            };
            worst = worst.max((evolved.value(i, k) - target).norm());
        }
    }
    worst
}

/// `‖U(s+t)f − U(s)U(t)f‖ / ‖f‖`.
pub fn check_group_law<E: Evolver + ?Sized>(evolver: &E, f: &SampledFunction, s: f64, t: f64) -> Result<f64> {
    let joint = evolver.evolve(f, s + t)?;
    let split = evolver.evolve(&evolver.evolve(f, t)?, s)?;
    let norm = f.norm();
    let d = joint.distance(&split);
    Ok(if norm > 0.0 { d / norm } else { d })
}

/// `| ‖U(t)f‖ − ‖f‖ | / ‖f‖`.
pub fn check_unitarity<E: Evolver + ?Sized>(evolver: &E, f: &SampledFunction, t: f64) -> Result<f64> {
    let norm = f.norm();
    let moved = evolver.evolve(f, t)?.norm();
    let d = (moved - norm).abs();
    Ok(if norm > 0.0 { d / norm } else { d })
}

/// Relative distance from `f` to the span of the sampled exponentials
/// `{e_λ}`, measured by a weighted discrete least-squares fit.
pub fn span_residual(spectrum: &[Frequency], f: &SampledFunction) -> f64 {
    let domain = f.domain();
    let m = f.samples_per_interval();
    let rows = domain.interval_count() * m;
    let weight = |i: usize| f.cell_width(i).sqrt();
    let a = CMatrix::from_fn(rows, spectrum.len(), |r, c| {
        let (i, k) = (r / m, r % m);
        exponential(spectrum[c], f.grid_point(i, k)) * weight(i)
    });
    let y = DVector::from_iterator(rows, (0..rows).map(|r| f.values()[r] * weight(r / m)));
    let norm = y.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let svd = a.clone().svd(true, true);
    match svd.solve(&y, 1e-12) {
        Ok(x) => (y - a * x).norm() / norm,
        Err(_) => f64::INFINITY,
    }
}
