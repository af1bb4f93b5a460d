//! Unitary boundary matrices and the spectra of the self-adjoint restrictions
//! they select.
//!
//! A unitary `n×n` matrix `B` restricts `(1/2πi) d/dx` on `Ω = ⋃(α_i, β_i)` to
//! functions with `B f(α⃗) = f(β⃗)`. The eigenvalues of that restriction are the
//! real zeros of `λ ↦ det(I − M(λ))` with `M(λ) = E(λβ⃗)⁻¹ B E(λα⃗)`, and the
//! eigenfunctions are `e^{2πiλx} c_i` on interval `i` for `c ∈ ker(I − M(λ))`.
//!
//! Roots are located through the smallest singular value of `I − M(λ)`
//! rather than the determinant: it is real, nonnegative, Lipschitz in `λ` and
//! vanishes exactly on the spectrum.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_domain::{check_distinct, exponential, Frequency, IntervalUnion};
use crate::TAU;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default bound on `‖B*B − I‖_F`.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Default acceptance threshold on the refined smallest singular value.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Below this smallest singular value the selected boundary exponentials are
/// treated as not spanning `ℂⁿ`.
pub const SPAN_TOL: f64 = 1e-8;
/// Residual bound for `B e_λ(α⃗) = e_λ(β⃗)` across the whole input set.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Roots closer than this are merged.
const MERGE_DISTANCE: f64 = 1e-7;

/// `‖M*M − I‖_F`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    (m.adjoint() * m - CMatrix::identity(n, n)).norm()
}

/// Singular values in ascending order.
pub(crate) fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// The `n×n` unitary matrix `B` in `B f(α⃗) = f(β⃗)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    matrix: CMatrix,
}

impl BoundaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, UNITARITY_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
        }
        let residual = unitarity_residual(&matrix);
        if residual.is_nan() || residual >= tol {
            return Err(Error::NonUnitary { residual, tol });
        }
        Ok(Self { matrix })
    }

    /// `1×1` boundary matrix `(z)`.
    pub fn scalar(z: Complex64) -> Result<Self> {
        Self::new(CMatrix::from_element(1, 1, z))
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n, n) }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    /// `B^k`; negative powers use `B⁻¹ = B*`.
    pub fn power(&self, k: i64) -> CMatrix {
        let base = if k < 0 { self.matrix.adjoint() } else { self.matrix.clone() };
        let mut out = CMatrix::identity(self.n(), self.n());
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        out
    }

    /// Eigenvalues from a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.matrix
            .eigenvalues()
            .map(|v| v.iter().copied().collect())
            .unwrap_or_default()
    }

    fn check_dim(&self, domain: &IntervalUnion) -> Result<()> {
        if self.n() != domain.interval_count() {
            return Err(Error::DimensionMismatch { expected: domain.interval_count(), got: self.n() });
        }
        Ok(())
    }
}

/// `E(z⃗) = diag(e^{2πiz_1}, …, e^{2πiz_n})`.
pub fn phase_diag(z: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(z.len(), z.iter().map(|&v| exponential(1.0, v))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A vector in `ℂⁿ` indexed by interval, e.g. `f(α⃗)` or a kernel vector `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryVector(pub CVector);

impl BoundaryVector {
    pub fn as_slice(&self) -> &[Complex64] {
        self.0.as_slice()
    }
}

/// `e_λ(α⃗)` for [`Side::Left`], `e_λ(β⃗)` for [`Side::Right`].
pub fn boundary_exponential(domain: &IntervalUnion, lambda: Frequency, side: Side) -> BoundaryVector {
    let pts = match side {
        Side::Left => domain.alphas(),
        Side::Right => domain.betas(),
    };
    BoundaryVector(CVector::from_iterator(pts.len(), pts.iter().map(|&x| exponential(lambda, x))))
}

/// `M(λ) = E(λβ⃗)⁻¹ B E(λα⃗)`, entrywise `e^{−2πiλβ_j} B_jk e^{2πiλα_k}`.
pub fn transfer_matrix(b: &BoundaryMatrix, domain: &IntervalUnion, lambda: Frequency) -> Result<CMatrix> {
    b.check_dim(domain)?;
    let alpha = domain.alphas();
    let beta = domain.betas();
    let n = b.n();
    Ok(CMatrix::from_fn(n, n, |j, k| {
        Complex64::from_polar(1.0, TAU * lambda * (alpha[k] - beta[j])) * b.matrix[(j, k)]
    }))
}

fn characteristic(b: &BoundaryMatrix, domain: &IntervalUnion, lambda: Frequency) -> Result<CMatrix> {
    let m = transfer_matrix(b, domain, lambda)?;
    Ok(CMatrix::identity(b.n(), b.n()) - m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharValue {
    /// `det(I − M(λ))`.
    pub det: Complex64,
    /// Smallest singular value of `I − M(λ)`.
    pub smin: f64,
}

pub fn char_value(b: &BoundaryMatrix, domain: &IntervalUnion, lambda: Frequency) -> Result<CharValue> {
    let a = characteristic(b, domain, lambda)?;
    let smin = singular_values(&a)[0];
    Ok(CharValue { det: a.determinant(), smin })
}

fn smin_at(b: &BoundaryMatrix, domain: &IntervalUnion, lambda: f64) -> f64 {
    singular_values(&characteristic(b, domain, lambda).expect("dimension checked")).first().copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub lambda: f64,
    pub multiplicity: usize,
    /// Refined smallest singular value at `lambda`.
    pub residual: f64,
}

/// Eigenvalues found inside a window, sorted and separated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub window: (f64, f64),
    pub points: Vec<SpectrumPoint>,
}

impl SpectrumSet {
    pub fn frequencies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Largest admissible scan step, `1/(4·max_i(|α_i|+|β_i|))`.
pub fn max_scan_step(domain: &IntervalUnion) -> f64 {
    1.0 / (4.0 * domain.endpoint_scale())
}

/// `1/(8·max_i(|α_i|+|β_i|) + 8)`.
pub fn default_scan_step(domain: &IntervalUnion) -> f64 {
    1.0 / (8.0 * domain.endpoint_scale() + 8.0)
}

/// Minimizes a function on `[a, b]` by golden-section search and returns the
/// best abscissa seen.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..300 {
        if (b - a) <= 4.0 * f64::EPSILON * best.0.abs().max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

/// All eigenvalues of the restriction selected by `b` inside `window`.
///
/// `smin(λ)` is scanned on a uniform grid no coarser than `scan_step`
/// (extended by one step past each end), every grid local minimum is refined
/// by golden-section search over its two neighbouring cells, and refined
/// minima with `smin < tol` are kept. Multiplicity is the number of singular
/// values of `I − M(λ)` below `tol`.
pub fn compute_spectrum(
    b: &BoundaryMatrix,
    domain: &IntervalUnion,
    window: (f64, f64),
    scan_step: f64,
    tol: f64,
) -> Result<SpectrumSet> {
    b.check_dim(domain)?;
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Window { lo, hi });
    }
    let max_step = max_scan_step(domain);
    if !(scan_step > 0.0 && scan_step < max_step) {
        return Err(Error::Step { step: scan_step, max: max_step });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Tolerance(tol));
    }

    let cells = ((hi - lo) / scan_step).ceil().max(1.0) as i64;
    let h = (hi - lo) / cells as f64;
    let grid: Vec<f64> = (-1..=cells + 1).map(|k| lo + k as f64 * h).collect();
    let values: Vec<f64> = grid.iter().map(|&l| smin_at(b, domain, l)).collect();

    let slack = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
    let mut roots: Vec<SpectrumPoint> = Vec::new();
    for j in 1..grid.len() - 1 {
        if !(values[j] <= values[j - 1] && values[j] <= values[j + 1]) {
            continue;
        }
        let (lambda, residual) = golden_section(|l| smin_at(b, domain, l), grid[j - 1], grid[j + 1]);
        if residual >= tol || lambda < lo - slack || lambda > hi + slack {
            continue;
        }
        let lambda = lambda.clamp(lo, hi);
        let sv = singular_values(&characteristic(b, domain, lambda)?);
        let multiplicity = sv.iter().filter(|&&s| s < tol).count().max(1);
        roots.push(SpectrumPoint { lambda, multiplicity, residual });
    }

    roots.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
    let mut points: Vec<SpectrumPoint> = Vec::with_capacity(roots.len());
    for r in roots {
        match points.last_mut() {
            Some(last) if r.lambda - last.lambda <= MERGE_DISTANCE => {
                if r.residual < last.residual {
                    *last = r;
                }
            }
            _ => points.push(r),
        }
    }
    Ok(SpectrumSet { window, points })
}

/// Orthonormal basis of `ker(I − M(λ))`: right singular vectors with singular
/// value below `tol`. Eigenfunctions are `e^{2πiλx} c_i` on interval `i`.
pub fn eigenspace(
    b: &BoundaryMatrix,
    domain: &IntervalUnion,
    lambda: Frequency,
    tol: f64,
) -> Result<Vec<BoundaryVector>> {
    let a = characteristic(b, domain, lambda)?;
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < tol)
        .map(|(j, _)| BoundaryVector(v_t.row(j).adjoint()))
        .collect())
}

/// Result of [`spectrality_check`]. Only the scanned window is certified.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralityReport {
    pub spectral_in_window: bool,
    pub violations: Vec<f64>,
    pub spectrum: SpectrumSet,
}

/// Distance from `v` to the phase orbit of `(1,…,1)/√n`.
fn distance_to_constant(v: &CVector) -> f64 {
    let n = v.len();
    let u = CVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let overlap = u.dotc(v);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    (v - u * phase).norm()
}

/// Checks that every eigenvalue in `window` has a one-dimensional eigenspace
/// spanned by a constant vector, i.e. every eigenfunction is an exponential.
pub fn spectrality_check(
    b: &BoundaryMatrix,
    domain: &IntervalUnion,
    window: (f64, f64),
    tol: f64,
) -> Result<SpectralityReport> {
    let spectrum = compute_spectrum(b, domain, window, default_scan_step(domain), tol)?;
    let mut violations = Vec::new();
    for p in &spectrum.points {
        let basis = eigenspace(b, domain, p.lambda, tol)?;
        let ok = basis.len() == 1 && distance_to_constant(&basis[0].0) < tol;
        if !ok {
            violations.push(p.lambda);
        }
    }
    Ok(SpectralityReport { spectral_in_window: violations.is_empty(), violations, spectrum })
}

fn smin_of_columns(cols: &[CVector]) -> f64 {
    let m = CMatrix::from_columns(cols);
    singular_values(&m)[0]
}

/// Solves `B e_λ(α⃗) = e_λ(β⃗)` for the boundary matrix of a spectrum.
///
/// `n` frequencies are chosen greedily so that the matrix of left boundary
/// exponentials stays as well conditioned as possible, `B` is obtained from
/// them, and then `B` is checked for unitarity and against every frequency of
/// the input.
pub fn boundary_matrix_from_spectrum(domain: &IntervalUnion, spectrum: &[Frequency]) -> Result<BoundaryMatrix> {
    check_distinct(spectrum)?;
    let n = domain.interval_count();
    let left: Vec<CVector> = spectrum.iter().map(|&l| boundary_exponential(domain, l, Side::Left).0).collect();
    let right: Vec<CVector> = spectrum.iter().map(|&l| boundary_exponential(domain, l, Side::Right).0).collect();
    if spectrum.len() < n {
        return Err(Error::Span { smin: 0.0 });
    }

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut cols: Vec<CVector> = Vec::with_capacity(n);
    let mut smin = 0.0;
    for _ in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for (idx, col) in left.iter().enumerate() {
            if chosen.contains(&idx) {
                continue;
            }
            cols.push(col.clone());
            let s = smin_of_columns(&cols);
            cols.pop();
            if best.is_none_or(|(_, bs)| s > bs * (1.0 + 1e-12)) {
                best = Some((idx, s));
            }
        }
        let (idx, s) = best.expect("at least n candidates");
        chosen.push(idx);
        cols.push(left[idx].clone());
        smin = s;
    }
    if smin < SPAN_TOL {
        return Err(Error::Span { smin });
    }

    let a = CMatrix::from_columns(&cols);
    let bb = CMatrix::from_columns(&chosen.iter().map(|&i| right[i].clone()).collect::<Vec<_>>());
    let a_inv = a.try_inverse().ok_or(Error::Span { smin })?;
    let b = bb * a_inv;

    let residual = unitarity_residual(&b);
    if residual.is_nan() || residual >= UNITARITY_TOL {
        return Err(Error::NonUnitary { residual, tol: UNITARITY_TOL });
    }
    for ((l, al), br) in spectrum.iter().zip(&left).zip(&right) {
        let r = (&b * al - br).norm();
        if r.is_nan() || r >= CONSISTENCY_TOL {
            return Err(Error::Consistency { lambda: *l, residual: r });
        }
    }
    BoundaryMatrix::new(b)
}

/// Smallest gap between consecutive spectrum points.
pub fn min_gap(spectrum: &SpectrumSet) -> Result<f64> {
    min_gap_of(&spectrum.frequencies())
}

pub fn min_gap_of(freqs: &[f64]) -> Result<f64> {
    if freqs.len() < 2 {
        return Err(Error::TooFewPoints(freqs.len()));
    }
    let mut sorted = freqs.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
}
