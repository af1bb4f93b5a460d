//! Finite unions of intervals and closed-form Fourier analysis of exponentials
//! over them.

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::BigRational;

use crate::error::{Error, Result};
use crate::rational::{parse_rational, to_f64};
use crate::TAU;

/// A frequency `λ`, in cycles per unit length. The exponential is
/// `e_λ(x) = e^{2πiλx}`.
pub type Frequency = f64;

/// Below this `|ν|` the per-interval integral switches to its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-8;

/// `Ω = ⋃ (α_i, β_i)` with `α_1 < β_1 < α_2 < … < β_n`.
///
/// Endpoints are kept as floats for analysis. When the union was built from
/// rational input the exact endpoints are kept as well, which is what the
/// tiling checker needs.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    exact: Option<Vec<(BigRational, BigRational)>>,
}

impl IntervalUnion {
    /// Validates and sorts float endpoints.
    pub fn new(endpoints: &[(f64, f64)]) -> Result<Self> {
        if endpoints.is_empty() {
            return Err(Error::Empty("no intervals given".into()));
        }
        for &(a, b) in endpoints {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Empty(format!("non-finite endpoint in ({a}, {b})")));
            }
            if b <= a {
                return Err(Error::Empty(format!("interval ({a}, {b}) has beta <= alpha")));
            }
        }
        let mut intervals = endpoints.to_vec();
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in intervals.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::Overlap(w[0].0, w[0].1, w[1].0, w[1].1));
            }
        }
        Ok(Self { intervals, exact: None })
    }

    /// Builds the union from exact rational endpoints; floats are derived.
    pub fn from_rationals(endpoints: Vec<(BigRational, BigRational)>) -> Result<Self> {
        if endpoints.is_empty() {
            return Err(Error::Empty("no intervals given".into()));
        }
        let mut exact = endpoints;
        for (a, b) in &exact {
            if b <= a {
                return Err(Error::Empty(format!("interval ({a}, {b}) has beta <= alpha")));
            }
        }
        exact.sort_by(|x, y| x.0.cmp(&y.0));
        for w in exact.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::Overlap(
                    to_f64(&w[0].0),
                    to_f64(&w[0].1),
                    to_f64(&w[1].0),
                    to_f64(&w[1].1),
                ));
            }
        }
        let intervals = exact.iter().map(|(a, b)| (to_f64(a), to_f64(b))).collect();
        Ok(Self { intervals, exact: Some(exact) })
    }

    /// Parses endpoint text. If every endpoint is rational text the union is
    /// exact, otherwise all endpoints are read as floats.
    pub fn from_text<S: AsRef<str>>(endpoints: &[(S, S)]) -> Result<Self> {
        let exact: Option<Vec<_>> = endpoints
            .iter()
            .map(|(a, b)| Some((parse_rational(a.as_ref())?, parse_rational(b.as_ref())?)))
            .collect();
        if let Some(exact) = exact {
            return Self::from_rationals(exact);
        }
        let floats = endpoints
            .iter()
            .map(|(a, b)| {
                let parse = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Input(format!("endpoint {s:?} is not a number")))
                };
                Ok((parse(a.as_ref())?, parse(b.as_ref())?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&floats)
    }

    pub fn interval_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn exact_intervals(&self) -> Option<&[(BigRational, BigRational)]> {
        self.exact.as_deref()
    }

    /// Left endpoints `α⃗`.
    pub fn alphas(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| iv.0).collect()
    }

    /// Right endpoints `β⃗`.
    pub fn betas(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| iv.1).collect()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.intervals.iter().map(|(a, b)| b - a).collect()
    }

    /// Lebesgue measure `m(Ω)`.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// `max_i (|α_i| + |β_i|)`, the largest oscillation rate of the boundary
    /// phases as functions of `λ`.
    pub fn endpoint_scale(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| a.abs() + b.abs()).fold(0.0, f64::max)
    }

    /// Index of the open interval containing `x`.
    pub fn locate(&self, x: f64) -> Option<usize> {
        self.intervals.iter().position(|&(a, b)| a < x && x < b)
    }
}

/// Same as [`IntervalUnion::new`].
pub fn make_domain(endpoints: &[(f64, f64)]) -> Result<IntervalUnion> {
    IntervalUnion::new(endpoints)
}

/// `e_λ(x)`.
pub fn exponential(lambda: Frequency, x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * lambda * x)
}

/// `∫_a^b e^{2πiνx} dx`.
///
/// Written as `L e^{πiν(a+b)} sin(πνL)/(πνL)` so no difference of nearly
/// equal exponentials is ever formed; for `|ν| < SERIES_THRESHOLD` the
/// three-term Taylor expansion in `ν` is used instead.
pub fn interval_integral(nu: f64, a: f64, b: f64) -> Complex64 {
    let len = b - a;
    if nu.abs() < SERIES_THRESHOLD {
        let z = Complex64::new(0.0, TAU * nu);
        return Complex64::new(len, 0.0)
            + z * ((b * b - a * a) / 2.0)
            + z * z * ((b * b * b - a * a * a) / 6.0);
    }
    let half = std::f64::consts::PI * nu * len;
    let sinc = half.sin() / half;
    Complex64::from_polar(len * sinc, std::f64::consts::PI * nu * (a + b))
}

/// `⟨e_λ, e_μ⟩ = ∫_Ω e^{2πi(λ−μ)x} dx`, in closed form.
pub fn exp_inner(domain: &IntervalUnion, lambda: Frequency, mu: Frequency) -> Complex64 {
    let nu = lambda - mu;
    domain.intervals().iter().map(|&(a, b)| interval_integral(nu, a, b)).sum()
}

pub(crate) fn check_distinct(freqs: &[Frequency]) -> Result<()> {
    let mut sorted = freqs.to_vec();
    if let Some(bad) = sorted.iter().find(|l| !l.is_finite()) {
        return Err(Error::Input(format!("non-finite frequency {bad}")));
    }
    sorted.sort_by(f64::total_cmp);
    match sorted.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(Error::DuplicateFrequency(w[0])),
        None => Ok(()),
    }
}

/// Gram matrix `G[j][k] = ⟨e_{λ_j}, e_{λ_k}⟩`. Hermitian, with `m(Ω)` on the
/// diagonal.
pub fn gram(domain: &IntervalUnion, freqs: &[Frequency]) -> Result<DMatrix<Complex64>> {
    if freqs.is_empty() {
        return Err(Error::Input("empty frequency list".into()));
    }
    check_distinct(freqs)?;
    let n = freqs.len();
    Ok(DMatrix::from_fn(n, n, |j, k| exp_inner(domain, freqs[j], freqs[k])))
}

/// `⟨χ_[a,b], e_λ⟩ = ∫_a^b e^{−2πiλx} dx`.
///
/// `[a, b]` must sit inside the closure of one interval of `Ω`.
pub fn indicator_coeff(domain: &IntervalUnion, a: f64, b: f64, lambda: Frequency) -> Result<Complex64> {
    let inside = a <= b && domain.intervals().iter().any(|&(lo, hi)| lo <= a && b <= hi);
    if !inside {
        return Err(Error::Range { a, b });
    }
    Ok(interval_integral(-lambda, a, b))
}

/// A function with a known closed form, so Fourier coefficients against
/// exponentials can be computed exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    /// `Σ c_k e_{λ_k}`.
    Exponentials(Vec<(Frequency, Complex64)>),
    /// `χ_[a,b]`.
    Indicator { a: f64, b: f64 },
}

impl Signal {
    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            Signal::Exponentials(terms) => terms.iter().map(|&(l, c)| c * exponential(l, x)).sum(),
            Signal::Indicator { a, b } => {
                if *a <= x && x <= *b {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// `⟨self, e_λ⟩` over `Ω`.
    pub fn coefficient(&self, domain: &IntervalUnion, lambda: Frequency) -> Result<Complex64> {
        match self {
            Signal::Exponentials(terms) => {
                Ok(terms.iter().map(|&(mu, c)| c * exp_inner(domain, mu, lambda)).sum())
            }
            Signal::Indicator { a, b } => indicator_coeff(domain, *a, *b, lambda),
        }
    }
}

/// Samples of `f ∈ L²(Ω)` on a per-interval midpoint grid: row `i` holds
/// `f(α_i + (k+½)(β_i−α_i)/M)` for `k = 0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    domain: IntervalUnion,
    samples_per_interval: usize,
    values: Vec<Complex64>,
    signal: Option<Signal>,
}

impl SampledFunction {
    pub fn from_rows(domain: &IntervalUnion, rows: Vec<Vec<Complex64>>) -> Result<Self> {
        if rows.len() != domain.interval_count() {
            return Err(Error::GridMismatch(format!(
                "{} rows for {} intervals",
                rows.len(),
                domain.interval_count()
            )));
        }
        let m = rows[0].len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::GridMismatch("rows must be nonempty and of equal length".into()));
        }
        Ok(Self {
            domain: domain.clone(),
            samples_per_interval: m,
            values: rows.into_iter().flatten().collect(),
            signal: None,
        })
    }

    pub fn from_fn(domain: &IntervalUnion, m: usize, f: impl Fn(f64) -> Complex64) -> Self {
        assert!(m > 0, "need at least one sample per interval");
        let values = domain
            .intervals()
            .iter()
            .flat_map(|&(a, b)| {
                let h = (b - a) / m as f64;
                (0..m).map(move |k| a + (k as f64 + 0.5) * h)
            })
            .map(f)
            .collect();
        Self { domain: domain.clone(), samples_per_interval: m, values, signal: None }
    }

    /// Samples a closed-form signal and remembers it, so coefficient
    /// computations can skip quadrature.
    pub fn from_signal(domain: &IntervalUnion, m: usize, signal: Signal) -> Self {
        let mut f = Self::from_fn(domain, m, |x| signal.eval(x));
        f.signal = Some(signal);
        f
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>, signal: Option<Signal>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { domain: self.domain.clone(), samples_per_interval: self.samples_per_interval, values, signal }
    }

    pub fn domain(&self) -> &IntervalUnion {
        &self.domain
    }

    pub fn samples_per_interval(&self) -> usize {
        self.samples_per_interval
    }

    pub fn signal(&self) -> Option<&Signal> {
        self.signal.as_ref()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let m = self.samples_per_interval;
        &self.values[i * m..(i + 1) * m]
    }

    pub fn value(&self, i: usize, k: usize) -> Complex64 {
        self.values[i * self.samples_per_interval + k]
    }

    pub fn cell_width(&self, i: usize) -> f64 {
        let (a, b) = self.domain.intervals()[i];
        (b - a) / self.samples_per_interval as f64
    }

    pub fn grid_point(&self, i: usize, k: usize) -> f64 {
        self.domain.intervals()[i].0 + (k as f64 + 0.5) * self.cell_width(i)
    }

    /// True when both functions share domain and grid.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.samples_per_interval == other.samples_per_interval
            && self.domain.intervals() == other.domain.intervals()
    }

    /// Midpoint-rule inner product `Σ f ḡ h_i`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let m = self.samples_per_interval;
        (0..self.domain.interval_count())
            .map(|i| {
                let h = self.cell_width(i);
                let s: Complex64 = self.values[i * m..(i + 1) * m]
                    .iter()
                    .zip(&other.values[i * m..(i + 1) * m])
                    .map(|(f, g)| f * g.conj())
                    .sum();
                s * h
            })
            .sum()
    }

    /// Discrete `L²` norm.
    pub fn norm(&self) -> f64 {
        let m = self.samples_per_interval;
        (0..self.domain.interval_count())
            .map(|i| self.cell_width(i) * self.values[i * m..(i + 1) * m].iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Discrete `L²` distance.
    pub fn distance(&self, other: &Self) -> f64 {
        let diff: Vec<Complex64> = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        self.with_values(diff, None).norm()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Linear interpolation between the midpoints of the interval holding
    /// `x`. `None` outside the span of that interval's first and last
    /// midpoints.
    pub fn interpolate(&self, x: f64) -> Option<Complex64> {
        let i = self.domain.locate(x)?;
        let (a, _) = self.domain.intervals()[i];
        let h = self.cell_width(i);
        let pos = (x - a) / h - 0.5;
        let last = (self.samples_per_interval - 1) as f64;
        if pos < -1e-9 || pos > last + 1e-9 {
            return None;
        }
        let pos = pos.clamp(0.0, last);
        let k = (pos.floor() as usize).min(self.samples_per_interval.saturating_sub(2));
        if self.samples_per_interval == 1 {
            return Some(self.value(i, 0));
        }
        let w = pos - k as f64;
        Some(self.value(i, k) * (1.0 - w) + self.value(i, k + 1) * w)
    }
}
