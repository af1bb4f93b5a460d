//! Checks for both sides of the Fuglede correspondence on the line: that a
//! frequency set behaves like a spectrum of `Ω`, and that `Ω` tiles `ℝ` by a
//! given translation set.
//!
//! Completeness cannot be certified with finitely many frequencies. What is
//! checked instead is the Parseval defect of indicator functions, which is
//! nonnegative by Bessel's inequality and tends to zero exactly when the
//! family is complete.

use num::{BigRational, Integer, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval_domain::{gram, indicator_coeff, Frequency, IntervalUnion};
use crate::rational::{format_rational, parse_rational};

/// Orthogonality required before a Parseval defect is meaningful.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// `max_{j≠k} |⟨e_{λ_j}, e_{λ_k}⟩| / m(Ω)`.
pub fn orthogonality_defect(domain: &IntervalUnion, freqs: &[Frequency]) -> Result<f64> {
    let g = gram(domain, freqs)?;
    let m = domain.measure();
    let n = freqs.len();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                worst = worst.max(g[(j, k)].norm() / m);
            }
        }
    }
    Ok(worst)
}

/// `‖χ_[a,b]‖² − Σ_λ |⟨χ_[a,b], e_λ⟩|² / m(Ω)`.
pub fn parseval_defect(domain: &IntervalUnion, freqs: &[Frequency], a: f64, b: f64) -> Result<f64> {
    let defect = orthogonality_defect(domain, freqs)?;
    if defect >= ORTHOGONALITY_TOL {
        return Err(Error::NonOrthogonal { defect });
    }
    let m = domain.measure();
    let captured = freqs
        .iter()
        .map(|&l| Ok(indicator_coeff(domain, a, b, l)?.norm_sqr()))
        .sum::<Result<f64>>()?;
    Ok((b - a) - captured / m)
}

/// `{r_j + kT : k ∈ ℤ}` for residues `0 ≤ r_1 < … < r_m < T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationSet {
    period: BigRational,
    residues: Vec<BigRational>,
}

impl TranslationSet {
    pub fn new(period: BigRational, mut residues: Vec<BigRational>) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::TranslationSet(format!("period {period} must be positive")));
        }
        if residues.is_empty() {
            return Err(Error::TranslationSet("no residues".into()));
        }
        if let Some(r) = residues.iter().find(|r| r.is_negative() || **r >= period) {
            return Err(Error::TranslationSet(format!("residue {r} is outside [0, {period})")));
        }
        residues.sort();
        if residues.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::TranslationSet("repeated residue".into()));
        }
        Ok(Self { period, residues })
    }

    /// Parses `period=T;residues=r1,r2,…`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut period = None;
        let mut residues = None;
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::TranslationSet(format!("expected key=value, got {part:?}")))?;
            let number = |s: &str| {
                parse_rational(s).ok_or_else(|| Error::TranslationSet(format!("{s:?} is not a rational number")))
            };
            match key.trim() {
                "period" => period = Some(number(value)?),
                "residues" => residues = Some(value.split(',').map(number).collect::<Result<Vec<_>>>()?),
                other => return Err(Error::TranslationSet(format!("unknown key {other:?}"))),
            }
        }
        let period = period.ok_or_else(|| Error::TranslationSet("missing period".into()))?;
        let residues = residues.unwrap_or_else(|| vec![BigRational::zero()]);
        Self::new(period, residues)
    }

    pub fn period(&self) -> &BigRational {
        &self.period
    }

    pub fn residues(&self) -> &[BigRational] {
        &self.residues
    }

    /// The same set written with period `factor·T`.
    pub fn refine(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let residues = (0..factor)
            .flat_map(|k| self.residues.iter().map(move |r| r + &self.period * BigRational::from_integer(k.into())))
            .collect();
        Self::new(&self.period * BigRational::from_integer(factor.into()), residues).expect("refinement stays valid")
    }
}

impl std::fmt::Display for TranslationSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let residues: Vec<String> = self.residues.iter().map(format_rational).collect();
        write!(f, "period={};residues={}", format_rational(&self.period), residues.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TilingReport {
    pub tiles: bool,
    /// `max(over, under)`.
    #[serde(serialize_with = "crate::rational::serialize")]
    pub defect_measure: BigRational,
    /// `∫ (c − 1)₊` over one period, `c` the covering multiplicity.
    #[serde(serialize_with = "crate::rational::serialize")]
    pub over_coverage: BigRational,
    /// `∫ (1 − c)₊` over one period.
    #[serde(serialize_with = "crate::rational::serialize")]
    pub under_coverage: BigRational,
}

/// Exact check that the translates `Ω + r_j + kT` cover `ℝ` exactly once,
/// ignoring finitely many points.
///
/// Works in one period window `[0, T)`: every translate meeting the window is
/// clipped to it and the covering multiplicity is swept across the sorted
/// breakpoints in rational arithmetic.
pub fn tiling_check(domain: &IntervalUnion, set: &TranslationSet) -> Result<TilingReport> {
    let intervals = domain.exact_intervals().ok_or(Error::IrrationalEndpoint)?;
    let period = &set.period;
    let zero = BigRational::zero();

    let mut events: Vec<(BigRational, i64)> = vec![(zero.clone(), 0), (period.clone(), 0)];
    for r in &set.residues {
        for (a, b) in intervals {
            let a = a + r;
            let b = b + r;
            let k_lo = (-&b / period).floor().to_integer();
            let k_hi = ((period - &a) / period).ceil().to_integer();
            let mut k = k_lo;
            while k <= k_hi {
                let shift = period * BigRational::from_integer(k.clone());
                let lo = (&a + &shift).max(zero.clone());
                let hi = (&b + &shift).min(period.clone());
                if lo < hi {
                    events.push((lo, 1));
                    events.push((hi, -1));
                }
                k.inc();
            }
        }
    }
    events.sort_by(|x, y| x.0.cmp(&y.0));

    let mut over = BigRational::zero();
    let mut under = BigRational::zero();
    let mut coverage: i64 = 0;
    let mut idx = 0;
    while idx < events.len() {
        let x = events[idx].0.clone();
        while idx < events.len() && events[idx].0 == x {
            coverage += events[idx].1;
            idx += 1;
        }
        let Some((next, _)) = events.get(idx) else { break };
        if x >= *period {
            break;
        }
        let len = next - &x;
        let excess = BigRational::from_integer((coverage - 1).into());
        if excess.is_positive() {
            over += &len * &excess;
        } else if excess.is_negative() {
            under += &len * -excess;
        }
    }
    let defect_measure = over.clone().max(under.clone());
    Ok(TilingReport { tiles: over.is_zero() && under.is_zero(), defect_measure, over_coverage: over, under_coverage: under })
}
