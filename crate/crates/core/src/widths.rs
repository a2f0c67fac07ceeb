//! Closed-form and lower-bound width formulas for weighted `ℓ^p` balls,
//! plus the moment constants that translate discrete widths into
//! function-class bounds.
//!
//! The Stesin closed form for `d_m(B^p_N(w), ℓ^q_N)` with `1 ≤ q < p ≤ ∞`
//! is evaluated by sorting: the optimal subset is always the `N − m`
//! smallest weights. General subspace optimization is out of scope; only
//! closed forms and explicit bounds are computed.

use std::str::FromStr;

use thiserror::Error;

use crate::anisotropy::AnisotropySequence;
use crate::legendre::Moments;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum WidthError {
    #[error("Stesin formula needs 1 <= q < p <= inf, got p = {p}, q = {q}")]
    InvalidExponents { p: f64, q: f64 },
    #[error("need m < N, got m = {m}, N = {n}")]
    InvalidCodimension { m: usize, n: usize },
    #[error("weights must be strictly positive")]
    NonPositiveWeight,
    #[error("lower bound needs 0 < p <= 1 < ... and p < q <= inf, got p = {p}, q = {q}")]
    InvalidLowerBoundExponents { p: f64, q: f64 },
    #[error("unknown measure name {0:?}; expected \"uniform\" or \"chebyshev\"")]
    UnknownMeasure(String),
    #[error("smoothness parameter p = {0} outside (0, 1)")]
    InvalidSmoothness(f64),
    #[error(transparent)]
    Anisotropy(#[from] crate::anisotropy::AnisotropyError),
}

/// Parameters of a weighted-ball width evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthQuery {
    weights: Vec<f64>,
    m: usize,
    p: f64,
    q: f64,
}

impl WidthQuery {
    pub fn new(weights: Vec<f64>, m: usize, p: f64, q: f64) -> Result<Self, WidthError> {
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(WidthError::NonPositiveWeight);
        }
        if m >= weights.len() {
            return Err(WidthError::InvalidCodimension {
                m,
                n: weights.len(),
            });
        }
        if !(1.0 <= q && q < p) {
            return Err(WidthError::InvalidExponents { p, q });
        }
        Ok(Self { weights, m, p, q })
    }
}

/// Kolmogorov width `d_m(B^p_N(w), ℓ^q_N)` by the Stesin closed form.
///
/// For finite `p` the exponent `pq/(p−q)` is positive while the outer
/// exponent `1/p − 1/q` is negative, so the maximum over `(N−m)`-subsets
/// picks the smallest weights; `p = ∞` is the explicit limit
/// `min over subsets of (Σ w^q)^{1/q}`.
pub fn stesin_width(query: &WidthQuery) -> f64 {
    let mut w = query.weights.clone();
    w.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let keep = &w[..w.len() - query.m];
    let (p, q) = (query.p, query.q);
    if p.is_infinite() {
        keep.iter().map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q)
    } else {
        let e = p * q / (p - q);
        let inner = keep.iter().map(|x| x.powf(e)).sum::<f64>();
        inner.powf(1.0 / p - 1.0 / q).recip()
    }
}

/// The width chain value `d^m(B^∞_N(b_I), ℓ²_N) = (Σ_{j=m+1}^N b²_{π(j)})^{1/2}`
/// where `I` holds the `N` largest entries of `b` and `π` sorts them
/// nonincreasing.
pub fn discrete_width_chain(
    b: &AnisotropySequence,
    n: usize,
    m: usize,
) -> Result<f64, WidthError> {
    if m >= n {
        return Err(WidthError::InvalidCodimension { m, n });
    }
    // top-N entries: the head merged with the leading tail entries
    let mut entries: Vec<f64> = (1..=b.head().len().max(n))
        .map(|i| b.entry(i))
        .collect();
    entries.sort_by(|a, b| b.partial_cmp(a).unwrap());
    entries.truncate(n);
    Ok(entries[m..].iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Gelfand-width lower bound
/// `d^m(B^p_N, ℓ^q_N) ≥ (1/2)^{2/p−1/q} · min{1, (2p/log(3⁸e)) log(eN/m)/m}^{1/p−1/q}`
/// for `0 < p ≤ 1`, `p < q ≤ ∞`, `m < N`.
pub fn gelfand_lower_bound(n: usize, m: usize, p: f64, q: f64) -> Result<f64, WidthError> {
    if !(p > 0.0 && p <= 1.0 && q > p) {
        return Err(WidthError::InvalidLowerBoundExponents { p, q });
    }
    if m >= n {
        return Err(WidthError::InvalidCodimension { m, n });
    }
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    let log_const = 8.0 * 3f64.ln() + 1.0; // log(3^8 e)
    let ratio =
        2.0 * p / log_const * (std::f64::consts::E * n as f64 / m as f64).ln() / m as f64;
    let clamped = ratio.min(1.0);
    Ok(0.5f64.powf(2.0 / p - inv_q) * clamped.powf(1.0 / p - inv_q))
}

/// The named univariate measures whose moments feed the lower-bound
/// constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Uniform,
    /// Arcsine measure `dy / (π √(1−y²))` on `[−1, 1]`.
    Chebyshev,
}

impl FromStr for Measure {
    type Err = WidthError;
    fn from_str(s: &str) -> Result<Self, WidthError> {
        match s {
            "uniform" => Ok(Measure::Uniform),
            "chebyshev" => Ok(Measure::Chebyshev),
            other => Err(WidthError::UnknownMeasure(other.to_string())),
        }
    }
}

/// First and second moment `(τ, σ)` of the measure: `τ = ∫ y dρ`,
/// `σ = (∫ (y−τ)² dρ)^{1/2}`. Uniform gives `(0, 1/√3)`; Chebyshev
/// gives `(0, 1/√2)`.
pub fn measure_moments(measure: Measure) -> Moments {
    match measure {
        Measure::Uniform => Moments {
            tau: 0.0,
            sigma: 1.0 / 3f64.sqrt(),
        },
        Measure::Chebyshev => Moments {
            tau: 0.0,
            sigma: 1.0 / 2f64.sqrt(),
        },
    }
}

/// The constant `C(b,τ,σ) = σ / (1 + (1+|τ|)‖b‖₁)` of the known-anisotropy
/// reduction.
pub fn known_anisotropy_constant(
    b: &AnisotropySequence,
    moments: Moments,
) -> Result<f64, WidthError> {
    let l1 = b.lp_norm(1.0)?;
    Ok(moments.sigma / (1.0 + (1.0 + moments.tau.abs()) * l1))
}

/// Known-anisotropy lower bound `θ_m(b) ≥ C(b,τ,σ) · σ_m(b)₂`.
pub fn theta_lower_bound_known(
    b: &AnisotropySequence,
    m: usize,
    moments: Moments,
) -> Result<f64, WidthError> {
    Ok(known_anisotropy_constant(b, moments)? * b.best_s_term_error(m, 2.0)?)
}

/// Unknown-anisotropy lower bound `θ_m(p) ≥ (σ/(2+|τ|)) · 2^{1/2−2/p}`.
/// Independent of `m`: the class admits no decay at all.
pub fn theta_lower_bound_unknown(p: f64, moments: Moments) -> Result<f64, WidthError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(WidthError::InvalidSmoothness(p));
    }
    Ok(moments.sigma / (2.0 + moments.tau.abs()) * 2f64.powf(0.5 - 2.0 / p))
}
