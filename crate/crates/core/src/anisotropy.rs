//! Anisotropy sequences: nonnegative weight sequences with a finite
//! representation, their `ℓ^p` norms, best `s`-term errors, and the
//! specific families used by the lower-bound constructions.
//!
//! A sequence is stored as an explicit head plus a tail rule, either all
//! zeros or algebraic decay `C · i^{−α}`. Norms of algebraic tails are
//! evaluated by an explicit partial sum plus an Euler–Maclaurin remainder
//! with truncation error below 1e−12.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiindex::monotone_majorant;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum AnisotropyError {
    #[error("l^{p} norm of the algebraic tail diverges (p*alpha = {product} <= 1)")]
    DivergentTail { p: f64, product: f64 },
    #[error("series sum(1/(n*g(n))) for {name} diverges; no normalization constant exists")]
    DivergentGrowth { name: &'static str },
    #[error("invalid norm exponent p = {0}; need p in (0, inf]")]
    InvalidExponent(f64),
}

/// Tail rule beyond the explicit head entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    Zero,
    Algebraic { alpha: f64, scale: f64 },
}

/// A nonnegative weight sequence `b = (b_i)` with finite representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnisotropySequence {
    head: Vec<f64>,
    tail: Tail,
}

/// Floor below which an entry is treated as insignificant when choosing
/// support cutoffs.
pub const SIGNIFICANCE_FLOOR: f64 = 1e-12;

impl AnisotropySequence {
    pub fn new(head: Vec<f64>, tail: Tail) -> Self {
        assert!(
            head.iter().all(|&x| x >= 0.0 && x.is_finite()),
            "entries must be nonnegative and finite"
        );
        if let Tail::Algebraic { alpha, scale } = tail {
            assert!(alpha > 0.0, "algebraic tail needs alpha > 0");
            assert!(scale >= 0.0, "algebraic tail needs scale >= 0");
        }
        Self { head, tail }
    }

    pub fn zero_tailed(head: Vec<f64>) -> Self {
        Self::new(head, Tail::Zero)
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Entry `b_i`, 1-based.
    pub fn entry(&self, i: usize) -> f64 {
        assert!(i >= 1);
        if i <= self.head.len() {
            self.head[i - 1]
        } else {
            match self.tail {
                Tail::Zero => 0.0,
                Tail::Algebraic { alpha, scale } => scale * (i as f64).powf(-alpha),
            }
        }
    }

    /// Index of the last entry whose monotone majorant exceeds `floor`,
    /// or `None` when that index is beyond any practical range.
    pub fn significant_len(&self, floor: f64) -> Option<usize> {
        let maj = monotone_majorant(&self.head);
        let head_part = maj.iter().rposition(|&x| x > floor).map_or(0, |i| i + 1);
        match self.tail {
            Tail::Zero => Some(head_part),
            Tail::Algebraic { scale, .. } if scale <= floor => Some(head_part),
            Tail::Algebraic { alpha, scale } => {
                // tail entries scale*i^-alpha sit above floor while
                // i < (scale/floor)^(1/alpha)
                let cross = (scale / floor).powf(1.0 / alpha);
                if cross > 1e15 {
                    return None;
                }
                let cross = cross.floor() as usize;
                if cross >= self.head.len() + 1 {
                    Some(head_part.max(cross))
                } else {
                    Some(head_part)
                }
            }
        }
    }

    /// `(Σ b_i^p)^{1/p}`, or `sup b_i` for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64, AnisotropyError> {
        if p == f64::INFINITY {
            let head_sup = self.head.iter().copied().fold(0.0, f64::max);
            return Ok(head_sup.max(self.tail_sup()));
        }
        if !(p > 0.0) {
            return Err(AnisotropyError::InvalidExponent(p));
        }
        let head_sum: f64 = self.head.iter().map(|&x| x.powf(p)).sum();
        Ok((head_sum + self.tail_power_sum(p)?).powf(1.0 / p))
    }

    /// `‖b‖_{p,M}`, the `ℓ^p` norm of the minimal monotone majorant.
    pub fn monotone_lp_norm(&self, p: f64) -> Result<f64, AnisotropyError> {
        self.majorant_sequence().lp_norm(p)
    }

    /// The minimal monotone majorant as a sequence. The algebraic tail is
    /// already nonincreasing, so only the head needs the running tail
    /// maximum, seeded with the first tail value.
    pub fn majorant_sequence(&self) -> AnisotropySequence {
        let tail_sup = self.tail_sup();
        let mut head = monotone_majorant(&self.head);
        for x in head.iter_mut() {
            *x = x.max(tail_sup);
        }
        AnisotropySequence::new(head, self.tail.clone())
    }

    fn tail_sup(&self) -> f64 {
        match self.tail {
            Tail::Zero => 0.0,
            Tail::Algebraic { alpha, scale } => {
                scale * ((self.head.len() + 1) as f64).powf(-alpha)
            }
        }
    }

    /// `Σ_{i > head_len} b_i^p` in closed form.
    fn tail_power_sum(&self, p: f64) -> Result<f64, AnisotropyError> {
        self.tail_power_sum_beyond(p, self.head.len())
    }

    /// `Σ_{i > from} b_i^p` over tail entries only; `from ≥ head_len`.
    fn tail_power_sum_beyond(&self, p: f64, from: usize) -> Result<f64, AnisotropyError> {
        debug_assert!(from >= self.head.len());
        match self.tail {
            Tail::Zero => Ok(0.0),
            Tail::Algebraic { scale, .. } if scale == 0.0 => Ok(0.0),
            Tail::Algebraic { alpha, scale } => {
                let s = alpha * p;
                if s <= 1.0 {
                    return Err(AnisotropyError::DivergentTail { p, product: s });
                }
                Ok(scale.powf(p) * zeta_tail(s, from))
            }
        }
    }

    /// Best `s`-term approximation error `σ_s(b)_q = (Σ_{j>s} b_{π(j)}^q)^{1/q}`
    /// where `π` sorts the sequence nonincreasing, ties broken by index.
    pub fn best_s_term_error(&self, s: usize, q: f64) -> Result<f64, AnisotropyError> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(AnisotropyError::InvalidExponent(q));
        }
        // merge the sorted head against the (already sorted) tail to skip
        // the s largest entries, then sum the remainder directly; summing
        // small entries avoids cancellation against the removed mass
        let mut head_sorted = self.head.clone();
        head_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut hi = 0usize;
        let mut ti = self.head.len() + 1;
        for _ in 0..s {
            let hv = head_sorted.get(hi).copied().unwrap_or(0.0);
            let tv = self.tail_entry_at(ti);
            if hv >= tv {
                hi += 1;
            } else {
                ti += 1;
            }
        }
        let head_rest: f64 = head_sorted[hi.min(head_sorted.len())..]
            .iter()
            .rev()
            .map(|&x| x.powf(q))
            .sum();
        let tail_rest = self.tail_power_sum_beyond(q, ti - 1)?;
        Ok((head_rest + tail_rest).powf(1.0 / q))
    }

    fn tail_entry_at(&self, i: usize) -> f64 {
        match self.tail {
            Tail::Zero => 0.0,
            Tail::Algebraic { alpha, scale } => scale * (i as f64).powf(-alpha),
        }
    }

    /// Stechkin bound `σ_m(b)_2 ≤ ‖b‖_p · (m+1)^{1/2−1/p}` for `0 < p < 2`.
    pub fn stechkin_bound(&self, p: f64, m: usize) -> Result<f64, AnisotropyError> {
        assert!(p > 0.0 && p < 2.0, "Stechkin bound needs 0 < p < 2");
        Ok(self.lp_norm(p)? * ((m + 1) as f64).powf(0.5 - 1.0 / p))
    }

    /// JSON form `{"head":[...],"tail":{"kind":...}}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// `Σ_{i > from} i^{-s}` by explicit summation to a large cutoff plus an
/// Euler–Maclaurin remainder; absolute error well below 1e−12.
fn zeta_tail(s: f64, from: usize) -> f64 {
    const EXPLICIT: usize = 100_000;
    let cut = from.max(EXPLICIT);
    let mut sum = 0.0;
    for i in (from + 1)..=cut {
        sum += (i as f64).powf(-s);
    }
    let m = (cut + 1) as f64;
    // sum_{i >= m} i^-s = m^(1-s)/(s-1) + m^-s/2 + s m^-(s+1)/12 - O(s^3 m^-(s+3))
    sum + m.powf(1.0 - s) / (s - 1.0) + m.powf(-s) / 2.0 + s * m.powf(-s - 1.0) / 12.0
}

/// The flat sequence `b_i = (2m)^{−1/p}` for `i = 1, …, 2m`, zero beyond.
/// Satisfies `‖b‖_p = ‖b‖_{p,M} = 1` by construction.
pub fn make_flat_b(m: usize, p: f64) -> AnisotropySequence {
    assert!(m >= 1);
    assert!(p > 0.0 && p < 1.0, "flat family needs p in (0,1)");
    let value = (2.0 * m as f64).powf(-1.0 / p);
    AnisotropySequence::zero_tailed(vec![value; 2 * m])
}

/// The algebraic family `b_i = scale · i^{−1/p_star}` on `dims` entries.
/// Canonical test family for the rate experiments.
pub fn make_algebraic_b(p_star: f64, scale: f64, dims: usize) -> AnisotropySequence {
    assert!(p_star > 0.0 && p_star < 1.0, "need p_star in (0,1)");
    assert!(scale > 0.0);
    let head = (1..=dims)
        .map(|i| scale * (i as f64).powf(-1.0 / p_star))
        .collect();
    AnisotropySequence::zero_tailed(head)
}

/// Named slow-growth functions `g` for the log-weighted family.
///
/// `LogLogSquared` is not nondecreasing at its first index, so its
/// effective sequence is shifted by one; `Log` makes `Σ 1/(n g(n))`
/// diverge and is rejected by [`make_log_b`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlowGrowth {
    /// `g(n) = log²(n+1)`
    LogSquared,
    /// `g(n) = log(n+1) · (log log(n+1))²`, started one index late
    LogLogSquared,
    /// `g(n) = log(n+1)`; divergent, kept as the error-path witness
    Log,
}

impl SlowGrowth {
    pub fn name(&self) -> &'static str {
        match self {
            SlowGrowth::LogSquared => "log^2(n+1)",
            SlowGrowth::LogLogSquared => "log(n+1)(loglog(n+1))^2",
            SlowGrowth::Log => "log(n+1)",
        }
    }

    fn shift(&self) -> usize {
        match self {
            SlowGrowth::LogLogSquared => 1,
            _ => 0,
        }
    }

    fn raw(&self, n: f64) -> f64 {
        match self {
            SlowGrowth::LogSquared => (n + 1.0).ln().powi(2),
            SlowGrowth::LogLogSquared => {
                let l = (n + 1.0).ln();
                l * l.ln().powi(2)
            }
            SlowGrowth::Log => (n + 1.0).ln(),
        }
    }

    /// The positive nondecreasing sequence actually used: `g(n + shift)`.
    pub fn effective(&self, n: usize) -> f64 {
        self.raw((n + self.shift()) as f64)
    }

    /// Certified bounds `(lo, hi)` on `Σ_{n > m} 1/(n · g_eff(n))`, or
    /// `None` when the series diverges.
    fn tail_bounds(&self, m: usize) -> Option<(f64, f64)> {
        let m = m as f64;
        match self {
            SlowGrowth::LogSquared => Some((1.0 / (m + 2.0).ln(), 1.0 / m.ln())),
            SlowGrowth::LogLogSquared => {
                // effective g(n) = log(n+2)(loglog(n+2))^2
                Some((1.0 / (m + 3.0).ln().ln(), 1.0 / m.ln().ln()))
            }
            SlowGrowth::Log => None,
        }
    }
}

/// Result of the log-weighted construction `b_i = c_{p,g} (i g(i))^{−1/p}`.
#[derive(Debug, Clone)]
pub struct LogAnisotropy {
    /// Head of `cutoff` entries, zero tail.
    pub sequence: AnisotropySequence,
    /// The normalization constant `c_{p,g} = (Σ (n g(n))^{−1})^{−1/p}`.
    pub normalization: f64,
    /// Certified relative error of `normalization`.
    pub normalization_error: f64,
    /// Certified upper bound on `1 − ‖b‖_p` caused by truncating the head.
    pub norm_deficit: f64,
}

/// Builds the log-weighted sequence of Theorem-style slow growth:
/// `b_i = c_{p,g} (i g(i))^{−1/p}` for `i ≤ cutoff`, zero beyond, with
/// `c_{p,g}` evaluated by partial sum plus certified integral tail bounds.
pub fn make_log_b(
    p: f64,
    g: SlowGrowth,
    cutoff: usize,
) -> Result<LogAnisotropy, AnisotropyError> {
    assert!(p > 0.0 && p < 1.0, "log family needs p in (0,1)");
    assert!(cutoff >= 1000, "cutoff must be at least 10^3");
    let Some(_) = g.tail_bounds(10) else {
        return Err(AnisotropyError::DivergentGrowth { name: g.name() });
    };

    let internal = cutoff.max(2_000_000);
    let mut head_partial = 0.0; // sum over n <= cutoff
    let mut partial = 0.0; // sum over n <= internal
    for n in 1..=internal {
        let term = 1.0 / (n as f64 * g.effective(n));
        partial += term;
        if n <= cutoff {
            head_partial += term;
        }
    }
    let (tail_lo, tail_hi) = g.tail_bounds(internal).unwrap();
    let total_lo = partial + tail_lo;
    let total_hi = partial + tail_hi;
    let total_mid = 0.5 * (total_lo + total_hi);
    // relative error of c_{p,g}: (1/p) * relative half-width of the sum
    let normalization_error = (total_hi - total_lo) / (2.0 * total_mid * p);

    let c = total_mid.powf(-1.0 / p);
    let head: Vec<f64> = (1..=cutoff)
        .map(|i| c * (i as f64 * g.effective(i)).powf(-1.0 / p))
        .collect();
    let norm_deficit = 1.0 - (head_partial / total_hi).powf(1.0 / p);

    Ok(LogAnisotropy {
        sequence: AnisotropySequence::zero_tailed(head),
        normalization: c,
        normalization_error,
        norm_deficit,
    })
}
