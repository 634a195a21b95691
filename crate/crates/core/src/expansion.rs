//! Signed sums of primitive tail terms.
//!
//! Every distribution built in this crate from two exponential or two Pareto
//! marginals under the FGM copula has a survival function of the form
//! `S(x) = Σ c_j b(x)^{k_j}` with a common base `b(x) = e^{-x}` (exponential)
//! or `b(x) = x0 / x` (Pareto). Density and tail integral follow term by term:
//! each term is a signed multiple of an exponential or Pareto distribution
//! with rate/exponent `k_j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{exp_tail_unchecked, pareto_tail_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "snake_case")]
pub enum TailBase {
    /// `b(x) = e^{-x}` on `x ≥ 0`.
    Exponential,
    /// `b(x) = x0 / x` on `x ≥ x0`.
    Pareto { x0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailTerm {
    pub coefficient: f64,
    /// Rate (exponential base) or tail index (Pareto base).
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailExpansion {
    base: TailBase,
    terms: Vec<TailTerm>,
}

impl TailExpansion {
    /// Builds the expansion, merging equal exponents and dropping zero terms.
    pub fn new(base: TailBase, raw: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut terms: Vec<TailTerm> = Vec::new();
        for (coefficient, exponent) in raw {
            if coefficient == 0.0 {
                continue;
            }
            match terms.iter_mut().find(|t| t.exponent == exponent) {
                Some(t) => t.coefficient += coefficient,
                None => terms.push(TailTerm { coefficient, exponent }),
            }
        }
        terms.retain(|t| t.coefficient != 0.0);
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        Self { base, terms }
    }

    pub fn base(&self) -> TailBase {
        self.base
    }

    pub fn terms(&self) -> &[TailTerm] {
        &self.terms
    }

    pub fn support_start(&self) -> f64 {
        match self.base {
            TailBase::Exponential => 0.0,
            TailBase::Pareto { x0 } => x0,
        }
    }

    #[inline]
    fn powers(&self, x: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        // (coefficient, exponent, b(x)^exponent)
        let base = self.base;
        self.terms.iter().map(move |t| {
            let p = match base {
                TailBase::Exponential => (-t.exponent * x).exp(),
                TailBase::Pareto { x0 } => (x0 / x).powf(t.exponent),
            };
            (t.coefficient, t.exponent, p)
        })
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= self.support_start() {
            return 1.0;
        }
        self.powers(x).map(|(c, _, p)| c * p).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.support_start() {
            return 0.0;
        }
        (1.0 - self.survival(x)).clamp(0.0, 1.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.support_start() {
            return 0.0;
        }
        let s: f64 = self.powers(x).map(|(c, k, p)| c * k * p).sum();
        match self.base {
            TailBase::Exponential => s,
            TailBase::Pareto { .. } => s / x,
        }
    }

    /// `∫_q^∞ x f(x) dx` as the signed sum of primitive tail integrals.
    pub fn tail_integral(&self, q: f64) -> Result<f64> {
        let q = q.max(self.support_start());
        match self.base {
            TailBase::Exponential => Ok(self
                .terms
                .iter()
                .map(|t| t.coefficient * exp_tail_unchecked(t.exponent, q))
                .sum()),
            TailBase::Pareto { x0 } => {
                if let Some(t) = self.terms.iter().find(|t| t.exponent <= 1.0) {
                    return Err(Error::DivergentTail { exponent: t.exponent });
                }
                Ok(self
                    .terms
                    .iter()
                    .map(|t| t.coefficient * pareto_tail_unchecked(x0, t.exponent, q))
                    .sum())
            }
        }
    }
}
