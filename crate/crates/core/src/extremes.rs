//! Minimum and maximum of two FGM-dependent losses with exponential or
//! Pareto marginals.
//!
//! With survivals `s1 = 1 - F1(x)`, `s2 = 1 - F2(x)`:
//!
//! ```text
//! P(min > x) = s1 s2 (1 + θ (1-s1)(1-s2))
//! P(max ≤ x) = (1-s1)(1-s2)(1 + θ s1 s2)
//! ```
//!
//! Expanding either into powers of `s1` and `s2` gives a [`TailExpansion`],
//! from which densities and tail expectations are read off term by term.

use serde::{Deserialize, Serialize};

use crate::copula::FgmCopula;
use crate::error::{domain, Error, Result};
use crate::expansion::{TailBase, TailExpansion};
use crate::marginals::{Alpha, Family, Marginal, Method, RiskReport};
use crate::numerics::{invert_cdf, SolverSettings};

/// Two same-family marginals joined by an FGM copula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariatePortfolio {
    m1: Marginal,
    m2: Marginal,
    copula: FgmCopula,
}

impl BivariatePortfolio {
    pub fn new(m1: Marginal, m2: Marginal, copula: FgmCopula) -> Result<Self> {
        match (m1, m2) {
            (Marginal::Exponential(_), Marginal::Exponential(_)) => {}
            (Marginal::Pareto(a), Marginal::Pareto(b)) => {
                if a.x0() != b.x0() {
                    return Err(domain(format!(
                        "Pareto marginals must share the scale x0 ({} vs {})",
                        a.x0(),
                        b.x0()
                    )));
                }
            }
            _ => return Err(Error::Unsupported("marginals must belong to the same family".into())),
        }
        Ok(Self { m1, m2, copula })
    }

    pub fn exponential(lambda1: f64, lambda2: f64, theta: f64) -> Result<Self> {
        Self::new(
            Marginal::exponential(lambda1)?,
            Marginal::exponential(lambda2)?,
            FgmCopula::new(theta)?,
        )
    }

    pub fn pareto(x0: f64, gamma1: f64, gamma2: f64, theta: f64) -> Result<Self> {
        Self::new(
            Marginal::pareto(x0, gamma1)?,
            Marginal::pareto(x0, gamma2)?,
            FgmCopula::new(theta)?,
        )
    }

    pub fn m1(&self) -> Marginal {
        self.m1
    }

    pub fn m2(&self) -> Marginal {
        self.m2
    }

    pub fn copula(&self) -> FgmCopula {
        self.copula
    }

    pub fn family(&self) -> Family {
        self.m1.family()
    }

    pub fn support_start(&self) -> f64 {
        self.m1.support_start()
    }

    /// Same marginals, different dependence.
    pub fn with_copula(&self, copula: FgmCopula) -> Self {
        Self { copula, ..*self }
    }

    fn tail_base(&self) -> TailBase {
        match self.m1 {
            Marginal::Exponential(_) => TailBase::Exponential,
            Marginal::Pareto(p) => TailBase::Pareto { x0: p.x0() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extreme {
    Min,
    Max,
}

impl Extreme {
    pub fn as_str(self) -> &'static str {
        match self {
            Extreme::Min => "min",
            Extreme::Max => "max",
        }
    }
}

/// Survival function of the extreme as a signed sum of marginal-family terms.
pub fn extreme_expansion(p: &BivariatePortfolio, which: Extreme) -> TailExpansion {
    let k1 = p.m1.tail_exponent();
    let k2 = p.m2.tail_exponent();
    let t = p.copula.theta();
    let terms = match which {
        // s1 s2 (1+θ) - θ s1² s2 - θ s1 s2² + θ s1² s2²
        Extreme::Min => vec![
            (1.0 + t, k1 + k2),
            (-t, 2.0 * k1 + k2),
            (-t, k1 + 2.0 * k2),
            (t, 2.0 * (k1 + k2)),
        ],
        // s1 + s2 - (1+θ) s1 s2 + θ s1² s2 + θ s1 s2² - θ s1² s2²
        Extreme::Max => vec![
            (1.0, k1),
            (1.0, k2),
            (-(1.0 + t), k1 + k2),
            (t, 2.0 * k1 + k2),
            (t, k1 + 2.0 * k2),
            (-t, 2.0 * (k1 + k2)),
        ],
    };
    TailExpansion::new(p.tail_base(), terms)
}

/// CDF of the extreme, evaluated through the copula.
pub fn extreme_cdf(p: &BivariatePortfolio, which: Extreme, x: f64) -> f64 {
    if x <= p.support_start() {
        return 0.0;
    }
    let s1 = p.m1.survival(x);
    let s2 = p.m2.survival(x);
    let t = p.copula.theta();
    match which {
        // 1 - Ĉ(s1, s2), with the survival copula in its factored form.
        Extreme::Min => 1.0 - s1 * s2 * (1.0 + t * (1.0 - s1) * (1.0 - s2)),
        Extreme::Max => p.copula.cdf_unchecked(1.0 - s1, 1.0 - s2),
    }
}

pub fn extreme_pdf(p: &BivariatePortfolio, which: Extreme, x: f64) -> f64 {
    if x < p.support_start() {
        return 0.0;
    }
    extreme_expansion(p, which).pdf(x).max(0.0)
}

pub fn extreme_var(p: &BivariatePortfolio, which: Extreme, alpha: Alpha, settings: &SolverSettings) -> Result<f64> {
    invert_cdf(|x| extreme_cdf(p, which, x), alpha.value(), p.support_start(), settings)
}

/// `(1 / (1-α)) ∫_{VaR}^∞ x f(x) dx`, summed over the primitive tail terms.
pub fn extreme_cte(p: &BivariatePortfolio, which: Extreme, alpha: Alpha, settings: &SolverSettings) -> Result<f64> {
    let expansion = extreme_expansion(p, which);
    // Fail on a divergent tail before spending a root solve.
    expansion.tail_integral(expansion.support_start())?;
    let q = extreme_var(p, which, alpha, settings)?;
    Ok(expansion.tail_integral(q)? / alpha.tail_mass())
}

/// Solves `F(M) = (1 + α) / 2`, which is the tail-median condition
/// `∫_{VaR}^{M} f = (1 - α) / 2` since `F(VaR) = α`.
pub fn extreme_mot(p: &BivariatePortfolio, which: Extreme, alpha: Alpha, settings: &SolverSettings) -> Result<f64> {
    invert_cdf(
        |x| extreme_cdf(p, which, x),
        alpha.median_of_tail_level(),
        p.support_start(),
        settings,
    )
}

pub fn extreme_report(
    p: &BivariatePortfolio,
    which: Extreme,
    alpha: Alpha,
    settings: &SolverSettings,
) -> Result<RiskReport> {
    Ok(RiskReport {
        alpha,
        var: extreme_var(p, which, alpha, settings)?,
        cte: extreme_cte(p, which, alpha, settings)?,
        mot: extreme_mot(p, which, alpha, settings)?,
        method: Method::RootSolve,
        tolerance: settings.abs_tol,
    })
}
