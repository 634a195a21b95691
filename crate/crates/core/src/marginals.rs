//! Exponential and Pareto loss marginals with their closed-form VaR, CTE and
//! median-of-tail.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Confidence level, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(domain(format!("alpha must lie in (0, 1), got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Probability mass above the VaR, `1 - α`.
    pub fn tail_mass(self) -> f64 {
        1.0 - self.0
    }

    /// Level whose quantile is the median of the tail, `(1 + α) / 2`.
    pub fn median_of_tail_level(self) -> f64 {
        0.5 * (1.0 + self.0)
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    RootSolve,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::RootSolve => "root_solve",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// VaR, CTE and MoT of one risk at one confidence level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub alpha: Alpha,
    pub var: f64,
    pub cte: f64,
    pub mot: f64,
    pub method: Method,
    /// Absolute tolerance of the numbers; zero for closed forms.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialMarginal {
    lambda: f64,
}

impl ExponentialMarginal {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(Self { lambda })
        } else {
            Err(domain(format!("exponential rate must be > 0, got {lambda}")))
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.lambda * x).exp_m1()
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.lambda * x).exp()
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.lambda * (-self.lambda * x).exp()
        }
    }

    /// Inverse CDF on `[0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        -(-p).ln_1p() / self.lambda
    }

    pub fn var(&self, alpha: Alpha) -> f64 {
        self.quantile(alpha.value())
    }

    pub fn cte(&self, alpha: Alpha) -> f64 {
        1.0 / self.lambda + self.var(alpha)
    }

    pub fn mot(&self, alpha: Alpha) -> f64 {
        -(0.5 * alpha.tail_mass()).ln() / self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoMarginal {
    x0: f64,
    gamma: f64,
}

impl ParetoMarginal {
    pub fn new(x0: f64, gamma: f64) -> Result<Self> {
        if !(x0 > 0.0 && x0.is_finite()) {
            return Err(domain(format!("Pareto scale must be > 0, got {x0}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(domain(format!("Pareto exponent must be > 0, got {gamma}")));
        }
        Ok(Self { x0, gamma })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= self.x0 {
            1.0
        } else {
            (self.x0 / x).powf(self.gamma)
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.x0 {
            0.0
        } else {
            self.gamma / x * (self.x0 / x).powf(self.gamma)
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.x0 * (1.0 - p).powf(-1.0 / self.gamma)
    }

    pub fn var(&self, alpha: Alpha) -> f64 {
        self.quantile(alpha.value())
    }

    pub fn cte(&self, alpha: Alpha) -> Result<f64> {
        if self.gamma <= 1.0 {
            return Err(Error::DivergentTail { exponent: self.gamma });
        }
        Ok(self.gamma / (self.gamma - 1.0) * self.var(alpha))
    }

    /// Solves `F(M) = (1 + α) / 2` directly: `M = x0 ((1 - α) / 2)^{-1/γ}`.
    pub fn mot(&self, alpha: Alpha) -> f64 {
        self.x0 * (0.5 * alpha.tail_mass()).powf(-1.0 / self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Exponential,
    Pareto,
}

/// Either supported marginal family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Marginal {
    Exponential(ExponentialMarginal),
    Pareto(ParetoMarginal),
}

impl From<ExponentialMarginal> for Marginal {
    fn from(m: ExponentialMarginal) -> Self {
        Marginal::Exponential(m)
    }
}

impl From<ParetoMarginal> for Marginal {
    fn from(m: ParetoMarginal) -> Self {
        Marginal::Pareto(m)
    }
}

impl Marginal {
    pub fn exponential(lambda: f64) -> Result<Self> {
        ExponentialMarginal::new(lambda).map(Into::into)
    }

    pub fn pareto(x0: f64, gamma: f64) -> Result<Self> {
        ParetoMarginal::new(x0, gamma).map(Into::into)
    }

    pub fn family(&self) -> Family {
        match self {
            Marginal::Exponential(_) => Family::Exponential,
            Marginal::Pareto(_) => Family::Pareto,
        }
    }

    /// Left end of the support.
    pub fn support_start(&self) -> f64 {
        match self {
            Marginal::Exponential(_) => 0.0,
            Marginal::Pareto(m) => m.x0,
        }
    }

    /// Exponent `k` in the survival function `b(x)^k` (rate or tail index).
    pub(crate) fn tail_exponent(&self) -> f64 {
        match self {
            Marginal::Exponential(m) => m.lambda,
            Marginal::Pareto(m) => m.gamma,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Exponential(m) => m.cdf(x),
            Marginal::Pareto(m) => m.cdf(x),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        match self {
            Marginal::Exponential(m) => m.survival(x),
            Marginal::Pareto(m) => m.survival(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Exponential(m) => m.pdf(x),
            Marginal::Pareto(m) => m.pdf(x),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            Marginal::Exponential(m) => m.quantile(p),
            Marginal::Pareto(m) => m.quantile(p),
        }
    }

    pub fn var(&self, alpha: Alpha) -> f64 {
        self.quantile(alpha.value())
    }

    pub fn cte(&self, alpha: Alpha) -> Result<f64> {
        match self {
            Marginal::Exponential(m) => Ok(m.cte(alpha)),
            Marginal::Pareto(m) => m.cte(alpha),
        }
    }

    pub fn mot(&self, alpha: Alpha) -> f64 {
        match self {
            Marginal::Exponential(m) => m.mot(alpha),
            Marginal::Pareto(m) => m.mot(alpha),
        }
    }

    pub fn report(&self, alpha: Alpha) -> Result<RiskReport> {
        Ok(RiskReport {
            alpha,
            var: self.var(alpha),
            cte: self.cte(alpha)?,
            mot: self.mot(alpha),
            method: Method::ClosedForm,
            tolerance: 0.0,
        })
    }
}
