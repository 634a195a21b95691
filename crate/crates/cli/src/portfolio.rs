use serde::Serialize;

use copula_risk::{BivariatePortfolio, Family, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dist {
    Exp,
    Pareto,
}

impl Dist {
    pub fn as_str(self) -> &'static str {
        match self {
            Dist::Exp => "exp",
            Dist::Pareto => "pareto",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Dist::Exp => Family::Exponential,
            Dist::Pareto => Family::Pareto,
        }
    }
}

/// Portfolio parameters as given on the command line. Only the fields of the
/// chosen distribution are used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PortfolioSpec {
    pub dist: Dist,
    pub l1: f64,
    pub l2: f64,
    pub x0: f64,
    pub g1: f64,
    pub g2: f64,
    pub theta: f64,
}

impl PortfolioSpec {
    pub const DEFAULT_RATES: (f64, f64) = (0.5, 0.6);
    pub const DEFAULT_PARETO: (f64, f64, f64) = (1.0, 3.0, 4.0);

    /// Defaults used throughout the paper's tables.
    pub fn paper_default(dist: Dist, theta: f64) -> Self {
        Self {
            dist,
            l1: Self::DEFAULT_RATES.0,
            l2: Self::DEFAULT_RATES.1,
            x0: Self::DEFAULT_PARETO.0,
            g1: Self::DEFAULT_PARETO.1,
            g2: Self::DEFAULT_PARETO.2,
            theta,
        }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn build(&self) -> Result<BivariatePortfolio> {
        match self.dist {
            Dist::Exp => BivariatePortfolio::exponential(self.l1, self.l2, self.theta),
            Dist::Pareto => BivariatePortfolio::pareto(self.x0, self.g1, self.g2, self.theta),
        }
    }
}
