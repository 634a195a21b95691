//! Dispatch from (target, measure) to the module that computes it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate_cte, aggregate_mot, aggregate_report, aggregate_var, AggregateExpPortfolio};
use crate::error::{Error, Result};
use crate::extremes::{extreme_cte, extreme_mot, extreme_report, extreme_var, BivariatePortfolio, Extreme};
use crate::marginals::{Alpha, Family, Method, RiskReport};
use crate::numerics::SolverSettings;

/// Which loss of the pair a measure is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    X1,
    X2,
    Min,
    Max,
    Sum,
}

impl Target {
    pub const ALL: [Target; 5] = [Target::X1, Target::X2, Target::Min, Target::Max, Target::Sum];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::X1 => "x1",
            Target::X2 => "x2",
            Target::Min => "min",
            Target::Max => "max",
            Target::Sum => "sum",
        }
    }

    /// Value of this target for one realized pair.
    #[inline]
    pub fn apply(self, x1: f64, x2: f64) -> f64 {
        match self {
            Target::X1 => x1,
            Target::X2 => x2,
            Target::Min => x1.min(x2),
            Target::Max => x1.max(x2),
            Target::Sum => x1 + x2,
        }
    }

    pub fn supports(self, family: Family) -> bool {
        !(self == Target::Sum && family != Family::Exponential)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown target '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Var,
    Cte,
    Mot,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Var, Measure::Cte, Measure::Mot];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Var => "var",
            Measure::Cte => "cte",
            Measure::Mot => "mot",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown measure '{s}'")))
    }
}

impl RiskReport {
    pub fn get(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Var => self.var,
            Measure::Cte => self.cte,
            Measure::Mot => self.mot,
        }
    }
}

fn aggregate_of(p: &BivariatePortfolio) -> Result<AggregateExpPortfolio> {
    AggregateExpPortfolio::try_from(p)
}

/// One measure of one target.
pub fn compute_measure(
    p: &BivariatePortfolio,
    target: Target,
    measure: Measure,
    alpha: Alpha,
    settings: &SolverSettings,
) -> Result<f64> {
    let extreme = |which| match measure {
        Measure::Var => extreme_var(p, which, alpha, settings),
        Measure::Cte => extreme_cte(p, which, alpha, settings),
        Measure::Mot => extreme_mot(p, which, alpha, settings),
    };
    match target {
        Target::X1 | Target::X2 => {
            let m = if target == Target::X1 { p.m1() } else { p.m2() };
            match measure {
                Measure::Var => Ok(m.var(alpha)),
                Measure::Cte => m.cte(alpha),
                Measure::Mot => Ok(m.mot(alpha)),
            }
        }
        Target::Min => extreme(Extreme::Min),
        Target::Max => extreme(Extreme::Max),
        Target::Sum => {
            let agg = aggregate_of(p)?;
            match measure {
                Measure::Var => aggregate_var(&agg, alpha, settings),
                Measure::Cte => aggregate_cte(&agg, alpha, settings),
                Measure::Mot => aggregate_mot(&agg, alpha, settings),
            }
        }
    }
}

/// All three measures of one target.
pub fn compute_report(
    p: &BivariatePortfolio,
    target: Target,
    alpha: Alpha,
    settings: &SolverSettings,
) -> Result<RiskReport> {
    match target {
        Target::X1 => p.m1().report(alpha),
        Target::X2 => p.m2().report(alpha),
        Target::Min => extreme_report(p, Extreme::Min, alpha, settings),
        Target::Max => extreme_report(p, Extreme::Max, alpha, settings),
        Target::Sum => aggregate_report(&aggregate_of(p)?, alpha, settings),
    }
}

/// How a single measure of `target` is obtained.
pub fn method_for(p: &BivariatePortfolio, target: Target) -> Method {
    match target {
        Target::X1 | Target::X2 => Method::ClosedForm,
        Target::Min | Target::Max => Method::RootSolve,
        Target::Sum => aggregate_of(p).map(|a| a.method()).unwrap_or(Method::RootSolve),
    }
}
