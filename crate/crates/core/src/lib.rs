//! Risk measures for the minimum, maximum and sum of two dependent losses.
//!
//! Losses are exponential or Pareto, joined by a Farlie-Gumbel-Morgenstern
//! copula. VaR, CTE and median of the tail (MoT) are computed from exact
//! survival expansions where one exists and by numerical inversion and
//! quadrature otherwise. [`mc_oracle`] provides an independent Monte Carlo
//! check.
//!
//! ```
//! use copula_risk::{Alpha, BivariatePortfolio, Measure, SolverSettings, Target, compute_measure};
//!
//! let p = BivariatePortfolio::exponential(0.5, 0.6, 0.5)?;
//! let alpha = Alpha::new(0.9)?;
//! let var = compute_measure(&p, Target::Min, Measure::Var, alpha, &SolverSettings::default())?;
//! assert!((var - 2.3003).abs() < 1e-4);
//! # Ok::<(), copula_risk::Error>(())
//! ```

pub mod aggregate;
pub mod copula;
pub mod error;
pub mod expansion;
pub mod extremes;
pub mod marginals;
pub mod mc_oracle;
pub mod measure;
pub mod numerics;

pub use aggregate::{
    aggregate_cdf, aggregate_cte, aggregate_mot, aggregate_pdf, aggregate_report, aggregate_var, AggregateExpPortfolio,
};
pub use copula::FgmCopula;
pub use error::{Error, Result};
pub use expansion::{TailBase, TailExpansion, TailTerm};
pub use extremes::{
    extreme_cdf, extreme_cte, extreme_expansion, extreme_mot, extreme_pdf, extreme_report, extreme_var,
    BivariatePortfolio, Extreme,
};
pub use marginals::{Alpha, ExponentialMarginal, Family, Marginal, Method, ParetoMarginal, RiskReport};
pub use measure::{compute_measure, compute_report, method_for, Measure, Target};
pub use numerics::SolverSettings;
