//! The sum `X1 + X2` of two FGM-dependent exponential losses.
//!
//! The joint density factors as
//! `λ1λ2 [(1+θ) e^{-λ1x1-λ2x2} - 2θ e^{-2λ1x1-λ2x2} - 2θ e^{-λ1x1-2λ2x2} + 4θ e^{-2λ1x1-2λ2x2}]`,
//! and each piece convolves along `x1 + x2 = x` to
//! `c λ1λ2 (e^{-bx} - e^{-ax}) / (a - b)`. Collecting rates gives the sum's
//! density as a signed mixture of exponential densities with rates in
//! `{λ1, λ2, 2λ1, 2λ2}`.
//!
//! The closed form divides by `λ1 - λ2`, `2λ1 - λ2` and `λ1 - 2λ2`. Near
//! those hyperplanes the density and CDF fall back to numerical convolution
//! and the tail expectation to semi-infinite quadrature.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::copula::FgmCopula;
use crate::error::{Error, Result};
use crate::expansion::{TailBase, TailExpansion};
use crate::extremes::BivariatePortfolio;
use crate::marginals::{Alpha, ExponentialMarginal, Marginal, Method, RiskReport};
use crate::numerics::{invert_cdf, quad_interval, quad_tail, SolverSettings};

/// Relative gap below which a closed-form denominator counts as singular.
pub const SINGULARITY_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateExpPortfolio {
    m1: ExponentialMarginal,
    m2: ExponentialMarginal,
    copula: FgmCopula,
    /// `None` when the rates sit on a singular hyperplane.
    expansion: Option<TailExpansion>,
}

impl AggregateExpPortfolio {
    pub fn new(m1: ExponentialMarginal, m2: ExponentialMarginal, copula: FgmCopula) -> Result<Self> {
        let expansion = sum_expansion(m1.lambda(), m2.lambda(), copula.theta())?;
        Ok(Self {
            m1,
            m2,
            copula,
            expansion,
        })
    }

    pub fn from_rates(lambda1: f64, lambda2: f64, theta: f64) -> Result<Self> {
        Self::new(
            ExponentialMarginal::new(lambda1)?,
            ExponentialMarginal::new(lambda2)?,
            FgmCopula::new(theta)?,
        )
    }

    pub fn m1(&self) -> ExponentialMarginal {
        self.m1
    }

    pub fn m2(&self) -> ExponentialMarginal {
        self.m2
    }

    pub fn copula(&self) -> FgmCopula {
        self.copula
    }

    /// The closed-form expansion, unless the rates are near-singular.
    pub fn expansion(&self) -> Option<&TailExpansion> {
        self.expansion.as_ref()
    }

    pub fn uses_closed_form(&self) -> bool {
        self.expansion.is_some()
    }

    pub fn method(&self) -> Method {
        if self.uses_closed_form() {
            Method::RootSolve
        } else {
            Method::Quadrature
        }
    }
}

impl TryFrom<&BivariatePortfolio> for AggregateExpPortfolio {
    type Error = Error;
    fn try_from(p: &BivariatePortfolio) -> Result<Self> {
        match (p.m1(), p.m2()) {
            (Marginal::Exponential(a), Marginal::Exponential(b)) => Self::new(a, b, p.copula()),
            _ => Err(Error::Unsupported(
                "the aggregate is only available for exponential marginals".into(),
            )),
        }
    }
}

fn near(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() < SINGULARITY_GUARD * scale
}

fn sum_expansion(l1: f64, l2: f64, theta: f64) -> Result<Option<TailExpansion>> {
    let scale = l1.max(l2);
    if near(l1, l2, scale) || (theta != 0.0 && (near(l1, 2.0 * l2, scale) || near(2.0 * l1, l2, scale))) {
        return Ok(None);
    }
    // (coefficient, rate on x1, rate on x2) of the joint density pieces.
    let pieces = [
        (1.0 + theta, l1, l2),
        (-2.0 * theta, 2.0 * l1, l2),
        (-2.0 * theta, l1, 2.0 * l2),
        (4.0 * theta, 2.0 * l1, 2.0 * l2),
    ];
    let mut terms = Vec::with_capacity(8);
    for (c, a, b) in pieces {
        if c == 0.0 {
            continue;
        }
        let k = c * l1 * l2 / (a - b);
        // k (e^{-bx} - e^{-ax}) = (k/b) · b e^{-bx} - (k/a) · a e^{-ax}
        terms.push((k / b, b));
        terms.push((-k / a, a));
    }
    if terms.iter().any(|(c, _)| !c.is_finite()) {
        return Err(Error::SingularParameters(format!(
            "closed form undefined for rates ({l1}, {l2})"
        )));
    }
    Ok(Some(TailExpansion::new(TailBase::Exponential, terms)))
}

fn convolution_pdf(p: &AggregateExpPortfolio, x: f64, settings: &SolverSettings) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let (m1, m2, c) = (p.m1, p.m2, p.copula);
    quad_interval(
        |t| {
            let y = x - t;
            m1.pdf(t) * m2.pdf(y) * c.density_unchecked(m1.cdf(t), m2.cdf(y))
        },
        0.0,
        x,
        settings,
    )
}

fn convolution_cdf(p: &AggregateExpPortfolio, x: f64, settings: &SolverSettings) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let (m1, m2, c) = (p.m1, p.m2, p.copula);
    // P(X1 + X2 ≤ x) = ∫_0^x f1(t) P(X2 ≤ x - t | X1 = t) dt
    let v = quad_interval(
        |t| m1.pdf(t) * c.conditional_cdf_unchecked(m2.cdf(x - t), m1.cdf(t)),
        0.0,
        x,
        settings,
    )?;
    Ok(v.clamp(0.0, 1.0))
}

pub fn aggregate_pdf(p: &AggregateExpPortfolio, x: f64, settings: &SolverSettings) -> Result<f64> {
    if x < 0.0 {
        return Ok(0.0);
    }
    match &p.expansion {
        Some(e) => Ok(e.pdf(x).max(0.0)),
        None => convolution_pdf(p, x, settings),
    }
}

pub fn aggregate_cdf(p: &AggregateExpPortfolio, x: f64, settings: &SolverSettings) -> Result<f64> {
    match &p.expansion {
        Some(e) => Ok(e.cdf(x)),
        None => convolution_cdf(p, x, settings),
    }
}

fn invert(p: &AggregateExpPortfolio, level: f64, settings: &SolverSettings) -> Result<f64> {
    match &p.expansion {
        Some(e) => invert_cdf(|x| e.cdf(x), level, 0.0, settings),
        None => {
            // A failed inner quadrature surfaces as NaN, which the solver rejects.
            let f = |x: f64| convolution_cdf(p, x, settings).unwrap_or(f64::NAN);
            invert_cdf(f, level, 0.0, settings)
        }
    }
}

pub fn aggregate_var(p: &AggregateExpPortfolio, alpha: Alpha, settings: &SolverSettings) -> Result<f64> {
    invert(p, alpha.value(), settings)
}

pub fn aggregate_cte(p: &AggregateExpPortfolio, alpha: Alpha, settings: &SolverSettings) -> Result<f64> {
    let q = aggregate_var(p, alpha, settings)?;
    let tail = match &p.expansion {
        Some(e) => e.tail_integral(q)?,
        None => {
            let failure = RefCell::new(None);
            let v = quad_tail(
                |x| match convolution_pdf(p, x, settings) {
                    Ok(f) => x * f,
                    Err(err) => {
                        failure.borrow_mut().get_or_insert(err);
                        0.0
                    }
                },
                q,
                settings,
            )?;
            if let Some(err) = failure.into_inner() {
                return Err(err);
            }
            v
        }
    };
    Ok(tail / alpha.tail_mass())
}

pub fn aggregate_mot(p: &AggregateExpPortfolio, alpha: Alpha, settings: &SolverSettings) -> Result<f64> {
    invert(p, alpha.median_of_tail_level(), settings)
}

pub fn aggregate_report(p: &AggregateExpPortfolio, alpha: Alpha, settings: &SolverSettings) -> Result<RiskReport> {
    Ok(RiskReport {
        alpha,
        var: aggregate_var(p, alpha, settings)?,
        cte: aggregate_cte(p, alpha, settings)?,
        mot: aggregate_mot(p, alpha, settings)?,
        method: p.method(),
        tolerance: settings.abs_tol,
    })
}
