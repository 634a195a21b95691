//! Cross-check of every analytic measure against the Monte Carlo oracle.

use std::cmp::Ordering;

use serde::Serialize;

use copula_risk::mc_oracle::{empirical_measure, sample_pairs};
use copula_risk::{compute_measure, Alpha, Measure, Result, SolverSettings, Target};

use crate::format::{f17, opt_f17, CsvRow};
use crate::portfolio::{Dist, PortfolioSpec};

/// A cell passes when the analytic value is within this many standard errors
/// of the Monte Carlo estimate.
pub const Z_LIMIT: f64 = 3.0;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MC_N: usize = 1_000_000;
pub const DEFAULT_THETAS: [f64; 4] = [-0.9, 0.0, 0.5, 0.9];
pub const DEFAULT_ALPHAS: [f64; 2] = [0.9, 0.95];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub mc_n: usize,
    pub thetas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// One entry per distribution to check; `theta` is taken from `thetas`.
    pub portfolios: Vec<PortfolioSpec>,
    pub settings: SolverSettings,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            mc_n: DEFAULT_MC_N,
            thetas: DEFAULT_THETAS.to_vec(),
            alphas: DEFAULT_ALPHAS.to_vec(),
            portfolios: vec![
                PortfolioSpec::paper_default(Dist::Exp, 0.0),
                PortfolioSpec::paper_default(Dist::Pareto, 0.0),
            ],
            settings: SolverSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyCell {
    pub dist: Dist,
    pub theta: f64,
    pub alpha: f64,
    pub target: Target,
    pub measure: Measure,
    pub analytic: Option<f64>,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub z: Option<f64>,
    pub status: Outcome,
    pub error: Option<String>,
}

impl VerifyCell {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.dist
            .cmp(&other.dist)
            .then(self.theta.total_cmp(&other.theta))
            .then(self.alpha.total_cmp(&other.alpha))
            .then(self.target.cmp(&other.target))
            .then(self.measure.cmp(&other.measure))
    }
}

impl CsvRow for VerifyCell {
    const HEADER: &'static [&'static str] = &[
        "dist",
        "theta",
        "alpha",
        "target",
        "measure",
        "analytic",
        "estimate",
        "std_error",
        "z",
        "status",
        "error",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.dist.as_str().to_string(),
            f17(self.theta),
            f17(self.alpha),
            self.target.to_string(),
            self.measure.to_string(),
            opt_f17(self.analytic),
            opt_f17(self.estimate),
            opt_f17(self.std_error),
            opt_f17(self.z),
            self.status.as_str().to_string(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub mc_n: usize,
    pub z_limit: f64,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub cells: Vec<VerifyCell>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.errors == 0
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let alphas = cfg.alphas.iter().map(|&a| Alpha::new(a)).collect::<Result<Vec<_>>>()?;
    let mut cells = Vec::new();
    for base in &cfg.portfolios {
        for &theta in &cfg.thetas {
            let p = base.with_theta(theta).build()?;
            let batch = sample_pairs(&p, cfg.mc_n, cfg.seed)?;
            for target in Target::ALL.into_iter().filter(|t| t.supports(p.family())) {
                let sorted = batch.sorted(target);
                for &alpha in &alphas {
                    for measure in Measure::ALL {
                        let mut cell = VerifyCell {
                            dist: base.dist,
                            theta,
                            alpha: alpha.value(),
                            target,
                            measure,
                            analytic: None,
                            estimate: None,
                            std_error: None,
                            z: None,
                            status: Outcome::Error,
                            error: None,
                        };
                        let analytic = compute_measure(&p, target, measure, alpha, &cfg.settings);
                        let empirical = empirical_measure(&sorted, measure, alpha);
                        cell.analytic = analytic.as_ref().ok().copied();
                        if let Ok(e) = &empirical {
                            cell.estimate = Some(e.estimate);
                            cell.std_error = Some(e.std_error);
                        }
                        match (analytic, empirical) {
                            (Ok(a), Ok(e)) => {
                                let z = e.z_score(a);
                                cell.z = Some(z);
                                cell.status = if z <= Z_LIMIT { Outcome::Pass } else { Outcome::Fail };
                            }
                            (Err(err), _) | (_, Err(err)) => {
                                cell.error = Some(format!("{}: {err}", err.kind()));
                            }
                        }
                        cells.push(cell);
                    }
                }
            }
        }
    }
    cells.sort_by(VerifyCell::key_cmp);
    let count = |o| cells.iter().filter(|c| c.status == o).count();
    Ok(VerifyReport {
        seed: cfg.seed,
        mc_n: cfg.mc_n,
        z_limit: Z_LIMIT,
        passed: count(Outcome::Pass),
        failed: count(Outcome::Fail),
        errors: count(Outcome::Error),
        cells,
    })
}
