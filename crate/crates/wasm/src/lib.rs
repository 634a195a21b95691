//! Browser bindings for the demo page in `www/`.
//!
//! The exported `Portfolio` wraps a two-risk portfolio and offers three
//! operations: one measure, a θ sweep of VaR/CTE/MoT, and a Monte Carlo
//! scatter sample. The plain-Rust functions underneath are tested natively.

use copula_risk::mc_oracle::sample_pairs;
use copula_risk::{compute_report, Alpha, BivariatePortfolio, FgmCopula, Measure, Result, SolverSettings, Target};
use wasm_bindgen::prelude::*;

/// Largest scatter sample the page may request.
pub const MAX_SCATTER: usize = 200_000;

/// Rows of `[θ, VaR, CTE, MoT]`, flattened, for `steps + 1` evenly spaced θ in [−1, 1].
pub fn theta_curve(p: &BivariatePortfolio, target: Target, alpha: f64, steps: usize) -> Result<Vec<f64>> {
    let alpha = Alpha::new(alpha)?;
    let steps = steps.max(1);
    let settings = SolverSettings::default();
    let mut out = Vec::with_capacity(4 * (steps + 1));
    for i in 0..=steps {
        let theta = -1.0 + 2.0 * i as f64 / steps as f64;
        let r = compute_report(&p.with_copula(FgmCopula::new(theta)?), target, alpha, &settings)?;
        out.extend([theta, r.var, r.cte, r.mot]);
    }
    Ok(out)
}

pub fn single_measure(p: &BivariatePortfolio, target: Target, measure: Measure, alpha: f64) -> Result<f64> {
    let r = compute_report(p, target, Alpha::new(alpha)?, &SolverSettings::default())?;
    Ok(r.get(measure))
}

/// `n` pairs interleaved as `x1, x2, x1, x2, …`.
pub fn scatter(p: &BivariatePortfolio, n: usize, seed: u64) -> Result<Vec<f64>> {
    let batch = sample_pairs(p, n.min(MAX_SCATTER), seed)?;
    Ok(batch.pairs().flat_map(|(a, b)| [a, b]).collect())
}

fn js(e: copula_risk::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = Portfolio)]
pub struct JsPortfolio(BivariatePortfolio);

#[wasm_bindgen(js_class = Portfolio)]
impl JsPortfolio {
    pub fn exponential(l1: f64, l2: f64, theta: f64) -> std::result::Result<JsPortfolio, JsError> {
        BivariatePortfolio::exponential(l1, l2, theta)
            .map(JsPortfolio)
            .map_err(js)
    }

    pub fn pareto(x0: f64, g1: f64, g2: f64, theta: f64) -> std::result::Result<JsPortfolio, JsError> {
        BivariatePortfolio::pareto(x0, g1, g2, theta)
            .map(JsPortfolio)
            .map_err(js)
    }

    /// `target` is one of x1, x2, min, max, sum; `measure` one of var, cte, mot.
    pub fn measure(&self, target: &str, measure: &str, alpha: f64) -> std::result::Result<f64, JsError> {
        let target: Target = target.parse().map_err(js)?;
        let measure: Measure = measure.parse().map_err(js)?;
        single_measure(&self.0, target, measure, alpha).map_err(js)
    }

    #[wasm_bindgen(js_name = thetaCurve)]
    pub fn theta_curve(&self, target: &str, alpha: f64, steps: usize) -> std::result::Result<Vec<f64>, JsError> {
        let target: Target = target.parse().map_err(js)?;
        theta_curve(&self.0, target, alpha, steps).map_err(js)
    }

    /// Seeds above 2^53 lose precision in JavaScript numbers, so the seed is a u32.
    pub fn sample(&self, n: usize, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
        scatter(&self.0, n, u64::from(seed)).map_err(js)
    }
}
