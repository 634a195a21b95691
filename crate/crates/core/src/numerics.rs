//! Scalar root finding, adaptive quadrature and the closed-form tail
//! integrals shared by every measure in the crate.
//!
//! All target functions handled here are distribution functions, so the
//! solver is plain bisection.

// Negated comparisons such as `!(q >= 0.0)` deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Tolerances and limits for every root solve and quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Absolute tolerance on the abscissa of a root.
    pub abs_tol: f64,
    pub max_iter: usize,
    /// Factor applied to the step while searching for an upper bracket.
    pub bracket_growth: f64,
    /// Relative tolerance of the adaptive quadrature.
    pub quad_rel_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 200,
            bracket_growth: 2.0,
            quad_rel_tol: 1e-10,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(domain(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.max_iter < 1 {
            return Err(domain("max_iter must be at least 1"));
        }
        if !(self.bracket_growth > 1.0 && self.bracket_growth.is_finite()) {
            return Err(domain(format!(
                "bracket_growth must be > 1, got {}",
                self.bracket_growth
            )));
        }
        if !(self.quad_rel_tol > 0.0 && self.quad_rel_tol.is_finite()) {
            return Err(domain(format!("quad_rel_tol must be > 0, got {}", self.quad_rel_tol)));
        }
        Ok(())
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

fn eval_checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_nan() {
        Err(domain(format!("function returned NaN at x = {x}")))
    } else {
        Ok(y)
    }
}

/// Finds `x` in `[lo, hi]` with `f(x) = target` for a nondecreasing `f`.
///
/// Bisection on the bracket; the result is within `abs_tol` of the root, or
/// at the floating-point resolution of the bracket when that is coarser.
pub fn solve_increasing<F>(f: F, target: f64, lo: f64, hi: f64, settings: &SolverSettings) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    settings.validate()?;
    if !(lo <= hi) {
        return Err(domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let f_lo = eval_checked(&f, lo)?;
    let f_hi = eval_checked(&f, hi)?;
    if f_lo > target || f_hi < target {
        return Err(Error::BracketInvalid {
            lo,
            hi,
            f_lo,
            f_hi,
            target,
        });
    }
    if f_lo == target {
        return Ok(lo);
    }
    if f_hi == target {
        return Ok(hi);
    }

    let (mut a, mut b) = (lo, hi);
    for _ in 0..settings.max_iter {
        let mid = a + 0.5 * (b - a);
        if b - a <= settings.abs_tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let y = eval_checked(&f, mid)?;
        if y == target {
            return Ok(mid);
        }
        if y < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    if b - a <= settings.abs_tol {
        return Ok(a + 0.5 * (b - a));
    }
    Err(Error::NoConvergence {
        what: "bisection",
        limit: settings.max_iter,
    })
}

/// Searches upward from `lo` for a point where `f` reaches `target`.
///
/// The trial upper end is `lo + step`, with `step` starting at `max(lo, 1)`
/// and multiplied by `bracket_growth` after each miss.
pub fn expand_bracket<F>(f: F, target: f64, lo: f64, settings: &SolverSettings) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    settings.validate()?;
    let f_lo = eval_checked(&f, lo)?;
    if f_lo > target {
        return Err(Error::BracketInvalid {
            lo,
            hi: lo,
            f_lo,
            f_hi: f_lo,
            target,
        });
    }
    let mut step = lo.max(1.0);
    for _ in 0..settings.max_iter {
        let hi = lo + step;
        if !hi.is_finite() {
            break;
        }
        if eval_checked(&f, hi)? >= target {
            return Ok((lo, hi));
        }
        step *= settings.bracket_growth;
    }
    Err(Error::NoBracket {
        target,
        iterations: settings.max_iter,
    })
}

/// Bracket-and-solve for a CDF that starts at or below `target` at `lo`.
pub(crate) fn invert_cdf<F>(f: F, target: f64, lo: f64, settings: &SolverSettings) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (a, b) = expand_bracket(&f, target, lo, settings)?;
    solve_increasing(&f, target, a, b, settings)
}

/// `∫_q^∞ x λ e^{-λx} dx = q e^{-λq} + e^{-λq}/λ`.
pub fn exp_tail_integral(lambda: f64, q: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!("rate must be > 0, got {lambda}")));
    }
    if !(q >= 0.0) {
        return Err(domain(format!("lower limit must be >= 0, got {q}")));
    }
    Ok(exp_tail_unchecked(lambda, q))
}

#[inline]
pub(crate) fn exp_tail_unchecked(lambda: f64, q: f64) -> f64 {
    let e = (-lambda * q).exp();
    q * e + e / lambda
}

/// `∫_q^∞ x γ x0^γ x^{-γ-1} dx = γ x0^γ q^{1-γ} / (γ - 1)`.
pub fn pareto_tail_integral(x0: f64, gamma: f64, q: f64) -> Result<f64> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(domain(format!("scale must be > 0, got {x0}")));
    }
    if !(gamma > 1.0) {
        return Err(Error::DivergentTail { exponent: gamma });
    }
    if !(q >= x0) {
        return Err(domain(format!("lower limit {q} below scale {x0}")));
    }
    Ok(pareto_tail_unchecked(x0, gamma, q))
}

#[inline]
pub(crate) fn pareto_tail_unchecked(x0: f64, gamma: f64, q: f64) -> f64 {
    // γ x0^γ q^{1-γ} / (γ-1) written as γ q (x0/q)^γ / (γ-1) to avoid overflow.
    gamma * q * (x0 / q).powf(gamma) / (gamma - 1.0)
}

const INITIAL_PANELS: usize = 16;
const MAX_DEPTH: u32 = 48;
const MAX_EVALUATIONS: usize = 4_000_000;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature of `f` over the finite interval `[a, b]`.
pub fn quad_interval<F>(f: F, a: f64, b: f64, settings: &SolverSettings) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    settings.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("quad_interval needs finite limits"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return quad_interval(f, b, a, settings).map(|v| -v);
    }
    adaptive_simpson(&f, a, b, settings.quad_rel_tol)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let width = (b - a) / INITIAL_PANELS as f64;
    let evaluations = std::cell::Cell::new(0usize);
    let eval = |x: f64| -> Result<f64> {
        evaluations.set(evaluations.get() + 1);
        eval_checked(f, x)
    };

    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut coarse_abs = 0.0;
    let mut left = eval(a)?;
    for i in 0..INITIAL_PANELS {
        let pa = a + width * i as f64;
        let pb = if i + 1 == INITIAL_PANELS { b } else { pa + width };
        let pm = 0.5 * (pa + pb);
        let fm = eval(pm)?;
        let fb = eval(pb)?;
        let whole = simpson(pa, pb, left, fm, fb);
        coarse_abs += (pb - pa) / 6.0 * (left.abs() + 4.0 * fm.abs() + fb.abs());
        panels.push((pa, pb, left, fm, fb, whole));
        left = fb;
    }
    let abs_tol = rel_tol * coarse_abs.max(f64::MIN_POSITIVE);

    let mut stack: Vec<Panel> = panels
        .into_iter()
        .rev()
        .map(|(pa, pb, fa, fm, fb, whole)| Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole,
            tol: abs_tol / INITIAL_PANELS as f64,
            depth: 0,
        })
        .collect();

    let mut total = 0.0;
    let mut compensation = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let resolved = p.depth >= MAX_DEPTH || lm <= p.a || rm >= p.b;
        if diff.abs() <= 15.0 * p.tol || resolved {
            // Kahan summation keeps many tiny panels from eroding accuracy.
            let y = left + right + diff / 15.0 - compensation;
            let t = total + y;
            compensation = (t - total) - y;
            total = t;
        } else {
            if evaluations.get() > MAX_EVALUATIONS {
                return Err(Error::NoConvergence {
                    what: "adaptive quadrature",
                    limit: MAX_EVALUATIONS,
                });
            }
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol: 0.5 * p.tol,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol: 0.5 * p.tol,
                depth: p.depth + 1,
            });
        }
    }
    Ok(total)
}

/// `∫_lo^∞ f(x) dx` through `x = lo + t/(1-t)` on `t ∈ [0, 1)`.
pub fn quad_tail<F>(f: F, lo: f64, settings: &SolverSettings) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    settings.validate()?;
    if !lo.is_finite() {
        return Err(domain("quad_tail needs a finite lower limit"));
    }
    let g = |t: f64| -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let x = lo + t / s;
        if !x.is_finite() {
            return 0.0;
        }
        let y = f(x) / (s * s);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    adaptive_simpson(&g, 0.0, 1.0, settings.quad_rel_tol)
}
