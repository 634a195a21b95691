//! Farlie–Gumbel–Morgenstern copula `C(u, v) = uv + θ uv (1-u)(1-v)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FgmCopula {
    theta: f64,
}

impl TryFrom<f64> for FgmCopula {
    type Error = crate::Error;
    fn try_from(theta: f64) -> Result<Self> {
        FgmCopula::new(theta)
    }
}

impl From<FgmCopula> for f64 {
    fn from(c: FgmCopula) -> f64 {
        c.theta
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("{name} = {x} outside [0, 1]")))
    }
}

impl FgmCopula {
    /// `θ` must lie in `[-1, 1]`; outside it the density turns negative.
    pub fn new(theta: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&theta) {
            Ok(Self { theta })
        } else {
            Err(domain(format!("FGM theta must lie in [-1, 1], got {theta}")))
        }
    }

    pub fn independence() -> Self {
        Self { theta: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn cdf(&self, u: f64, v: f64) -> Result<f64> {
        check_unit("u", u)?;
        check_unit("v", v)?;
        Ok(self.cdf_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn cdf_unchecked(&self, u: f64, v: f64) -> f64 {
        u * v * (1.0 + self.theta * (1.0 - u) * (1.0 - v))
    }

    pub fn density(&self, u: f64, v: f64) -> Result<f64> {
        check_unit("u", u)?;
        check_unit("v", v)?;
        Ok(self.density_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn density_unchecked(&self, u: f64, v: f64) -> f64 {
        1.0 + self.theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v)
    }

    /// `P(U > u, V > v) = 1 - u - v + C(u, v)`.
    pub fn survival(&self, u: f64, v: f64) -> Result<f64> {
        check_unit("u", u)?;
        check_unit("v", v)?;
        // Expanded as (1-u)(1-v)(1 + θuv) to avoid cancellation near u, v = 1.
        Ok((1.0 - u) * (1.0 - v) * (1.0 + self.theta * u * v))
    }

    /// `P(V ≤ v | U = u) = ∂C/∂u = v + θ v (1-v)(1-2u)`.
    pub fn conditional_cdf(&self, v: f64, given_u: f64) -> Result<f64> {
        check_unit("v", v)?;
        check_unit("given_u", given_u)?;
        Ok(self.conditional_cdf_unchecked(v, given_u))
    }

    #[inline]
    pub(crate) fn conditional_cdf_unchecked(&self, v: f64, u: f64) -> f64 {
        v * (1.0 + self.theta * (1.0 - v) * (1.0 - 2.0 * u))
    }

    /// Inverse of [`conditional_cdf`](Self::conditional_cdf) in `v`.
    ///
    /// With `a = θ(1-2u)` this is the root in `[0, 1]` of
    /// `a v² - (1+a) v + w = 0`, taken in the cancellation-free form
    /// `2w / ((1+a) + sqrt((1+a)² - 4aw))`.
    pub fn conditional_quantile(&self, w: f64, given_u: f64) -> Result<f64> {
        check_unit("w", w)?;
        check_unit("given_u", given_u)?;
        Ok(self.conditional_quantile_unchecked(w, given_u))
    }

    #[inline]
    pub(crate) fn conditional_quantile_unchecked(&self, w: f64, u: f64) -> f64 {
        let a = self.theta * (1.0 - 2.0 * u);
        if a == 0.0 || w == 0.0 {
            return w;
        }
        let b = 1.0 + a;
        let disc = (b * b - 4.0 * a * w).max(0.0);
        (2.0 * w / (b + disc.sqrt())).clamp(0.0, 1.0)
    }

    /// Probability of the rectangle `[u1, u2] × [v1, v2]`.
    pub fn rectangle_mass(&self, u1: f64, u2: f64, v1: f64, v2: f64) -> Result<f64> {
        for (name, x) in [("u1", u1), ("u2", u2), ("v1", v1), ("v2", v2)] {
            check_unit(name, x)?;
        }
        if u1 > u2 || v1 > v2 {
            return Err(domain(format!("rectangle [{u1}, {u2}] x [{v1}, {v2}] is not ordered")));
        }
        Ok(
            self.cdf_unchecked(u2, v2) - self.cdf_unchecked(u1, v2) - self.cdf_unchecked(u2, v1)
                + self.cdf_unchecked(u1, v1),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{quad_interval, solve_increasing, SolverSettings};
    use proptest::prelude::*;

    fn c(theta: f64) -> FgmCopula {
        FgmCopula::new(theta).unwrap()
    }

    const THETAS: [f64; 7] = [-1.0, -0.7, -0.3, 0.0, 0.4, 0.9, 1.0];

    #[test]
    fn theta_validated_at_construction() {
        assert!(FgmCopula::new(1.0001).is_err());
        assert!(FgmCopula::new(-1.5).is_err());
        assert!(FgmCopula::new(f64::NAN).is_err());
        assert!(FgmCopula::new(-1.0).is_ok());
    }

    #[test]
    fn cdf_examples() {
        assert!((c(0.0).cdf(0.3, 0.7).unwrap() - 0.21).abs() < 1e-15);
        assert_eq!(c(1.0).cdf(0.5, 0.5).unwrap(), 0.3125);
        assert_eq!(c(-0.4).cdf(1.0, 0.4).unwrap(), 0.4);
        assert!(c(0.5).cdf(1.2, 0.3).is_err());
    }

    #[test]
    fn boundary_axioms() {
        for &t in &THETAS {
            let cop = c(t);
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                assert_eq!(cop.cdf(x, 0.0).unwrap(), 0.0);
                assert_eq!(cop.cdf(0.0, x).unwrap(), 0.0);
                assert_eq!(cop.cdf(x, 1.0).unwrap(), x);
                assert_eq!(cop.cdf(1.0, x).unwrap(), x);
            }
        }
    }

    #[test]
    fn density_examples() {
        assert_eq!(c(0.0).density(0.2, 0.9).unwrap(), 1.0);
        assert_eq!(c(1.0).density(0.0, 0.0).unwrap(), 2.0);
        let cop = c(0.5);
        let (u, v, h) = (0.25, 0.75, 1e-4);
        let mixed = (cop.cdf(u + h, v + h).unwrap() - cop.cdf(u + h, v - h).unwrap() - cop.cdf(u - h, v + h).unwrap()
            + cop.cdf(u - h, v - h).unwrap())
            / (4.0 * h * h);
        assert!((mixed - 0.875).abs() < 1e-6);
        assert_eq!(cop.density(u, v).unwrap(), 0.875);
    }

    #[test]
    fn density_zero_only_at_corners_for_extreme_theta() {
        assert_eq!(c(1.0).density(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(c(1.0).density(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(c(-1.0).density(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(c(-1.0).density(1.0, 1.0).unwrap(), 0.0);
        assert!(c(1.0).density(0.1, 0.9).unwrap() > 0.0);
        assert!(c(0.99).density(1.0, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        let s = SolverSettings::default();
        for &t in &THETAS {
            let cop = c(t);
            let inner = |u: f64| quad_interval(|v| cop.density_unchecked(u, v), 0.0, 1.0, &s).unwrap();
            let total = quad_interval(inner, 0.0, 1.0, &s).unwrap();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn survival_examples() {
        assert!((c(0.0).survival(0.3, 0.7).unwrap() - 0.21).abs() < 1e-15);
        assert_eq!(c(0.3).survival(0.0, 0.0).unwrap(), 1.0);
        assert!((c(0.9).survival(0.5, 0.5).unwrap() - 0.30625).abs() < 1e-15);
        for &t in &THETAS {
            for &(u, v) in &[(0.1, 0.2), (0.5, 0.9), (0.77, 0.33)] {
                let direct = 1.0 - u - v + c(t).cdf(u, v).unwrap();
                assert!((c(t).survival(u, v).unwrap() - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conditional_cdf_examples() {
        assert_eq!(c(0.0).conditional_cdf(0.4, 0.9).unwrap(), 0.4);
        assert_eq!(c(0.6).conditional_cdf(1.0, 0.3).unwrap(), 1.0);
        assert_eq!(c(1.0).conditional_cdf(0.5, 0.0).unwrap(), 0.75);
    }

    #[test]
    fn conditional_quantile_examples() {
        assert_eq!(c(0.0).conditional_quantile(0.63, 0.2).unwrap(), 0.63);
        assert!((c(1.0).conditional_quantile(0.75, 0.0).unwrap() - 0.5).abs() < 1e-15);

        let cop = c(0.7);
        let oracle = solve_increasing(
            |v| cop.conditional_cdf(v, 0.8).unwrap(),
            0.3,
            0.0,
            1.0,
            &SolverSettings::default(),
        )
        .unwrap();
        let v = cop.conditional_quantile(0.3, 0.8).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((cop.conditional_cdf(v, 0.8).unwrap() - 0.3).abs() < 1e-14);
    }

    #[test]
    fn conditional_quantile_inverts_on_grid() {
        for &t in &THETAS {
            let cop = c(t);
            for i in 0..=40 {
                let u = i as f64 / 40.0;
                for j in 0..=40 {
                    let v = j as f64 / 40.0;
                    let w = cop.conditional_cdf(v, u).unwrap();
                    let back = cop.conditional_quantile(w, u).unwrap();
                    assert!((back - v).abs() < 1e-12, "θ={t} u={u} v={v}: {back}");
                }
            }
        }
    }

    #[test]
    fn conditional_cdf_is_marginally_consistent() {
        let s = SolverSettings::default();
        for &t in &THETAS {
            let cop = c(t);
            for &v in &[0.1, 0.35, 0.5, 0.8] {
                let avg = quad_interval(|u| cop.conditional_cdf(v, u).unwrap(), 0.0, 1.0, &s).unwrap();
                assert!((avg - v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rectangle_examples() {
        for &t in &THETAS {
            assert!((c(t).rectangle_mass(0.0, 1.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((c(0.0).rectangle_mass(0.2, 0.5, 0.1, 0.6).unwrap() - 0.15).abs() < 1e-15);
        let direct = c(-1.0).rectangle_mass(0.0, 0.5, 0.0, 0.5).unwrap();
        assert!((direct - 0.1875).abs() < 1e-15);
        let s = SolverSettings::default();
        let cop = c(-1.0);
        let numeric = quad_interval(
            |u| quad_interval(|v| cop.density_unchecked(u, v), 0.0, 0.5, &s).unwrap(),
            0.0,
            0.5,
            &s,
        )
        .unwrap();
        assert!((numeric - direct).abs() < 1e-10);
        assert!(c(0.5).rectangle_mass(0.6, 0.5, 0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn rectangle_mass_nonnegative(
            ti in 0usize..5,
            a in 0.0f64..=1.0, b in 0.0f64..=1.0,
            p in 0.0f64..=1.0, q in 0.0f64..=1.0,
        ) {
            let theta = [-1.0, -0.5, 0.0, 0.5, 1.0][ti];
            let (u1, u2) = if a <= b { (a, b) } else { (b, a) };
            let (v1, v2) = if p <= q { (p, q) } else { (q, p) };
            let m = c(theta).rectangle_mass(u1, u2, v1, v2).unwrap();
            prop_assert!(m >= -1e-15, "mass {}", m);
        }

        #[test]
        fn density_nonnegative(theta in -1.0f64..=1.0, u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
            prop_assert!(c(theta).density(u, v).unwrap() >= 0.0);
        }

        #[test]
        fn conditional_cdf_monotone_onto(theta in -1.0f64..=1.0, u in 0.0f64..=1.0, v in 0.0f64..1.0, dv in 0.0f64..0.5) {
            let cop = c(theta);
            let v2 = (v + dv).min(1.0);
            prop_assert!(cop.conditional_cdf(v2, u).unwrap() >= cop.conditional_cdf(v, u).unwrap() - 1e-15);
            prop_assert_eq!(cop.conditional_cdf(0.0, u).unwrap(), 0.0);
            prop_assert_eq!(cop.conditional_cdf(1.0, u).unwrap(), 1.0);
        }

        #[test]
        fn conditional_quantile_round_trip(theta in -1.0f64..=1.0, u in 0.0f64..=1.0, w in 0.0f64..=1.0) {
            let cop = c(theta);
            let v = cop.conditional_quantile(w, u).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!((cop.conditional_cdf(v, u).unwrap() - w).abs() < 1e-14);
        }
    }
}
