//! Logical-entropy maximization with a fixed mean of one observable.
//!
//! Minimizing `F = Σ p_i² − λ Σ p_i + μ Σ p_i X_i` gives the stationary state
//! `p_i = (λ − μ X_i) / 2`. The multipliers follow from the 2×2 linear system
//!
//! ```text
//! n λ   − μ ΣX  = 2
//! λ ΣX  − μ ΣX² = 2m
//! ```
//!
//! Both multipliers are affine in the target mean `m`, so the information of
//! the equilibrium state is a quadratic `I(m) = A + 2Bm + Cm²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{SignedProbVector, CLASS_TOL};

/// Per-outcome values `X_i` of an observable. Must not be constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    values: Vec<f64>,
}

impl Observable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewOutcomes { min: 2, got: values.len() });
        }
        if let Some((idx, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { idx, value });
        }
        let obs = Self { values };
        let n = obs.len() as f64;
        let (s1, s2) = obs.moments();
        let scale = s2.max(1.0);
        if n * s2 - s1 * s1 <= 1e-14 * n * scale {
            return Err(Error::DegenerateConstraint(
                "observable is constant, so the mean constraint duplicates normalization".into(),
            ));
        }
        Ok(obs)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn moments(&self) -> (f64, f64) {
        let s1 = self.values.iter().sum();
        let s2 = self.values.iter().map(|x| x * x).sum();
        (s1, s2)
    }

    /// Multipliers `(λ, μ)` for target mean `m`.
    fn multipliers(&self, m: f64) -> (f64, f64) {
        let n = self.len() as f64;
        let (s1, s2) = self.moments();
        let det = s1 * s1 - n * s2;
        let lambda = (2.0 * m * s1 - 2.0 * s2) / det;
        let mu = (2.0 * n * m - 2.0 * s1) / det;
        (lambda, mu)
    }

    /// Coefficients `(a_i, b_i)` with `p_i(m) = a_i + b_i m`.
    fn affine_state(&self) -> Vec<(f64, f64)> {
        let (l0, mu0) = self.multipliers(0.0);
        let (l1, mu1) = self.multipliers(1.0);
        let (dl, dmu) = (l1 - l0, mu1 - mu0);
        self.values.iter().map(|&x| ((l0 - mu0 * x) / 2.0, (dl - dmu * x) / 2.0)).collect()
    }

    /// `(A, B, C)` with `I(m) = A + 2Bm + Cm²`.
    fn information_quadratic(&self) -> (f64, f64, f64) {
        self.affine_state()
            .iter()
            .fold((0.0, 0.0, 0.0), |(a, b, c), &(ai, bi)| (a + ai * ai, b + ai * bi, c + bi * bi))
    }
}

/// Target mean `m` for an [`Observable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableConstraint {
    pub observable: Observable,
    pub mean: f64,
}

impl ObservableConstraint {
    pub fn new(values: Vec<f64>, mean: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter(format!("target mean {mean}")));
        }
        Ok(Self { observable: Observable::new(values)?, mean })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub p: SignedProbVector,
    pub lambda: f64,
    pub mu: f64,
    pub information: f64,
    /// False when `information > 1`; the state is still returned.
    pub admissible: bool,
}

/// Stationary point of the constrained functional.
pub fn equilibrium(c: &ObservableConstraint) -> Result<EquilibriumSolution> {
    let (lambda, mu) = c.observable.multipliers(c.mean);
    let entries = c.observable.values().iter().map(|&x| (lambda - mu * x) / 2.0).collect();
    let p = SignedProbVector::new(entries)?;
    let information = p.information();
    Ok(EquilibriumSolution { p, lambda, mu, information, admissible: information <= 1.0 + CLASS_TOL })
}

/// Information of the equilibrium state, evaluated from the closed-form
/// quadratic in the target mean.
pub fn information_of_mean(c: &ObservableConstraint) -> Result<f64> {
    let (a, b, cc) = c.observable.information_quadratic();
    let m = c.mean;
    Ok(a + 2.0 * b * m + cc * m * m)
}

/// Which end of the feasible interval of means to report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[default]
    Upper,
    Lower,
}

/// Extreme mean for which the equilibrium state is still admissible (`I ≤ 1`),
/// i.e. a root of `I(m) = 1`.
pub fn max_mean(x: &Observable, branch: Branch) -> Result<f64> {
    let (a, b, c) = x.information_quadratic();
    let disc = b * b - c * (a - 1.0);
    if disc < 0.0 || c <= 0.0 {
        return Err(Error::NoSolution("information never reaches 1 for this observable".into()));
    }
    let root = disc.sqrt();
    Ok(match branch {
        Branch::Upper => (-b + root) / c,
        Branch::Lower => (-b - root) / c,
    })
}

/// Extreme mean for which every equilibrium probability is nonnegative.
pub fn max_mean_nonnegative(x: &Observable, branch: Branch) -> Result<f64> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (a, b) in x.affine_state() {
        if b > 0.0 {
            lo = lo.max(-a / b);
        } else if b < 0.0 {
            hi = hi.min(-a / b);
        } else if a < 0.0 {
            return Err(Error::NoSolution("no nonnegative equilibrium exists".into()));
        }
    }
    if lo > hi {
        return Err(Error::NoSolution("no nonnegative equilibrium exists".into()));
    }
    Ok(match branch {
        Branch::Upper => hi,
        Branch::Lower => lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn die(m: f64) -> ObservableConstraint {
        ObservableConstraint::new(vec![-1.0, 0.0, 1.0], m).unwrap()
    }

    #[test]
    fn die_multipliers() {
        for &m in &[-1.0, -0.3, 0.0, 0.5, 1.1] {
            let eq = equilibrium(&die(m)).unwrap();
            assert_abs_diff_eq!(eq.lambda, 2.0 / 3.0, epsilon = 1e-14);
            assert_abs_diff_eq!(eq.mu, -m, epsilon = 1e-14);
            let p = eq.p.entries();
            assert_abs_diff_eq!(p[0], 1.0 / 3.0 - m / 2.0, epsilon = 1e-14);
            assert_abs_diff_eq!(p[1], 1.0 / 3.0, epsilon = 1e-14);
            assert_abs_diff_eq!(p[2], 1.0 / 3.0 + m / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn die_uniform_and_pure() {
        let eq = equilibrium(&die(0.0)).unwrap();
        for &p in eq.p.entries() {
            assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-15);
        }
        let s3 = 3f64.sqrt();
        let eq = equilibrium(&die(2.0 / s3)).unwrap();
        let expect = [(1.0 - s3) / 3.0, 1.0 / 3.0, (1.0 + s3) / 3.0];
        for (p, e) in eq.p.entries().iter().zip(expect) {
            assert_abs_diff_eq!(*p, e, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(eq.information, 1.0, epsilon = 1e-14);
        assert!(eq.admissible);

        let eq = equilibrium(&die(1.5)).unwrap();
        assert!(!eq.admissible);
    }

    #[test]
    fn information_quadratic_die() {
        assert_abs_diff_eq!(information_of_mean(&die(0.0)).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(information_of_mean(&die(2.0 / 3.0)).unwrap(), 5.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(information_of_mean(&die(1.0)).unwrap(), 5.0 / 6.0, epsilon = 1e-15);
        for &m in &[-1.2, -0.4, 0.1, 0.9] {
            let direct = equilibrium(&die(m)).unwrap().information;
            assert_abs_diff_eq!(information_of_mean(&die(m)).unwrap(), direct, epsilon = 1e-14);
        }
    }

    #[test]
    fn die_extremes() {
        let x = Observable::new(vec![-1.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(max_mean(&x, Branch::Upper).unwrap(), 2.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(max_mean(&x, Branch::Lower).unwrap(), -2.0 / 3f64.sqrt(), epsilon = 1e-14);

        let hi = max_mean_nonnegative(&x, Branch::Upper).unwrap();
        assert_abs_diff_eq!(hi, 2.0 / 3.0, epsilon = 1e-15);
        let p = equilibrium(&die(hi)).unwrap().p;
        for (a, b) in p.entries().iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let lo = max_mean_nonnegative(&x, Branch::Lower).unwrap();
        assert_abs_diff_eq!(lo, -2.0 / 3.0, epsilon = 1e-15);
        let p = equilibrium(&die(lo)).unwrap().p;
        for (a, b) in p.entries().iter().zip([2.0 / 3.0, 1.0 / 3.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn two_outcomes_against_grid_search() {
        let x = Observable::new(vec![0.0, 1.0]).unwrap();
        let analytic = max_mean(&x, Branch::Upper).unwrap();
        // brute force: largest m on a fine grid whose equilibrium has I <= 1
        let mut best = f64::NEG_INFINITY;
        let steps = 2_000_000;
        for k in 0..=steps {
            let m = -1.0 + 3.0 * k as f64 / steps as f64;
            let c = ObservableConstraint::new(vec![0.0, 1.0], m).unwrap();
            if equilibrium(&c).unwrap().information <= 1.0 {
                best = best.max(m);
            }
        }
        assert!((analytic - best).abs() <= 3.0 / steps as f64);
        // bisection on the monotone upper branch pins the root tighter
        let info =
            |m: f64| information_of_mean(&ObservableConstraint::new(vec![0.0, 1.0], m).unwrap()).unwrap();
        let (mut a, mut b) = (0.5, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if info(mid) <= 1.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        assert_abs_diff_eq!(analytic, a, epsilon = 1e-8);
        assert_abs_diff_eq!(analytic, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn constant_observable_is_degenerate() {
        assert!(matches!(Observable::new(vec![2.0, 2.0, 2.0]), Err(Error::DegenerateConstraint(_))));
        assert!(ObservableConstraint::new(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn stationarity_general() {
        let c = ObservableConstraint::new(vec![0.3, -1.7, 2.2, 5.0, 0.0], 1.1).unwrap();
        let eq = equilibrium(&c).unwrap();
        for (p, x) in eq.p.entries().iter().zip(c.observable.values()) {
            assert_abs_diff_eq!(2.0 * p - eq.lambda + eq.mu * x, 0.0, epsilon = 1e-12);
        }
        let mean: f64 = eq.p.entries().iter().zip(c.observable.values()).map(|(p, x)| p * x).sum();
        assert_abs_diff_eq!(mean, 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.p.sum(), 1.0, epsilon = 1e-12);
    }
}
