//! Signed probability vectors and their logical entropy.
//!
//! A [`SignedProbVector`] is any real vector whose entries sum to one. Entries
//! may be negative. The information `I = Σ p_i²` is the squared Euclidean norm
//! of the vector and the logical entropy is `S_L = 1 − I`. The feasible states
//! of dimension `n` lie on the intersection of the hyperplane `Σ p_i = 1` with
//! the sphere of radius `R = √I`; states with `I ≤ 1` are admissible.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ p_i = 1` accepted at construction.
pub const SUM_TOL: f64 = 1e-9;

/// Default tolerance used by [`classify`] and admissibility checks.
pub const CLASS_TOL: f64 = 1e-9;

/// A real vector of length `n ≥ 2` with unit sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SignedProbVector {
    entries: Vec<f64>,
}

impl SignedProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(entries, SUM_TOL)
    }

    /// Like [`new`](Self::new) but accepts `|Σ p_i − 1| ≤ sum_tol`.
    pub fn with_tolerance(entries: Vec<f64>, sum_tol: f64) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::TooFewOutcomes { min: 2, got: entries.len() });
        }
        if let Some((idx, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { idx, value });
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > sum_tol {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { entries })
    }

    /// The uniform (maximum entropy) state `p_i = 1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewOutcomes { min: 2, got: n });
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    /// The certainty state with all weight on outcome `k`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::IndexOutOfRange { idx: k, n });
        }
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        Self::new(e)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn information(&self) -> f64 {
        self.entries.iter().map(|p| p * p).sum()
    }

    pub fn logical_entropy(&self) -> f64 {
        1.0 - self.information()
    }

    /// Euclidean norm `R = √I`.
    pub fn radius(&self) -> f64 {
        self.information().sqrt()
    }

    pub fn is_admissible(&self) -> bool {
        self.information() <= 1.0 + CLASS_TOL
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }
}

impl TryFrom<Vec<f64>> for SignedProbVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SignedProbVector> for Vec<f64> {
    fn from(p: SignedProbVector) -> Self {
        p.entries
    }
}

impl std::str::FromStr for SignedProbVector {
    type Err = Error;

    /// Parses a comma separated list such as `0.5,0.5` or a JSON array.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('[') {
            return Ok(serde_json::from_str(s)?);
        }
        let entries = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

/// Pure, mixed or inadmissible, judged by the information `I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateClass {
    Pure,
    Mixed,
    Inadmissible,
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StateClass::Pure => "Pure",
            StateClass::Mixed => "Mixed",
            StateClass::Inadmissible => "Inadmissible",
        };
        f.write_str(s)
    }
}

/// `S_L = 1 − Σ p_i²`.
pub fn logical_entropy(p: &SignedProbVector) -> f64 {
    p.logical_entropy()
}

/// `I = Σ p_i²`.
pub fn information(p: &SignedProbVector) -> f64 {
    p.information()
}

/// Shannon entropy in nats. Zero entries contribute nothing; negative entries
/// are a domain error.
pub fn shannon_entropy(p: &SignedProbVector) -> Result<f64> {
    if let Some((idx, &value)) = p.entries().iter().enumerate().find(|(_, &v)| v < 0.0) {
        return Err(Error::NegativeEntry { idx, value });
    }
    Ok(-p.entries().iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>())
}

fn check_dims(p: &SignedProbVector, q: &SignedProbVector) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    Ok(())
}

/// Euclidean distance between two states.
pub fn distance(p: &SignedProbVector, q: &SignedProbVector) -> Result<f64> {
    check_dims(p, q)?;
    Ok(p.entries().iter().zip(q.entries()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// `p · q = Σ p_i q_i`.
pub fn scalar_product(p: &SignedProbVector, q: &SignedProbVector) -> Result<f64> {
    check_dims(p, q)?;
    Ok(p.entries().iter().zip(q.entries()).map(|(a, b)| a * b).sum())
}

pub fn classify(p: &SignedProbVector, tol: f64) -> StateClass {
    let info = p.information();
    if info > 1.0 + tol {
        StateClass::Inadmissible
    } else if (info - 1.0).abs() <= tol {
        StateClass::Pure
    } else {
        StateClass::Mixed
    }
}

/// Radii of the feasibility sphere for dimension `n`.
///
/// For `R` between `r_min` and `r_pos` every feasible state is nonnegative;
/// above `r_pos` some feasible states carry negative entries. For `n = 2` no
/// admissible state has a negative entry and `negatives_possible` is false.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityRadii {
    pub n: usize,
    pub r_max: f64,
    pub r_pos: f64,
    pub r_min: f64,
    pub negatives_possible: bool,
}

pub fn feasibility_radii(n: usize) -> Result<FeasibilityRadii> {
    if n < 2 {
        return Err(Error::TooFewOutcomes { min: 2, got: n });
    }
    let nf = n as f64;
    Ok(FeasibilityRadii {
        n,
        r_max: 1.0,
        r_pos: 1.0 / (nf - 1.0).sqrt(),
        r_min: 1.0 / nf.sqrt(),
        negatives_possible: n >= 3,
    })
}

fn check_radius(r: f64, r_min: f64) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("radius {r}")));
    }
    if r > 1.0 + CLASS_TOL {
        return Err(Error::Inadmissible { information: r * r });
    }
    if r < r_min - CLASS_TOL {
        return Err(Error::NoSolution(format!("radius {r} is below the minimum {r_min}")));
    }
    Ok(())
}

/// The two intersection points of the line `p1 + p2 = 1` with the circle of
/// radius `r`. They coincide at `r = 1/√2`.
pub fn solve_n2(r: f64) -> Result<(SignedProbVector, SignedProbVector)> {
    check_radius(r, FRAC_1_SQRT_2)?;
    let s = (2.0 * r * r - 1.0).max(0.0).sqrt();
    let hi = (1.0 + s) / 2.0;
    let lo = (1.0 - s) / 2.0;
    Ok((SignedProbVector::new(vec![hi, lo])?, SignedProbVector::new(vec![lo, hi])?))
}

/// Orthonormal basis of the plane `Σ x_i = 0` in three dimensions used to
/// parametrize the feasibility circle.
pub const PLANE_BASIS_3: [[f64; 3]; 2] = [
    [FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0],
    [0.408_248_290_463_863, 0.408_248_290_463_863, -0.816_496_580_927_726],
];

/// Point at angle `theta` on the circle where the sphere of radius `r` meets
/// the plane `p1 + p2 + p3 = 1`.
pub fn solve_n3(r: f64, theta: f64) -> Result<SignedProbVector> {
    check_radius(r, 1.0 / 3f64.sqrt())?;
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("angle {theta}")));
    }
    let rho = (r * r - 1.0 / 3.0).max(0.0).sqrt();
    let (s, c) = theta.sin_cos();
    let [b1, b2] = PLANE_BASIS_3;
    let entries = (0..3).map(|i| 1.0 / 3.0 + rho * (c * b1[i] + s * b2[i])).collect();
    SignedProbVector::new(entries)
}

/// The `n` pure states with one entry `(2 − n)/n` and all others `2/n`.
/// They form an orthonormal basis of `R^n`.
pub fn negative_orthonormal_basis(n: usize) -> Result<Vec<SignedProbVector>> {
    if n < 3 {
        return Err(Error::TooFewOutcomes { min: 3, got: n });
    }
    let nf = n as f64;
    (0..n)
        .map(|k| {
            let mut e = vec![2.0 / nf; n];
            e[k] = (2.0 - nf) / nf;
            SignedProbVector::new(e)
        })
        .collect()
}

/// Probability of outcome `i` followed by outcome `j` in two independent
/// draws, `p_i p_j`.
pub fn pair_outcome_probability(p: &SignedProbVector, i: usize, j: usize) -> Result<f64> {
    let n = p.len();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { idx, n });
        }
    }
    Ok(p.entries()[i] * p.entries()[j])
}
