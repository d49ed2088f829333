//! Rotations of signed probability vectors.
//!
//! The evolution `dp/dt = rate · M p` conserves both `Σ p_i` and `Σ p_i²` when
//! `M` is antisymmetric with vanishing row and column sums. Time stepping uses
//! the implicit midpoint rule, which for a linear skew system is the Cayley
//! transform `(I − G h/2)⁻¹ (I + G h/2)` and is exactly orthogonal.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::SignedProbVector;

/// Tolerance on row and column sums of a generator.
pub const ZERO_SUM_TOL: f64 = 1e-12;

/// Default bound on `‖G‖₁ · h` for a single implicit midpoint substep.
///
/// The phase error of one Cayley step is `O((‖G‖h)³)`, so at this size the
/// propagator agrees with `exp(tG)` to about `1e-13 · ‖G‖t`.
pub const DEFAULT_SUBSTEP_NORM: f64 = 1e-6;

/// Antisymmetric generator with zero row/column sums and a rate (1/time).
///
/// Only the strictly upper triangle is stored; the lower triangle is its
/// negation, so antisymmetry holds exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMatrix {
    n: usize,
    upper: Vec<f64>,
    rate: f64,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl GeneratorMatrix {
    /// Builds a generator from a dense row-major matrix, validating it.
    pub fn from_dense(n: usize, entries: &[f64], rate: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewOutcomes { min: 2, got: n });
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        if !rate.is_finite() {
            return Err(Error::InvalidParameter(format!("rate {rate}")));
        }
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidParameter(format!("diagonal entry ({i},{i}) must be zero")));
            }
            for j in i + 1..n {
                let a = entries[i * n + j];
                if !a.is_finite() || a != -entries[j * n + i] {
                    return Err(Error::InvalidParameter(format!(
                        "entries ({i},{j}) and ({j},{i}) are not antisymmetric"
                    )));
                }
                upper.push(a);
            }
        }
        let g = Self { n, upper, rate };
        for i in 0..n {
            let row: f64 = (0..n).map(|j| g.entry(i, j)).sum();
            if row.abs() > ZERO_SUM_TOL {
                return Err(Error::InvalidParameter(format!("row {i} sums to {row}, expected 0")));
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.0,
            Less => self.upper[upper_index(self.n, i, j)],
            Greater => -self.upper[upper_index(self.n, j, i)],
        }
    }

    /// `M` as a dense matrix (without the rate).
    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j))
    }

    /// `M p` (without the rate).
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch(p.len(), self.n));
        }
        Ok((0..self.n).map(|i| (0..self.n).map(|j| self.entry(i, j) * p[j]).sum()).collect())
    }

    /// Implicit midpoint propagator for total time `t`.
    ///
    /// The interval is split into `2^k` substeps with `‖G‖₁ t / 2^k` at most
    /// `substep_norm`. The one-substep Cayley matrix is held as `E = C − I`
    /// and squared `k` times via `E ← 2E + E²`, which equals applying the
    /// substep `2^k` times without accumulating per-step round-off.
    pub fn propagator(&self, t: f64, substep_norm: f64) -> Result<DMatrix<f64>> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time {t}")));
        }
        if !(substep_norm > 0.0) {
            return Err(Error::InvalidParameter(format!("substep norm {substep_norm}")));
        }
        let n = self.n;
        let g = self.to_dense() * (self.rate * t);
        let norm = g.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
        let mut k = 0u32;
        while norm / 2f64.powi(k as i32) > substep_norm && k < 1000 {
            k += 1;
        }
        let h = g / 2f64.powi(k as i32);
        let id = DMatrix::<f64>::identity(n, n);
        let lhs = &id - &h * 0.5;
        let mut e =
            lhs.lu().solve(&h).ok_or_else(|| Error::InvalidParameter("singular Cayley system".into()))?;
        for _ in 0..k {
            e = &e * 2.0 + &e * &e;
        }
        Ok(id + e)
    }
}

/// The 3×3 generator of a unit-speed rotation about `(1,1,1)/√3`:
/// `M = (0 −1 1; 1 0 −1; −1 1 0)` with rate `√3/3`.
pub fn rotation_generator3() -> GeneratorMatrix {
    GeneratorMatrix { n: 3, upper: vec![-1.0, 1.0, -1.0], rate: 3f64.sqrt() / 3.0 }
}

/// Random zero-sum generator `P A P` with `P = I − 11ᵀ/n`.
///
/// The strict upper triangle of `A` is drawn row by row from `ChaCha8Rng`
/// seeded with `seed`, uniform on `[−1, 1)`. The rate is 1.
pub fn random_generator(n: usize, seed: u64) -> Result<GeneratorMatrix> {
    if n < 2 {
        return Err(Error::TooFewOutcomes { min: 2, got: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let x: f64 = rng.gen_range(-1.0..1.0);
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    let p = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let m = &p * a * &p;
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            upper.push(0.5 * (m[(i, j)] - m[(j, i)]));
        }
    }
    Ok(GeneratorMatrix { n, upper, rate: 1.0 })
}

fn check_state(p0: &SignedProbVector, g: &GeneratorMatrix) -> Result<()> {
    if p0.len() != g.n() {
        return Err(Error::DimensionMismatch(p0.len(), g.n()));
    }
    Ok(())
}

/// `exp(t · rate · M) p0` via implicit midpoint substeps.
pub fn evolve(p0: &SignedProbVector, g: &GeneratorMatrix, t: f64) -> Result<SignedProbVector> {
    evolve_with(p0, g, t, DEFAULT_SUBSTEP_NORM)
}

pub fn evolve_with(
    p0: &SignedProbVector,
    g: &GeneratorMatrix,
    t: f64,
    substep_norm: f64,
) -> Result<SignedProbVector> {
    check_state(p0, g)?;
    let u = g.propagator(t, substep_norm)?;
    let p = u * DVector::from_column_slice(p0.entries());
    SignedProbVector::new(p.iter().copied().collect())
}

/// A single implicit midpoint step of size `h`.
pub fn cayley_step(p: &SignedProbVector, g: &GeneratorMatrix, h: f64) -> Result<SignedProbVector> {
    check_state(p, g)?;
    let n = g.n();
    let gh = g.to_dense() * (g.rate() * h * 0.5);
    let id = DMatrix::<f64>::identity(n, n);
    let x = DVector::from_column_slice(p.entries());
    let rhs = (&id + &gh) * &x;
    let next = (&id - &gh)
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidParameter("singular Cayley system".into()))?;
    SignedProbVector::new(next.iter().copied().collect())
}

/// Sampled evolution with conservation drifts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<SignedProbVector>,
    /// `|Σp(t) − 1|`
    pub probability_drift: Vec<f64>,
    /// `|I(t) − I(0)|`
    pub information_drift: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn max_probability_drift(&self) -> f64 {
        self.probability_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_information_drift(&self) -> f64 {
        self.information_drift.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with columns `t, p_0..p_{n−1}, sum_drift, info_drift` at 15
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.states.first().map_or(0, |s| s.len());
        let mut header = vec!["t".to_string()];
        header.extend((0..n).map(|i| format!("p_{i}")));
        header.push("sum_drift".into());
        header.push("info_drift".into());
        writeln!(w, "{}", header.join(","))?;
        for (k, s) in self.states.iter().enumerate() {
            let mut row = vec![crate::io::fmt15(self.times[k])];
            row.extend(s.entries().iter().map(|&x| crate::io::fmt15(x)));
            row.push(crate::io::fmt15(self.probability_drift[k]));
            row.push(crate::io::fmt15(self.information_drift[k]));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Samples `evolve(p0, g, k·dt)` for `k·dt ≤ t_end`.
///
/// Every sample is propagated directly from `p0`, so round-off does not
/// accumulate along the trajectory.
pub fn trajectory(
    p0: &SignedProbVector,
    g: &GeneratorMatrix,
    t_end: f64,
    dt: f64,
) -> Result<TrajectoryRecord> {
    trajectory_with(p0, g, t_end, dt, DEFAULT_SUBSTEP_NORM)
}

pub fn trajectory_with(
    p0: &SignedProbVector,
    g: &GeneratorMatrix,
    t_end: f64,
    dt: f64,
    substep_norm: f64,
) -> Result<TrajectoryRecord> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("sample spacing dt = {dt} must be positive")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} must be nonnegative")));
    }
    check_state(p0, g)?;
    let samples = (t_end / dt * (1.0 + 1e-12)).floor() as usize;
    let i0 = p0.information();
    let mut rec = TrajectoryRecord {
        times: Vec::with_capacity(samples + 1),
        states: Vec::with_capacity(samples + 1),
        probability_drift: Vec::with_capacity(samples + 1),
        information_drift: Vec::with_capacity(samples + 1),
    };
    for k in 0..=samples {
        let t = k as f64 * dt;
        let p = evolve_with(p0, g, t, substep_norm)?;
        rec.probability_drift.push((p.sum() - 1.0).abs());
        rec.information_drift.push((p.information() - i0).abs());
        rec.times.push(t);
        rec.states.push(p);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{classify, StateClass, CLASS_TOL};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn rotation_generator_structure() {
        let g = rotation_generator3();
        let d = g.to_dense();
        for i in 0..3 {
            assert_eq!(d.row(i).sum(), 0.0);
            assert_eq!(d.column(i).sum(), 0.0);
            for j in 0..3 {
                assert_eq!(d[(i, j)], -d[(j, i)]);
            }
        }
        assert_eq!(d[(0, 1)], -1.0);
        assert_eq!(d[(0, 2)], 1.0);
        assert_eq!(d[(1, 2)], -1.0);
        assert_abs_diff_eq!(g.rate(), 3f64.sqrt() / 3.0);
        let third = 1.0 / 3.0;
        assert_eq!(g.apply(&[third; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn from_dense_validation() {
        let ok = [0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0];
        assert_eq!(GeneratorMatrix::from_dense(3, &ok, 1.0).unwrap().entry(2, 0), -1.0);
        let not_skew = [0.0, 1.0, 1.0, 0.0];
        assert!(GeneratorMatrix::from_dense(2, &not_skew, 1.0).is_err());
        let nonzero_sum = [0.0, 1.0, -1.0, 0.0];
        assert!(GeneratorMatrix::from_dense(2, &nonzero_sum, 1.0).is_err());
        assert!(GeneratorMatrix::from_dense(3, &ok[..4], 1.0).is_err());
    }

    #[test]
    fn random_generator_properties() {
        for n in 2..10 {
            let g = random_generator(n, 7).unwrap();
            let d = g.to_dense();
            for i in 0..n {
                assert!(d.row(i).sum().abs() < 1e-12);
                assert!(d.column(i).sum().abs() < 1e-12);
            }
            assert_eq!(g, random_generator(n, 7).unwrap());
        }
        // zero-sum antisymmetric 3x3 matrices form a one-dimensional space
        let g = random_generator(3, 42).unwrap();
        let m = rotation_generator3().to_dense();
        let scale = g.entry(0, 1) / m[(0, 1)];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(g.entry(i, j), scale * m[(i, j)], epsilon = 1e-14);
            }
        }
        assert_ne!(random_generator(4, 1).unwrap(), random_generator(4, 2).unwrap());
        assert!(random_generator(1, 0).is_err());
    }

    #[test]
    fn evolve_identities() {
        let g = rotation_generator3();
        let p0 = SignedProbVector::basis(3, 0).unwrap();
        assert_eq!(evolve(&p0, &g, 0.0).unwrap(), p0);
        let u = SignedProbVector::uniform(3).unwrap();
        let ut = evolve(&u, &g, 12.3).unwrap();
        for &x in ut.entries() {
            assert_abs_diff_eq!(x, 1.0 / 3.0, epsilon = 1e-15);
        }
        let back = evolve(&p0, &g, 2.0 * PI).unwrap();
        for (a, b) in back.entries().iter().zip(p0.entries()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        let wrong = SignedProbVector::uniform(4).unwrap();
        assert!(matches!(evolve(&wrong, &g, 1.0), Err(Error::DimensionMismatch(4, 3))));
    }

    #[test]
    fn single_cayley_step_is_orthogonal() {
        let g = random_generator(5, 3).unwrap();
        let p = negative_state(5);
        let q = cayley_step(&p, &g, 0.3).unwrap();
        assert_abs_diff_eq!(q.information(), p.information(), epsilon = 1e-14);
        assert_abs_diff_eq!(q.sum(), 1.0, epsilon = 1e-14);
    }

    fn negative_state(n: usize) -> SignedProbVector {
        crate::prob::negative_orthonormal_basis(n).unwrap().remove(0)
    }

    #[test]
    fn trajectory_basics() {
        let g = rotation_generator3();
        let p0 = SignedProbVector::basis(3, 0).unwrap();
        let rec = trajectory(&p0, &g, 1.0, 0.25).unwrap();
        assert_eq!(rec.times.len(), 5);
        assert_eq!(rec.states[1], evolve(&p0, &g, 0.25).unwrap());
        assert!(trajectory(&p0, &g, 1.0, 0.0).is_err());
        assert!(trajectory(&p0, &g, 1.0, -1.0).is_err());

        let rec = trajectory(&p0, &g, 100.0, 0.5).unwrap();
        assert!(rec.max_probability_drift() < 1e-12);

        let g8 = random_generator(8, 11).unwrap();
        let p8 = negative_state(8);
        let rec = trajectory(&p8, &g8, 100.0, 1.0).unwrap();
        assert!(rec.max_information_drift() < 1e-10);
        assert!(rec.states.iter().all(|s| classify(s, CLASS_TOL) == StateClass::Pure));
    }

    #[test]
    fn trajectory_csv_shape() {
        let g = rotation_generator3();
        let p0 = SignedProbVector::basis(3, 0).unwrap();
        let rec = trajectory(&p0, &g, 1.0, 0.5).unwrap();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,p_0,p_1,p_2,sum_drift,info_drift");
        assert_eq!(lines.count(), 3);
    }
}
