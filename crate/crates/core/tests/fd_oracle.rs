//! Finite-dimensional evolution against a Taylor scaling-and-squaring
//! matrix exponential.

mod common;

use quasiprob::dynamics::{evolve, evolve_with, random_generator, rotation_generator3, GeneratorMatrix};
use quasiprob::prob::SignedProbVector;

fn oracle(g: &GeneratorMatrix, p: &[f64], t: f64) -> Vec<f64> {
    let d = g.to_dense();
    let n = g.n();
    let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| d[(i, j)] * g.rate() * t).collect()).collect();
    common::matvec(&common::expm_taylor(&a), p)
}

fn rel_err(got: &[f64], want: &[f64]) -> f64 {
    let diff: Vec<f64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    common::norm2(&diff) / common::norm2(want)
}

#[test]
fn random_generators_match_oracle() {
    for n in 2..=6 {
        for seed in 10..20 {
            let g = random_generator(n, seed).unwrap();
            let mut p = vec![0.0; n];
            p[0] = 1.0;
            let p0 = SignedProbVector::new(p.clone()).unwrap();
            for t in [1e-3, 0.5, 3.0, 25.0, 200.0] {
                let err = rel_err(evolve(&p0, &g, t).unwrap().entries(), &oracle(&g, &p, t));
                assert!(err < 1e-9, "n={n} seed={seed} t={t}: {err:e}");
            }
        }
    }
}

#[test]
fn rotation_generator_returns_after_full_turn() {
    let g = rotation_generator3();
    let p0 = SignedProbVector::basis(3, 0).unwrap();
    let turn = 2.0 * std::f64::consts::PI;
    let p = evolve(&p0, &g, turn).unwrap();
    assert!(common::max_abs_diff(p.entries(), p0.entries()) < 1e-10);
    let err = rel_err(evolve(&p0, &g, 1.234).unwrap().entries(), &oracle(&g, p0.entries(), 1.234));
    assert!(err < 1e-9);
}

#[test]
fn coarse_substeps_lose_accuracy() {
    let g = random_generator(4, 1).unwrap();
    let p0 = SignedProbVector::basis(4, 2).unwrap();
    let want = oracle(&g, p0.entries(), 5.0);
    let coarse = rel_err(evolve_with(&p0, &g, 5.0, 0.1).unwrap().entries(), &want);
    let fine = rel_err(evolve(&p0, &g, 5.0).unwrap().entries(), &want);
    assert!(fine < 1e-9);
    assert!(coarse > fine);
}
