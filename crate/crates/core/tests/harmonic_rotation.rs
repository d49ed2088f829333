//! The harmonic Wigner flow is a rigid rotation of phase space at any time.

use std::f64::consts::PI;

use quasiprob::wigner::{
    gaussian_pure_wigner, harmonic_flow_preimage, wigner_evolve, GaussianState, PhaseSpaceGrid,
    PotentialSpec, WignerGrid,
};

#[test]
fn rotation_oracle_at_several_times() {
    let grid = PhaseSpaceGrid::centered(128, 16.0, 16.0, 1.0, 1.0).unwrap();
    let state = GaussianState { x_center: 1.5, p_center: -1.0, sigma_x: 0.3 };
    let w0 = gaussian_pure_wigner(grid, state).unwrap();
    let omega = 1.3;
    let v = PotentialSpec::Harmonic { mass: 1.0, omega };
    for t in [0.37, 1.0, PI / omega, 3.9] {
        let w = wigner_evolve(&w0, &v, t, 2e-3).unwrap();
        let exact = WignerGrid::from_fn(grid, |x, p| {
            let (x0, p0) = harmonic_flow_preimage(x, p, 1.0, omega, t);
            state.eval(x0, p0, grid.h)
        })
        .unwrap();
        let err = w.l2_distance(&exact).unwrap();
        assert!(err < 1e-3, "t = {t}: L² error {err}");
    }
}

#[test]
fn quartic_develops_negativity() {
    let grid = PhaseSpaceGrid::centered(128, 12.0, 16.0, 1.0, 1.0).unwrap();
    let w0 =
        gaussian_pure_wigner(grid, GaussianState { x_center: 1.5, p_center: 0.0, sigma_x: 0.3 }).unwrap();
    assert!(w0.min() >= 0.0);
    let w = wigner_evolve(&w0, &PotentialSpec::Quartic { beta: 0.5 }, 1.5, 1e-3).unwrap();
    println!("min w after t = 1.5 under quartic V: {}", w.min());
    assert!(w.min() < 0.0);
}
