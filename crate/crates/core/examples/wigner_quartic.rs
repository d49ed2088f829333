//! In an anharmonic well the Wigner evolution keeps `∫∫ w` and `∫∫ w²` but
//! changes `∫∫ w³`, and the state develops negative regions.

use std::f64::consts::PI;

use quasiprob::wigner::{
    gaussian_pure_wigner, GaussianState, PhaseSpaceGrid, PotentialSpec, SplitStepSolver, WignerDiagnostics,
    WignerGrid,
};

fn main() -> quasiprob::Result<()> {
    let grid = PhaseSpaceGrid::centered(128, 12.0, 16.0, 1.0, 1.0)?;
    let state = GaussianState { x_center: 1.5, p_center: 0.0, sigma_x: (1.0 / (4.0 * PI)).sqrt() };
    let w0 = gaussian_pure_wigner(grid, state)?;
    let mut solver = SplitStepSolver::new(grid, &PotentialSpec::Quartic { beta: 0.5 })?;
    let d0 = WignerDiagnostics::of(&w0, 0.0);

    let dt = 2e-3;
    let mut v = w0.values().to_vec();
    for k in 1..=10 {
        solver.run(&mut v, dt, 100);
        let w = WignerGrid::raw(grid, v.clone())?;
        let d = WignerDiagnostics::of(&w, k as f64 * 100.0 * dt);
        println!(
            "t = {:.1}  ΔΣw = {:+.1e}  ΔI = {:+.1e}  Δmoment3/moment3 = {:+.4}  min w = {:+.4}",
            d.t,
            d.sum - d0.sum,
            d.information - d0.information,
            (d.moment3 - d0.moment3) / d0.moment3,
            w.min()
        );
    }
    Ok(())
}
