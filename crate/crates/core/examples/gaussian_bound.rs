//! Information and amplitude bound of Gaussian densities: the width
//! `σ = h/(2√π)` is pure and saturates `max |f| ≤ √(2I)/h`.

use std::f64::consts::PI;

use quasiprob::continuum::{amplitude_bound_check, pure_state_residual, DensityGrid, GridParams};

fn main() -> quasiprob::Result<()> {
    let h = 1.0;
    let pure = h / (2.0 * PI.sqrt());
    let params = GridParams::centered(1024, 40.0 * pure, h)?;
    println!("  σ/σ_pure      I       max|f|/bound  bound ok   max pure residual");
    for scale in [0.5, 0.8, 1.0, 1.5, 3.0] {
        let f = DensityGrid::gaussian(params, 0.0, scale * pure)?;
        let bound = amplitude_bound_check(&f);
        let residual = pure_state_residual(&f).into_iter().fold(0.0f64, |m, r| m.max(r.abs()));
        println!(
            "{scale:8.2}  {:10.6}  {:12.6}  {:>8}  {:.3e}",
            f.information(),
            bound.ratio(),
            bound.satisfied,
            residual
        );
    }
    Ok(())
}
