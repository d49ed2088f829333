//! A phase-space state localized at `x = a` evolves in momentum exactly like
//! a density under the odd kernel built from `Ω = 2πV/h`. The two sides are
//! computed independently: quadrature plus matrix exponential against FFT
//! phase rotation.

use std::f64::consts::PI;
use std::sync::Arc;

use quasiprob::continuum::{build_kernel, evolve_density, DensityGrid, GridParams, Omega};
use quasiprob::wigner::{delta_localized_evolve, PotentialSpec};

fn main() -> quasiprob::Result<()> {
    let h = 1.0;
    let params = GridParams::centered(128, 16.0, h)?;
    let w0 = DensityGrid::gaussian(params, 0.5, 0.5)?;
    let potentials = [
        PotentialSpec::Linear { slope: 0.8 },
        PotentialSpec::Harmonic { mass: 1.0, omega: 1.0 },
        PotentialSpec::Quartic { beta: 0.25 },
    ];
    for v in potentials {
        for a in [-0.5, 0.0, 1.0] {
            let vc = v.clone();
            let omega = Omega::Custom(Arc::new(move |x| 2.0 * PI / h * vc.eval(x)));
            let kernel = build_kernel(omega, a, params)?;
            let mut worst = 0.0f64;
            for t in [0.5, 1.0, 2.0] {
                let spectral = evolve_density(&w0, &kernel, t)?;
                let delta = delta_localized_evolve(&w0, &v, a, t)?;
                let d = spectral
                    .values()
                    .iter()
                    .zip(delta.values())
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                worst = worst.max(d);
            }
            println!("{v:?}, a = {a:+.1}: max difference {worst:.2e}");
        }
    }
    Ok(())
}
