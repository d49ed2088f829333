//! Radii of the feasibility sphere and where negative entries first appear.

use std::f64::consts::PI;

use quasiprob::prob::{feasibility_radii, solve_n2, solve_n3};

fn main() -> quasiprob::Result<()> {
    for n in 2..=6 {
        let r = feasibility_radii(n)?;
        println!(
            "n = {n}: r_min = {:.6}  r_pos = {:.6}  r_max = {:.6}  negatives possible: {}",
            r.r_min, r.r_pos, r.r_max, r.negatives_possible
        );
    }

    let (a, b) = solve_n2(0.9)?;
    println!("\nn = 2, R = 0.9: {:?} and {:?}", a.entries(), b.entries());

    let r = feasibility_radii(3)?;
    println!("\nn = 3 circle, lowest entry over 720 angles:");
    for radius in [r.r_min, r.r_pos - 0.01, r.r_pos, r.r_pos + 0.01, 1.0] {
        let lowest = (0..720)
            .map(|k| solve_n3(radius, 2.0 * PI * k as f64 / 720.0).map(|p| p.min_entry()))
            .collect::<quasiprob::Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        println!("  R = {radius:.6}: {lowest:+.6}");
    }
    Ok(())
}
