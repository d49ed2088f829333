//! Maximum-entropy states of a three-faced die with a prescribed mean face
//! value, with and without negative probabilities.

use quasiprob::maxent::{
    equilibrium, max_mean, max_mean_nonnegative, Branch, Observable, ObservableConstraint,
};

fn main() -> quasiprob::Result<()> {
    let faces = Observable::new(vec![-1.0, 0.0, 1.0])?;

    println!("   m      p1        p2        p3        I     admissible");
    for k in 0..=12 {
        let m = k as f64 * 0.1;
        let s = equilibrium(&ObservableConstraint { observable: faces.clone(), mean: m })?;
        let p = s.p.entries();
        println!("{m:5.2} {:+.5} {:+.5} {:+.5} {:.5} {}", p[0], p[1], p[2], s.information, s.admissible);
    }

    let m_classical = max_mean_nonnegative(&faces, Branch::Upper)?;
    let m_signed = max_mean(&faces, Branch::Upper)?;
    let eq = |m| equilibrium(&ObservableConstraint { observable: faces.clone(), mean: m });
    println!("\nmost uneven nonnegative die: m = {m_classical:.6}, p = {:?}", eq(m_classical)?.p.entries());
    println!("most uneven signed die:      m = {m_signed:.6}, p = {:?}", eq(m_signed)?.p.entries());
    Ok(())
}
