//! Conservative evolution of a signed probability vector by an antisymmetric
//! zero-sum generator. Writes `rotation.csv`.

use std::fs::File;
use std::io::BufWriter;

use quasiprob::dynamics::{random_generator, rotation_generator3, trajectory};
use quasiprob::prob::{classify, SignedProbVector, CLASS_TOL};

fn main() -> quasiprob::Result<()> {
    let g = rotation_generator3();
    let p0 = SignedProbVector::basis(3, 0)?;
    let rec = trajectory(&p0, &g, 100.0, 0.5)?;
    for (t, p) in rec.times.iter().zip(&rec.states).step_by(20) {
        println!("t = {t:6.1}  p = {:+.6?}  {}", p.entries(), classify(p, CLASS_TOL));
    }
    println!(
        "max |Σp − 1| = {:.2e}, max |I − 1| = {:.2e}",
        rec.max_probability_drift(),
        rec.max_information_drift()
    );
    rec.write_csv(BufWriter::new(File::create("rotation.csv")?))?;

    let g5 = random_generator(5, 42)?;
    let p0 = SignedProbVector::new(vec![0.5, 0.3, 0.2, 0.1, -0.1])?;
    let rec = trajectory(&p0, &g5, 50.0, 1.0)?;
    println!(
        "\nrandom n = 5 generator: min entry over time = {:+.4}, max |I − I0| = {:.2e}",
        rec.states.iter().map(|p| p.min_entry()).fold(f64::INFINITY, f64::min),
        rec.max_information_drift()
    );
    Ok(())
}
