//! Two pure three-colour bags whose single draws are perfectly anticorrelated
//! but whose pair statistics disagree.

use quasiprob::prob::{pair_outcome_probability, scalar_product, SignedProbVector};

fn main() -> quasiprob::Result<()> {
    let p = SignedProbVector::new(vec![2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0])?;
    let q = SignedProbVector::new(vec![-1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0])?;
    println!(
        "I(p) = {:.6}, I(q) = {:.6}, p·q = {:.1e}",
        p.information(),
        q.information(),
        scalar_product(&p, &q)?
    );

    let colors = ["R", "B", "G"];
    println!("\npair probabilities from bag q:");
    for (i, a) in colors.iter().enumerate() {
        let row: Vec<String> =
            (0..3).map(|j| format!("{:+.4}", pair_outcome_probability(&q, i, j).unwrap())).collect();
        println!("  {a}: {}", row.join("  "));
    }

    let rr_q = pair_outcome_probability(&q, 0, 0)?;
    let not_red_p = pair_outcome_probability(&p, 1, 1)? + pair_outcome_probability(&p, 2, 2)?;
    println!("\nProb_q(RR)        = {rr_q:.6}");
    println!("Prob_p(not R, not R) = {not_red_p:.6}");
    Ok(())
}
