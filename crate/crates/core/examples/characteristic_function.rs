//! `Phi_k(t) = H_k(t) / G_k` by four independent routes and its stabilized limit.

use zeck_ew::charfn::{h_bruteforce, h_matrix, h_scalar, phi, phi_limit, phi_with, PhiMethod};
use zeck_ew::weights::WeightSequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let e = WeightSequence::example();
    let (k, t) = (18, 0.7);
    let b = h_bruteforce(&e, k, t)?;
    println!("H_{k}({t}): brute force {b:.6}");
    println!("  scalar recursion deviation {:.2e}", (h_scalar(&e, k, t) - b).norm());
    println!("  matrix product deviation   {:.2e}", (h_matrix(&e, k, t) - b).norm());

    let grid: Vec<f64> = (0..=8).map(|i| -1.0 + 0.25 * i as f64).collect();
    let base = phi(&e, 20, &grid);
    for method in [PhiMethod::MatrixProduct, PhiMethod::BlockFactored, PhiMethod::BruteForce] {
        let other = phi_with(&e, 20, &grid, method)?;
        println!("  {method}: max |difference| {:.2e}", base.max_abs_diff(&other));
    }

    // deep layers stay normalized
    let deep = phi(&e, 5000, &[0.0, 0.5, 1.0]);
    println!("Phi_5000 at t = 0, 0.5, 1: {:?}", deep.values);

    let zero_after = WeightSequence::zero_after(8);
    let lim = phi_limit(&zero_after, &grid, 1e-12, 200)?;
    println!(
        "zero-after 8: stable at depth {} (Cauchy gap {:.1e})",
        lim.profile.k, lim.gap
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
