//! Paired-block factorization: linear phase extraction and the quadratic remainder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeck_ew::charfn::block::{reconstruction_error, RemainderFit};
use zeck_ew::charfn::{block_decompose, paired_product, BlockDecomposition, GoldenFrame};
use zeck_ew::weights::WeightSequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let frame = GoldenFrame::new();
    let e = WeightSequence::example();

    let b = block_decompose(&frame, &e, 5, 0.8)?;
    println!("block 5 at t = 0.8: theta = {:.6}", b.theta);
    println!("  (B~)11 closed form deviation {:.1e}", (b.b_tilde.at(1, 1) - b.b11_closed_form(&frame)).norm());
    println!("  (R)11 = {:.3e}, closed form deviation {:.1e}", b.r.at(1, 1).norm(), (b.r.at(1, 1) - b.r11_closed_form()).norm());

    let pp = paired_product(&frame, &e, 2, 42, 0.6)?;
    println!(
        "blocks 2..=42: phase sum {:.6}, sum ||R_k||_A = {:.4}, t^2 sum V_k = {:.4}",
        pp.phase_sum, pp.remainder_norm_sum, pp.quadratic_tail
    );
    println!("  reconstruction error {:.1e}", reconstruction_error(&frame, &e, 2, 42, 0.6)?);

    // the remainder constants over random blocks
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut fit = RemainderFit::default();
    for _ in 0..10_000 {
        let t: f64 = rng.gen_range(-1.0..1.0);
        let (we, wo) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = BlockDecomposition::from_weights(&frame, rng.gen_range(1..100), t, we, wo);
        fit.observe(&frame, &b, we, wo);
    }
    println!(
        "fitted over {} blocks: |R11| <= {:.3} t^2 V, ||R||_A <= {:.3} (linear + quadratic)",
        fit.samples, fit.quadratic_constant, fit.adapted_constant
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
