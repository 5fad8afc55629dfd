//! Geometric convergence of `Phi_k` when the weights vanish eventually.

use zeck_ew::bounds::{fit_log_slope, phi_gap, phi_gap_sweep};
use zeck_ew::weights::WeightSequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid: Vec<f64> = (0..41).map(|i| -1.0 + 0.05 * i as f64).collect();
    let alpha = 0.5 * (1.0 + 5f64.sqrt());

    let w = WeightSequence::zero_after(5);
    let pts: Vec<(f64, f64)> = (5..=30)
        .map(|k| Ok((k as f64, phi_gap(&w, k, 120, &grid)?)))
        .collect::<zeck_ew::Result<_>>()?;
    for (k, gap) in pts.iter().step_by(5) {
        println!("depth {k:>2}: sup |Phi_k - Phi| = {gap:.3e}");
    }
    let slope = fit_log_slope(&pts).unwrap();
    println!("slope {slope:.5} per layer, -2 ln(alpha) = {:.5}", -2.0 * alpha.ln());

    // for the example family the gap follows the quadratic tail instead
    for row in phi_gap_sweep(&WeightSequence::example(), &[10, 20, 30, 40], 2000, &grid)? {
        println!("example k = {}: gap {:.4e}, T^2 tail {:.4e}, ratio {:.3}", row.k, row.gap, row.quadratic_tail, row.ratio.unwrap());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
