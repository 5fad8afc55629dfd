//! Smoothing, master and split bounds next to the Kolmogorov distance they control.

use zeck_ew::bounds::{
    convergence_experiment, fitted_constant, master_bound, smoothing_bound, split_bound,
    BoundContext, TSchedule,
};
use zeck_ew::numeration::g_u128;
use zeck_ew::weights::WeightSequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = BoundContext::new(&WeightSequence::example())?;
    println!(
        "stabilized law: depth {}, {} atoms, gap {:.4}",
        ctx.law().depth,
        ctx.law().dist.len(),
        ctx.law().gap
    );

    let n = g_u128(20).unwrap();
    let t = TSchedule::LogNSquared.value(n);
    for report in [
        smoothing_bound(&ctx, n, 4.0, None)?,
        master_bound(&ctx, n, t, None, None)?,
        split_bound(&ctx, n, 0.5, None)?,
    ] {
        println!("{}", serde_json::to_string(&report)?);
    }

    let rows = convergence_experiment(&ctx, &[10, 15, 20, 25], &[TSchedule::LogN, TSchedule::LogNSquared])?;
    println!("{:>3} {:>8} {:>10} {:>10} {:>8}", "k", "N", "lhs", "rhs", "T");
    for r in &rows {
        println!("{:>3} {:>8} {:>10.5} {:>10.5} {:>8.2}", r.k, r.n, r.lhs, r.best_rhs, r.best_t);
    }
    println!("fitted constant {:.4}", fitted_constant(&rows));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
