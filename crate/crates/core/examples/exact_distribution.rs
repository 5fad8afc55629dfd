//! Exact laws of `f(n)`, Kolmogorov distances, concentration and the atomic dichotomy.

use num_bigint::BigUint;
use zeck_ew::distribution::{
    concentration, dichotomy_probe, dist_exact, dist_prefix, kolmogorov, stabilized_law,
    StabilizeOptions,
};
use zeck_ew::weights::WeightSequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let e = WeightSequence::example();
    let d20 = dist_exact(&e, 20)?;
    println!("F_(G_20): {} atoms, largest atom {:.2e}", d20.len(), d20.max_atom());
    println!("  Fourier check at t = 0.9: {:.6}", d20.fourier(0.9));

    let p = dist_prefix(&e, &BigUint::from(1_000_000u32))?;
    println!("F_(10^6): {} atoms", p.len());

    for k in [8, 12, 16] {
        println!("  kolmogorov(F_{k}, F_20) = {:.5}", kolmogorov(&dist_exact(&e, k)?, &d20));
    }
    for lambda in [1.0, 0.1, 0.01, 0.001] {
        println!("  Q(lambda = {lambda}) = {:.5}", concentration(&d20, lambda));
    }

    for (name, w) in [("example", e.clone()), ("zero-after 7", WeightSequence::zero_after(7))] {
        let r = dichotomy_probe(&w, 18)?;
        println!("{name}: {:?}, Q decay {:?}", r.verdict, r.q_decay.iter().map(|q| q.1).collect::<Vec<_>>());
    }

    let law = stabilized_law(
        &WeightSequence::zero_after(7),
        StabilizeOptions {
            eps: 1e-12,
            max_depth: 120,
            ..Default::default()
        },
    )?;
    println!(
        "zero-after 7 limit: {} atoms at depth {}, gap {:.1e}",
        law.dist.len(),
        law.depth,
        law.gap
    );

    let mut csv = Vec::new();
    dist_exact(&WeightSequence::zero_after(5), 6)?.write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
