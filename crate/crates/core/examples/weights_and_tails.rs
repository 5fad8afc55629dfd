//! Weight families, additive evaluation and square-summable tails.

use std::collections::BTreeMap;
use std::io::Cursor;

use zeck_ew::bounds::example_asymptotics;
use zeck_ew::weights::WeightSequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let e = WeightSequence::example();
    println!("f(F_j) for j = 2..8:");
    for j in 2..=8 {
        println!("  j = {j}: {:+.6}", e.value(j));
    }
    println!("f(100) = {:.6}", e.eval_f(100));

    // square summable but not absolutely summable
    println!(
        "l1 partial sums: m = 1e2 -> {:.3}, m = 1e6 -> {:.3}",
        e.l1_partial(100),
        e.l1_partial(1_000_000)
    );
    for row in example_asymptotics(&e, &[1_000, 10_000, 100_000, 1_000_000])? {
        println!(
            "  m = {:>8}: tail = {:.6} (+/- {:.1e}), tail * ln m = {:.4}",
            row.m, row.tail, row.remainder, row.tail_log_m
        );
    }

    // split at |f| = 1/T
    let split = e.split_tail(2, 2.0)?;
    println!(
        "split past m = 2 at T = 2: big indices {:?}, linear {:.4}, quadratic {:.4}",
        split.big_indices, split.linear, split.quadratic
    );

    // weights from a file and from a named family
    let text = "# j value\n2 1.0\n5 -0.5\n9 2.0\n";
    let w = WeightSequence::from_reader(Cursor::new(text))?;
    println!("file weights: f(F_5) = {}, support ends at {:?}", w.value(5), w.support_end());
    let params = BTreeMap::from([("J".to_string(), 12.0)]);
    let z = WeightSequence::from_family("zero-after", &params)?;
    println!("zero-after J = 12 vanishes eventually: {}", z.eventually_vanishes());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
