//! Zeckendorf digits: encoding, decoding and the digit strings below `G_k`.

use num_bigint::BigUint;
use zeck_ew::numeration::{enumerate_range, fib, g, zeck_decode, zeck_encode, zeck_encode_u64, ZeckDigits};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for n in [0u64, 1, 4, 12, 100, 1_000_000] {
        let d = zeck_encode_u64(n);
        println!("{n:>8} -> F_j for j in {:?}", d.indices());
    }

    // arbitrary precision: F_1000 + F_998 + 7
    let big = fib(1000) + fib(998) + BigUint::from(7u32);
    let d = zeck_encode(&big);
    assert_eq!(zeck_decode(&d), big);
    println!("F_1000 + F_998 + 7 has digits {:?}", d.indices());

    // adjacent digits are rejected
    assert!(ZeckDigits::new(vec![3, 4]).is_err());

    // exactly G_k valid digit strings live in positions 2..=k+1
    for k in [5usize, 10, 20] {
        let count = enumerate_range(k).count();
        println!("k = {k:>2}: {count} strings, G_k = {}", g(k));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
