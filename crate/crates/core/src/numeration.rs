//! Fibonacci numbers and Zeckendorf digit sets.
//!
//! Digits are indexed as in `n = sum_{j>=2} eps_j F_j` with `F_0 = 0`,
//! `F_1 = 1`. An integer `n < G_k = F_{k+2}` uses the digit positions
//! `2..=k+1`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Append-only table of Fibonacci numbers `F_0, F_1, ...`.
#[derive(Debug, Clone)]
pub struct FibTable {
    values: Vec<BigUint>,
}

impl Default for FibTable {
    fn default() -> Self {
        Self::new()
    }
}

impl FibTable {
    pub fn new() -> Self {
        FibTable {
            values: vec![BigUint::zero(), BigUint::from(1u32)],
        }
    }

    /// Table holding at least `F_0..=F_capacity`.
    pub fn with_capacity(capacity: usize) -> Self {
        let mut table = Self::new();
        table.extend_to(capacity);
        table
    }

    /// Largest index currently stored.
    pub fn capacity(&self) -> usize {
        self.values.len() - 1
    }

    pub fn extend_to(&mut self, j: usize) {
        while self.values.len() <= j {
            let n = self.values.len();
            let next = &self.values[n - 1] + &self.values[n - 2];
            self.values.push(next);
        }
    }

    /// `F_j` if already present.
    pub fn get(&self, j: usize) -> Option<&BigUint> {
        self.values.get(j)
    }

    /// Largest index `j >= 2` with `F_j <= n`, extending the table as needed.
    /// Returns `None` for `n == 0`.
    fn largest_index_at_most(&mut self, n: &BigUint) -> Option<usize> {
        if n.is_zero() {
            return None;
        }
        while self.values.last().unwrap() <= n {
            let cap = self.capacity();
            self.extend_to(cap + 1);
        }
        // values[cap] > n >= 1 so the search result is at least 2
        let idx = self.values.partition_point(|v| v <= n);
        Some((idx - 1).max(2))
    }
}

fn global_table() -> &'static RwLock<FibTable> {
    static TABLE: OnceLock<RwLock<FibTable>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(FibTable::with_capacity(96)))
}

/// `F_j`, from a process-wide table that is extended on demand.
pub fn fib(j: usize) -> BigUint {
    {
        let table = global_table().read().expect("fibonacci table poisoned");
        if let Some(v) = table.get(j) {
            return v.clone();
        }
    }
    let mut table = global_table().write().expect("fibonacci table poisoned");
    table.extend_to(j);
    table.get(j).unwrap().clone()
}

/// `G_k = F_{k+2}`, the number of integers with at most `k` Zeckendorf digits.
pub fn g(k: usize) -> BigUint {
    fib(k + 2)
}

/// `G_k` as a float (saturates to infinity for very large `k`).
pub fn g_f64(k: usize) -> f64 {
    g(k).to_f64().unwrap_or(f64::INFINITY)
}

/// `G_k` as `u128` when it fits (`k <= 182`).
pub fn g_u128(k: usize) -> Option<u128> {
    g(k).to_u128()
}

/// Sorted set of Zeckendorf digit positions `j >= 2` with `eps_j = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ZeckDigits {
    indices: Vec<u32>,
}

impl ZeckDigits {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates and wraps ascending digit positions.
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        for (i, &j) in indices.iter().enumerate() {
            if j < 2 {
                return Err(Error::IndexBelowTwo(j as u64));
            }
            if i > 0 {
                let prev = indices[i - 1];
                if j <= prev {
                    return Err(Error::UnsortedDigits(j, prev));
                }
                if j == prev + 1 {
                    return Err(Error::AdjacentDigits(prev, j));
                }
            }
        }
        Ok(ZeckDigits { indices })
    }

    /// Accepts positions in any order.
    pub fn from_unsorted(mut indices: Vec<u32>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices)
    }

    /// Ascending digit positions.
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Highest digit position, if any.
    pub fn top(&self) -> Option<u32> {
        self.indices.last().copied()
    }
}

/// Greedy Zeckendorf expansion of `n`.
pub fn zeck_encode(n: &BigUint) -> ZeckDigits {
    let mut rest = n.clone();
    let mut out = Vec::new();
    let mut table = global_table().write().expect("fibonacci table poisoned");
    while let Some(j) = table.largest_index_at_most(&rest) {
        rest -= table.get(j).unwrap();
        out.push(j as u32);
    }
    out.reverse();
    ZeckDigits { indices: out }
}

/// Machine-word variant of [`zeck_encode`].
pub fn zeck_encode_u64(n: u64) -> ZeckDigits {
    let fibs = small_fibs();
    let mut rest = n;
    let mut out = Vec::new();
    while rest > 0 {
        let j = fibs.partition_point(|&v| v <= rest) - 1;
        rest -= fibs[j];
        out.push(j as u32);
    }
    out.reverse();
    ZeckDigits { indices: out }
}

/// `F_0..=F_93`, every Fibonacci number representable in `u64`.
pub(crate) fn small_fibs() -> &'static [u64] {
    static FIBS: OnceLock<Vec<u64>> = OnceLock::new();
    FIBS.get_or_init(|| {
        let mut v: Vec<u64> = vec![0, 1];
        while let Some(next) = v[v.len() - 1].checked_add(v[v.len() - 2]) {
            v.push(next);
        }
        v
    })
}

/// `sum_{j in d} F_j`.
pub fn zeck_decode(d: &ZeckDigits) -> BigUint {
    let mut total = BigUint::zero();
    for &j in d.indices() {
        total += fib(j as usize);
    }
    total
}

/// Decodes an arbitrary index list, rejecting invalid digit sets.
pub fn zeck_decode_indices(indices: &[u32]) -> Result<BigUint> {
    let d = ZeckDigits::new(indices.to_vec())?;
    Ok(zeck_decode(&d))
}

/// Digit sets of every `n` in `[0, G_k)`, in increasing order of `n`.
pub fn enumerate_range(k: usize) -> RangeDigits {
    RangeDigits {
        bits: vec![false; k],
        started: false,
        done: false,
    }
}

/// Iterator returned by [`enumerate_range`].
///
/// `bits[i]` is the digit at position `i + 2`. Zeckendorf order agrees with
/// lexicographic order read from the top, so the successor sets the lowest
/// position whose upper neighbour is clear and clears everything below it.
#[derive(Debug, Clone)]
pub struct RangeDigits {
    bits: Vec<bool>,
    started: bool,
    done: bool,
}

impl RangeDigits {
    fn current(&self) -> ZeckDigits {
        let indices = self
            .bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32 + 2)
            .collect();
        ZeckDigits { indices }
    }

    fn advance(&mut self) -> bool {
        let k = self.bits.len();
        for i in 0..k {
            if self.bits[i] {
                continue;
            }
            let upper_clear = i + 1 >= k || !self.bits[i + 1];
            if upper_clear {
                self.bits[i] = true;
                for b in &mut self.bits[..i] {
                    *b = false;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for RangeDigits {
    type Item = ZeckDigits;

    fn next(&mut self) -> Option<ZeckDigits> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current());
        }
        if self.advance() {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn fib_values() {
        assert_eq!(fib(0), big(0));
        assert_eq!(fib(1), big(1));
        assert_eq!(fib(2), big(1));
        // iterate the recurrence independently
        let (mut a, mut b) = (0u64, 1u64);
        for _ in 0..10 {
            let c = a + b;
            a = b;
            b = c;
        }
        assert_eq!(a, 55);
        assert_eq!(fib(10), big(55));
    }

    #[test]
    fn g_values() {
        assert_eq!(g(0), big(1));
        assert_eq!(g(3), big(5));
        assert_eq!(g(8), big(55));
        assert_eq!(g_u128(10), Some(144));
    }

    #[test]
    fn fib_table_recurrence_and_growth() {
        let t = FibTable::with_capacity(300);
        for j in 1..300 {
            assert_eq!(t.get(j + 1).unwrap(), &(t.get(j).unwrap() + t.get(j - 1).unwrap()));
        }
        for j in 2..300 {
            assert!(t.get(j + 1).unwrap() > t.get(j).unwrap());
        }
        // thousands of layers are representable
        assert!(fib(5000).bits() > 3400);
    }

    #[test]
    fn encode_examples() {
        assert!(zeck_encode(&big(0)).is_empty());
        assert_eq!(zeck_encode(&big(4)).indices(), &[2, 4]);
        assert_eq!(zeck_encode(&big(100)).indices(), &[4, 6, 11]);
        assert_eq!(zeck_encode_u64(100).indices(), &[4, 6, 11]);
        assert_eq!(zeck_encode_u64(1).indices(), &[2]);
    }

    #[test]
    fn decode_examples() {
        assert_eq!(zeck_decode(&ZeckDigits::empty()), big(0));
        assert_eq!(zeck_decode_indices(&[2]).unwrap(), big(1));
        assert_eq!(zeck_decode_indices(&[4, 6, 11]).unwrap(), big(100));
        assert_eq!(
            ZeckDigits::from_unsorted(vec![11, 6, 4]).unwrap().indices(),
            &[4, 6, 11]
        );
    }

    #[test]
    fn decode_rejects_invalid_sets() {
        assert_eq!(
            zeck_decode_indices(&[3, 4]),
            Err(Error::AdjacentDigits(3, 4))
        );
        assert_eq!(zeck_decode_indices(&[1]), Err(Error::IndexBelowTwo(1)));
        assert!(matches!(
            zeck_decode_indices(&[6, 4]),
            Err(Error::UnsortedDigits(4, 6))
        ));
    }

    #[test]
    fn round_trip_below_a_million() {
        for n in 0..1_000_000u64 {
            let d = zeck_encode_u64(n);
            let back: u64 = d.indices().iter().map(|&j| small_fibs()[j as usize]).sum();
            assert_eq!(back, n);
        }
        for n in (0..1_000_000u64).step_by(997) {
            assert_eq!(zeck_decode(&zeck_encode(&big(n))), big(n));
            assert_eq!(zeck_encode(&big(n)), zeck_encode_u64(n));
        }
    }

    #[test]
    fn encoding_is_the_unique_valid_set() {
        // every subset of positions 2..=13 without adjacent ones, decoded
        let g12 = g_u128(12).unwrap() as u64;
        let positions: Vec<u32> = (2..=13).collect();
        let mut seen = vec![0u32; g12 as usize];
        for mask in 0u32..(1 << positions.len()) {
            if mask & (mask >> 1) != 0 {
                continue;
            }
            let idx: Vec<u32> = positions
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &j)| j)
                .collect();
            let n = zeck_decode_indices(&idx).unwrap().to_u64().unwrap();
            assert!(n < g12);
            seen[n as usize] += 1;
            assert_eq!(zeck_encode_u64(n).indices(), idx.as_slice());
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn enumerate_range_counts_and_order() {
        assert_eq!(enumerate_range(0).count(), 1);
        assert_eq!(enumerate_range(0).next(), Some(ZeckDigits::empty()));
        assert_eq!(enumerate_range(3).count(), 5);
        assert_eq!(enumerate_range(10).count(), 144);
        for k in 0..=20 {
            assert_eq!(enumerate_range(k).count() as u128, g_u128(k).unwrap());
        }
        for (n, d) in enumerate_range(12).enumerate() {
            assert_eq!(d, zeck_encode_u64(n as u64));
        }
    }

    proptest! {
        #[test]
        fn encode_is_valid_and_inverts(n in any::<u64>()) {
            let d = zeck_encode_u64(n);
            prop_assert!(ZeckDigits::new(d.indices().to_vec()).is_ok());
            prop_assert_eq!(zeck_decode(&d), big(n));
        }

        #[test]
        fn big_encode_round_trips(words in proptest::collection::vec(any::<u32>(), 1..8)) {
            let n = BigUint::new(words);
            let d = zeck_encode(&n);
            prop_assert!(ZeckDigits::new(d.indices().to_vec()).is_ok());
            prop_assert_eq!(zeck_decode(&d), n);
        }
    }
}
