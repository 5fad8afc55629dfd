//! Characteristic sums `H_k(t) = sum_{n < G_k} exp(i t f(n))` and the
//! transfer-matrix machinery behind them.
//!
//! Four independent routes compute `H_k` or `Phi_k = H_k / G_k`:
//! direct enumeration ([`h_bruteforce`]), the three-term recursion
//! ([`h_scalar`]), the product of one-step matrices ([`h_matrix`]) and the
//! paired-block factorization ([`block`]). The normalized recursion used by
//! [`phi`] keeps every quantity bounded so `k` can run into the millions.

pub mod block;
pub mod frame;
pub mod matrix;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeration::enumerate_range;
use crate::weights::WeightSequence;

pub use block::{block_decompose, paired_product, BlockDecomposition, PairedProduct};
pub use frame::{FrameCheck, GoldenFrame};
pub use matrix::Mat2;

/// Largest `k` accepted by [`h_bruteforce`].
pub const BRUTE_FORCE_GUARD: usize = 25;

/// `exp(i x) - 1` without cancellation for small `x`.
#[inline]
pub fn expm1_i(x: f64) -> Complex64 {
    let s = (0.5 * x).sin();
    Complex64::new(-2.0 * s * s, x.sin())
}

#[inline]
fn cis(x: f64) -> Complex64 {
    Complex64::new(x.cos(), x.sin())
}

/// `delta_m(t) = exp(i t f(F_{m+2})) - 1`.
pub fn delta(seq: &WeightSequence, m: usize, t: f64) -> Complex64 {
    expm1_i(t * seq.value((m + 2) as u32))
}

/// One-step transfer matrix `A_k(t) = A + delta_k(t) E21`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMatrix {
    pub k: usize,
    pub t: f64,
    pub matrix: Mat2,
    pub delta: Complex64,
}

impl StepMatrix {
    /// `Delta_k(t) = A_k(t) - A`.
    pub fn perturbation(&self) -> Mat2 {
        self.matrix - GoldenFrame::new().a
    }
}

/// `A_k(t)`. It advances the state `z_{k-1}` to `z_k`, where
/// `z_k = (H_k, exp(i t f(F_{k+2})) H_{k-1})`; see [`h_matrix`].
pub fn step_matrix(seq: &WeightSequence, k: usize, t: f64) -> Result<StepMatrix> {
    if k < 1 {
        return Err(Error::InvalidParameter("step matrices start at k = 1".into()));
    }
    let x = t * seq.value((k + 2) as u32);
    let matrix = Mat2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        cis(x),
        Complex64::new(0.0, 0.0),
    );
    Ok(StepMatrix {
        k,
        t,
        matrix,
        delta: expm1_i(x),
    })
}

/// Largest entry of `Delta(d1) Delta(d2)`; structurally zero.
pub fn nilpotent_check(d1: &StepMatrix, d2: &StepMatrix) -> f64 {
    (d1.perturbation() * d2.perturbation()).max_abs()
}

/// `H_k(t)` by the recursion `H_{k+1} = H_k + exp(i t f(F_{k+2})) H_{k-1}`.
///
/// The value grows like `alpha^k`; use [`phi`] for large `k`.
pub fn h_scalar(seq: &WeightSequence, k: usize, t: f64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if k == 0 {
        return prev;
    }
    let mut cur = Complex64::new(1.0, 0.0) + cis(t * seq.value(2));
    for m in 1..k {
        let next = cur + cis(t * seq.value((m + 2) as u32)) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_k(t)` by summing over every `n < G_k`.
pub fn h_bruteforce(seq: &WeightSequence, k: usize, t: f64) -> Result<Complex64> {
    if k > BRUTE_FORCE_GUARD {
        return Err(Error::EnumerationGuard {
            requested: k,
            guard: BRUTE_FORCE_GUARD,
        });
    }
    Ok(enumerate_range(k)
        .map(|d| cis(t * seq.eval_digits(&d)))
        .sum())
}

/// Initial state `z_1 = (H_1, exp(i t f(F_3)) H_0)`.
pub(crate) fn initial_state(seq: &WeightSequence, t: f64) -> [Complex64; 2] {
    [
        Complex64::new(1.0, 0.0) + cis(t * seq.value(2)),
        cis(t * seq.value(3)),
    ]
}

/// `H_k(t)` as the first entry of `A_k(t) ... A_2(t) z_1`.
///
/// The state `z_k = (H_k, exp(i t f(F_{k+2})) H_{k-1})` satisfies
/// `z_k = A_k(t) z_{k-1}` exactly; the twist on the second coordinate is what
/// lets the lower-left entry of `A_k(t)` carry the phase.
pub fn h_matrix(seq: &WeightSequence, k: usize, t: f64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut v = initial_state(seq, t);
    for m in 2..=k {
        let a = step_matrix(seq, m, t).expect("m >= 1").matrix;
        v = a.apply(v);
    }
    v[0]
}

/// How a [`CharFnProfile`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMethod {
    ScalarRecursion,
    MatrixProduct,
    BlockFactored,
    BruteForce,
}

impl std::fmt::Display for PhiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PhiMethod::ScalarRecursion => "scalar-recursion",
            PhiMethod::MatrixProduct => "matrix-product",
            PhiMethod::BlockFactored => "block-factored",
            PhiMethod::BruteForce => "brute-force",
        };
        f.write_str(s)
    }
}

/// `Phi_k` sampled on a grid of frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharFnProfile {
    pub k: usize,
    pub t_grid: Vec<f64>,
    #[serde(serialize_with = "serialize_complex_vec")]
    pub values: Vec<Complex64>,
    pub method: PhiMethod,
}

fn serialize_complex_vec<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl CharFnProfile {
    /// Largest `|Phi(t) - Psi(t)|` over a common grid.
    pub fn max_abs_diff(&self, other: &CharFnProfile) -> f64 {
        assert_eq!(self.t_grid, other.t_grid, "profiles on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Ratios `G_i / G_{i+1}` for `i < k`.
pub(crate) fn g_ratios(k: usize) -> Vec<f64> {
    let mut r = Vec::with_capacity(k);
    let mut cur = 0.5;
    for _ in 0..k {
        r.push(cur);
        cur = 1.0 / (1.0 + cur);
    }
    r
}

/// `ln G_k` without forming `G_k`.
pub(crate) fn ln_g(k: usize) -> f64 {
    g_ratios(k).iter().map(|r| -r.ln()).sum()
}

/// `Phi_k(t)` by the normalized recursion
/// `u_{k+1} = r_k u_k + e_{k+2} (1 - r_k) u_{k-1}`, `r_k = G_k / G_{k+1}`.
pub fn phi_value(seq: &WeightSequence, k: usize, t: f64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if k == 0 {
        return prev;
    }
    let mut cur = 0.5 * (Complex64::new(1.0, 0.0) + cis(t * seq.value(2)));
    let mut r_prev = 0.5;
    for m in 1..k {
        let r = 1.0 / (1.0 + r_prev);
        let e = cis(t * seq.value((m + 2) as u32));
        // r (1 + r_prev) = 1, so r_prev r = 1 - r, exact for r in [1/2, 2/3]
        let next = r * cur + e * (1.0 - r) * prev;
        prev = cur;
        cur = next;
        r_prev = r;
    }
    cur
}

fn phi_value_with(
    frame: &GoldenFrame,
    seq: &WeightSequence,
    k: usize,
    t: f64,
    method: PhiMethod,
) -> Result<Complex64> {
    match method {
        PhiMethod::ScalarRecursion => Ok(phi_value(seq, k, t)),
        PhiMethod::MatrixProduct => Ok(phi_matrix(seq, k, t)),
        PhiMethod::BlockFactored => Ok(block::phi_block_factored(frame, seq, k, t)),
        PhiMethod::BruteForce => {
            let h = h_bruteforce(seq, k, t)?;
            Ok(h / crate::numeration::g_f64(k))
        }
    }
}

/// Matrix route with the state rescaled when it grows large.
fn phi_matrix(seq: &WeightSequence, k: usize, t: f64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut v = initial_state(seq, t);
    let mut log_scale = 0.0;
    for m in 2..=k {
        let a = step_matrix(seq, m, t).expect("m >= 1").matrix;
        v = a.apply(v);
        let s = v[0].norm().max(v[1].norm());
        if s > 1e100 {
            v = [v[0] / s, v[1] / s];
            log_scale += s.ln();
        }
    }
    v[0] * (log_scale - ln_g(k)).exp()
}

/// `Phi_k = H_k / G_k` on a grid, evaluated in parallel with deterministic order.
pub fn phi(seq: &WeightSequence, k: usize, t_grid: &[f64]) -> CharFnProfile {
    let values = t_grid.par_iter().map(|&t| phi_value(seq, k, t)).collect();
    CharFnProfile {
        k,
        t_grid: t_grid.to_vec(),
        values,
        method: PhiMethod::ScalarRecursion,
    }
}

/// [`phi`] with an explicit method; brute force is limited by [`BRUTE_FORCE_GUARD`].
pub fn phi_with(
    seq: &WeightSequence,
    k: usize,
    t_grid: &[f64],
    method: PhiMethod,
) -> Result<CharFnProfile> {
    let frame = GoldenFrame::new();
    let values = t_grid
        .par_iter()
        .map(|&t| phi_value_with(&frame, seq, k, t, method))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharFnProfile {
        k,
        t_grid: t_grid.to_vec(),
        values,
        method,
    })
}

/// Layer gap used to declare `Phi_K` stable.
pub const STABILIZATION_LAG: usize = 8;

/// A Cauchy-stabilized `Phi_K` standing in for the limit `Phi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitProfile {
    pub profile: CharFnProfile,
    /// `max_t |Phi_K(t) - Phi_{K+8}(t)|` at the returned depth.
    pub gap: f64,
}

/// Smallest `K <= cap` with `max_t |Phi_K - Phi_{K+8}| < eps`.
pub fn phi_limit(seq: &WeightSequence, t_grid: &[f64], eps: f64, cap: usize) -> Result<LimitProfile> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empty frequency grid".into()));
    }
    let lag = STABILIZATION_LAG;
    let n = t_grid.len();
    // ring of the last lag + 1 layers
    let mut ring: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; lag + 1];
    ring[0] = vec![Complex64::new(1.0, 0.0); n];
    let mut prev = ring[0].clone();
    let mut cur: Vec<Complex64> = t_grid
        .iter()
        .map(|&t| 0.5 * (Complex64::new(1.0, 0.0) + cis(t * seq.value(2))))
        .collect();
    ring[1] = cur.clone();
    let mut r_prev = 0.5;
    let mut best = f64::INFINITY;
    for layer in 1..=(cap + lag) {
        if layer >= lag {
            let base = layer - lag;
            let gap = ring[base % (lag + 1)]
                .iter()
                .zip(&ring[layer % (lag + 1)])
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            best = best.min(gap);
            if gap < eps {
                return Ok(LimitProfile {
                    profile: CharFnProfile {
                        k: base,
                        t_grid: t_grid.to_vec(),
                        values: ring[base % (lag + 1)].clone(),
                        method: PhiMethod::ScalarRecursion,
                    },
                    gap,
                });
            }
        }
        if layer == cap + lag {
            break;
        }
        // advance to layer + 1
        let r = 1.0 / (1.0 + r_prev);
        let w = seq.value((layer + 2) as u32);
        let next: Vec<Complex64> = t_grid
            .iter()
            .zip(cur.iter().zip(&prev))
            .map(|(&t, (&c, &p))| r * c + cis(t * w) * (1.0 - r) * p)
            .collect();
        prev = std::mem::replace(&mut cur, next);
        ring[(layer + 1) % (lag + 1)] = cur.clone();
        r_prev = r;
    }
    Err(Error::NoStabilization { eps, cap, gap: best })
}
