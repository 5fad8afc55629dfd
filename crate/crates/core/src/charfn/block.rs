//! Paired blocks `B_k(t) = A_{2k+1}(t) A_{2k}(t)` in eigen-coordinates and the
//! extraction of their common linear phase.
//!
//! With `M_k = D^{-2} P^{-1} B_k P = I + delta_{2k} U + delta_{2k+1} V` and
//! `theta_k = (delta_{2k} + delta_{2k+1}) / (alpha sqrt5)`, the remainder
//! `R_k = exp(-theta_k E11) M_k - I` has a (1,1) entry that is quadratic in `t`.

use num_complex::Complex64;
use serde::Serialize;

use super::frame::GoldenFrame;
use super::matrix::Mat2;
use super::{delta, expm1_i, initial_state, ln_g, step_matrix};
use crate::error::{Error, Result};
use crate::weights::WeightSequence;

/// Longest span accepted by [`paired_product`]; the interaction-frame
/// remainder grows like `alpha^{4n}` in its (2,1) entry.
pub const MAX_PAIRED_SPAN: usize = 300;

/// Factored form of one conjugated block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDecomposition {
    pub k: usize,
    pub t: f64,
    /// `delta_{2k}(t)`, driven by `f(F_{2k+2})`.
    pub delta_even: Complex64,
    /// `delta_{2k+1}(t)`, driven by `f(F_{2k+3})`.
    pub delta_odd: Complex64,
    /// `P^{-1} A_{2k+1} A_{2k} P`, formed by direct multiplication.
    pub b_tilde: Mat2,
    /// `D^{-2} b_tilde`.
    pub m: Mat2,
    pub theta: Complex64,
    /// `exp(-theta E11) M - I`, with `M` taken from `b_tilde`.
    pub r: Mat2,
    /// The same remainder assembled from `U` and `V`; exactly zero when both
    /// deltas vanish.
    pub r_structured: Mat2,
}

impl BlockDecomposition {
    /// Decomposes block `k` without the `|theta| <= 1` check.
    pub fn compute(frame: &GoldenFrame, seq: &WeightSequence, k: usize, t: f64) -> Self {
        let even = step_matrix(seq, 2 * k, t).expect("2k >= 1 for k >= 1");
        let odd = step_matrix(seq, 2 * k + 1, t).expect("2k + 1 >= 1");
        Self::from_steps(frame, k, t, even.matrix, odd.matrix, even.delta, odd.delta)
    }

    /// Decomposition for prescribed weights `f(F_{2k+2})`, `f(F_{2k+3})`.
    pub fn from_weights(frame: &GoldenFrame, k: usize, t: f64, w_even: f64, w_odd: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let step = |w: f64| {
            let x = t * w;
            Mat2::new(one, one, Complex64::new(x.cos(), x.sin()), Complex64::new(0.0, 0.0))
        };
        Self::from_steps(
            frame,
            k,
            t,
            step(w_even),
            step(w_odd),
            expm1_i(t * w_even),
            expm1_i(t * w_odd),
        )
    }

    fn from_steps(
        frame: &GoldenFrame,
        k: usize,
        t: f64,
        a_even: Mat2,
        a_odd: Mat2,
        delta_even: Complex64,
        delta_odd: Complex64,
    ) -> Self {
        let b_tilde = frame.conjugate(&(a_odd * a_even));
        let m = frame.d_inv_sq_times(&b_tilde);
        let theta = (delta_even + delta_odd) / (frame.alpha * frame.sqrt5);
        // exp(-theta E11) = I + (exp(-theta) - 1) E11 scales the first row
        let r = m.scale_rows((-theta).exp(), Complex64::new(1.0, 0.0)) - Mat2::identity();
        let perturbation = frame.u.scale(delta_even) + frame.v.scale(delta_odd);
        let shrink = complex_expm1(-theta);
        let r_structured = frame.e11.scale(shrink)
            + perturbation
            + (frame.e11 * perturbation).scale(shrink);
        BlockDecomposition {
            k,
            t,
            delta_even,
            delta_odd,
            b_tilde,
            m,
            theta,
            r,
            r_structured,
        }
    }

    /// `D^2 + delta_{2k} D S + delta_{2k+1} S D`.
    pub fn b_tilde_closed_form(&self, frame: &GoldenFrame) -> Mat2 {
        frame.d_sq() + (frame.d * frame.s).scale(self.delta_even) + (frame.s * frame.d).scale(self.delta_odd)
    }

    /// `alpha^2 + (alpha / sqrt5)(delta_{2k} + delta_{2k+1})`.
    pub fn b11_closed_form(&self, frame: &GoldenFrame) -> Complex64 {
        frame.alpha * frame.alpha
            + (frame.alpha / frame.sqrt5) * (self.delta_even + self.delta_odd)
    }

    /// `exp(-theta)(1 + theta) - 1`.
    pub fn r11_closed_form(&self) -> Complex64 {
        (-self.theta).exp() * (1.0 + self.theta) - 1.0
    }

    /// `D^2 exp(theta E11) (I + R)`, which reproduces `b_tilde`.
    pub fn refactor(&self, frame: &GoldenFrame) -> Mat2 {
        let phase = Mat2::diag(self.theta.exp(), Complex64::new(1.0, 0.0));
        frame.d_sq() * phase * (Mat2::identity() + self.r)
    }

    pub fn remainder_adapted_norm(&self, frame: &GoldenFrame) -> f64 {
        frame.adapted_norm(&self.r)
    }
}

/// `exp(z) - 1` without cancellation near zero.
fn complex_expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let s = (0.5 * y).sin();
    let cos_m1 = -2.0 * s * s;
    Complex64::new(x.exp_m1() * y.cos() + cos_m1, x.exp() * y.sin())
}

/// `f(F_{2k+2})^2 + f(F_{2k+3})^2`.
pub fn block_variance(seq: &WeightSequence, k: usize) -> f64 {
    let a = seq.value((2 * k + 2) as u32);
    let b = seq.value((2 * k + 3) as u32);
    a * a + b * b
}

/// `|f(F_{2k+2})| + |f(F_{2k+3})|`.
pub fn block_l1(seq: &WeightSequence, k: usize) -> f64 {
    seq.value((2 * k + 2) as u32).abs() + seq.value((2 * k + 3) as u32).abs()
}

/// Decomposes block `k >= 1`, refusing blocks with `|theta_k(t)| > 1`.
pub fn block_decompose(
    frame: &GoldenFrame,
    seq: &WeightSequence,
    k: usize,
    t: f64,
) -> Result<BlockDecomposition> {
    if k < 1 {
        return Err(Error::InvalidParameter("blocks start at k = 1".into()));
    }
    let b = BlockDecomposition::compute(frame, seq, k, t);
    let modulus = b.theta.norm();
    if modulus > 1.0 {
        return Err(Error::ThetaOutOfRange { block: k, modulus });
    }
    Ok(b)
}

/// `prod_{k=K}^{L} B~_k(t)` as `D^{2n} exp(Phase E11) W`, `n = L - K + 1`.
///
/// `D^2` and `exp(theta E11)` are diagonal but do not commute with the
/// remainders, so `W` is the ordered product of `I + C_k^{-1} R_k C_k` where
/// `C_k` collects the diagonal factors of the blocks `K..k-1`. The
/// factorization is then exact; `W = I` whenever all `R_k` vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedProduct {
    pub first: usize,
    pub last: usize,
    /// `2 n ln(alpha)`, the logarithm of the dominant scale `alpha^{2n}`.
    pub log_scale: f64,
    pub phase_sum: Complex64,
    pub remainder_product: Mat2,
    /// `sum_k ||R_k||_A` over the span.
    pub remainder_norm_sum: f64,
    /// `t^2 sum_k V_k` over the span.
    pub quadratic_tail: f64,
}

impl PairedProduct {
    pub fn blocks(&self) -> usize {
        self.last + 1 - self.first
    }

    /// `D^{2n} exp(Phase E11) W / alpha^{2n}`.
    pub fn reconstruct_normalized(&self, frame: &GoldenFrame) -> Mat2 {
        let ratio = (frame.alpha_bar / frame.alpha).powi(2 * self.blocks() as i32);
        self.remainder_product
            .scale_rows(self.phase_sum.exp(), Complex64::new(ratio, 0.0))
    }
}

/// Paired-block factorization of blocks `first..=last`.
pub fn paired_product(
    frame: &GoldenFrame,
    seq: &WeightSequence,
    first: usize,
    last: usize,
    t: f64,
) -> Result<PairedProduct> {
    if first < 1 || last < first {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= K <= L, got K = {first}, L = {last}"
        )));
    }
    let n = last + 1 - first;
    if n > MAX_PAIRED_SPAN {
        return Err(Error::SpanTooLong {
            blocks: n,
            max: MAX_PAIRED_SPAN,
        });
    }
    let second_ratio = (frame.alpha_bar / frame.alpha).powi(2);
    let mut w = Mat2::identity();
    let mut phase = Complex64::new(0.0, 0.0);
    let mut c2 = 1.0f64;
    let mut norm_sum = 0.0;
    let mut quad = 0.0;
    for k in first..=last {
        let b = block_decompose(frame, seq, k, t)?;
        let c1 = phase.exp();
        let mut r = b.r_structured;
        r.m[0][1] *= c2 / c1;
        r.m[1][0] *= c1 / c2;
        w = (Mat2::identity() + r) * w;
        phase += b.theta;
        c2 *= second_ratio;
        norm_sum += b.remainder_adapted_norm(frame);
        quad += t * t * block_variance(seq, k);
    }
    Ok(PairedProduct {
        first,
        last,
        log_scale: 2.0 * n as f64 * frame.alpha.ln(),
        phase_sum: phase,
        remainder_product: w,
        remainder_norm_sum: norm_sum,
        quadratic_tail: quad,
    })
}

/// `P^{-1} (prod_k A_{2k+1} A_{2k}) P / alpha^{2n}`, accumulated in the
/// original coordinates and conjugated once.
pub fn direct_paired_product(
    frame: &GoldenFrame,
    seq: &WeightSequence,
    first: usize,
    last: usize,
    t: f64,
) -> Mat2 {
    let inv = Complex64::new(1.0 / (frame.alpha * frame.alpha), 0.0);
    let mut acc = Mat2::identity();
    for k in first..=last {
        let even = step_matrix(seq, 2 * k, t).expect("k >= 1").matrix;
        let odd = step_matrix(seq, 2 * k + 1, t).expect("k >= 1").matrix;
        acc = (odd * even).scale(inv) * acc;
    }
    frame.conjugate(&acc)
}

/// Largest entry error of the reconstruction relative to the largest
/// entry of the direct product.
pub fn reconstruction_error(
    frame: &GoldenFrame,
    seq: &WeightSequence,
    first: usize,
    last: usize,
    t: f64,
) -> Result<f64> {
    let pp = paired_product(frame, seq, first, last, t)?;
    let direct = direct_paired_product(frame, seq, first, last, t);
    Ok(pp.reconstruct_normalized(frame).max_abs_diff(&direct) / direct.max_abs())
}

/// `Phi_k(t)` with the steps `A_2..A_k` grouped into factored blocks
/// `B_j = A_{2j+1} A_{2j}` and applied in eigen-coordinates.
pub(crate) fn phi_block_factored(
    frame: &GoldenFrame,
    seq: &WeightSequence,
    k: usize,
    t: f64,
) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if k == 0 {
        return one;
    }
    let steps = k - 1;
    let blocks = steps / 2;
    let mut w = frame.p_inv.apply(initial_state(seq, t));
    let mut log_scale = 0.0;
    let d2 = frame.d_sq();
    for j in 1..=blocks {
        let b = BlockDecomposition::compute(frame, seq, j, t);
        let phase = Mat2::diag(b.theta.exp(), one);
        w = (d2 * phase * (Mat2::identity() + b.r)).apply(w);
        let s = w[0].norm().max(w[1].norm());
        if s > 0.0 {
            w = [w[0] / s, w[1] / s];
            log_scale += s.ln();
        }
    }
    let mut v = frame.p.apply(w);
    if steps % 2 == 1 {
        v = step_matrix(seq, k, t).expect("k >= 2").matrix.apply(v);
    }
    v[0] * (log_scale - ln_g(k)).exp()
}

/// Fitted constants of the remainder bounds over a sample of blocks.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RemainderFit {
    /// `max |(R_k)11| / (t^2 V_k)`.
    pub quadratic_constant: f64,
    /// `max ||R_k||_A / (|t| (|f_{2k+2}| + |f_{2k+3}|) + t^2 V_k)`.
    pub adapted_constant: f64,
    pub samples: usize,
}

impl RemainderFit {
    pub fn observe(&mut self, frame: &GoldenFrame, b: &BlockDecomposition, w_even: f64, w_odd: f64) {
        let v = w_even * w_even + w_odd * w_odd;
        let t = b.t;
        if t == 0.0 || v == 0.0 {
            return;
        }
        let quad = t * t * v;
        let lin = t.abs() * (w_even.abs() + w_odd.abs());
        self.quadratic_constant = self.quadratic_constant.max(b.r.at(1, 1).norm() / quad);
        self.adapted_constant = self
            .adapted_constant
            .max(b.remainder_adapted_norm(frame) / (lin + quad));
        self.samples += 1;
    }
}

/// `delta` helper re-exported for block indices.
pub fn block_deltas(seq: &WeightSequence, k: usize, t: f64) -> (Complex64, Complex64) {
    (delta(seq, 2 * k, t), delta(seq, 2 * k + 1, t))
}
