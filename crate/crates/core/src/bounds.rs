//! Numerical evaluation of the effective bounds on `||F_N - F||_inf` and
//! `|Phi_N - Phi|`, side by side with the directly computed quantities.
//!
//! Two different `T` appear: `T_smooth >= 1` is the smoothing parameter of the
//! Esseen inequality and the master bound, `T_freq` in `(0, 1]` is the
//! frequency cutoff of the quadratic and split forms.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::phi_value;
use crate::distribution::{
    concentration, dist_exact, dist_prefix, kolmogorov, stabilized_law, DiscreteDistribution,
    LimitLaw, StabilizeOptions,
};
use crate::error::{Error, Result};
use crate::numeration::{fib, g_u128, zeck_encode};
use crate::weights::WeightSequence;

pub const Q_TERM: &str = "Q_F(1/T)";
pub const LOG_N_TERM: &str = "logN/T";
pub const MID_TERM: &str = "mid";
pub const HF_TERM: &str = "hf";
pub const TAIL_TERM: &str = "(logN/T)·tail";
pub const LOG_T_TERM: &str = "logT/T";
pub const SPLIT_LINEAR: &str = "split-linear";
pub const SPLIT_QUADRATIC: &str = "split-quadratic";

/// Relative tolerance of the smoothing quadrature.
pub const QUAD_REL_TOL: f64 = 1e-6;
const QUAD_ABS_FLOOR: f64 = 1e-14;
const QUAD_MAX_DEPTH: u32 = 40;
const QUAD_MAX_EVALS: usize = 2_000_000;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: u128,
    pub t_smooth: Option<f64>,
    pub t_freq: Option<f64>,
    pub l: Option<u64>,
    pub h: Option<u64>,
    /// Truncation level `K = ceil((L - 2h) / 2)`.
    pub k: Option<u64>,
    pub t0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: String,
    /// `kolmogorov(F_N, F_stab)`.
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_terms: BTreeMap<String, f64>,
    pub params: BoundParams,
    /// `lhs / rhs`.
    pub fitted_constant: f64,
    pub stab_depth: usize,
    pub stab_gap: f64,
}

/// Weights together with the stabilized law standing in for `F`.
#[derive(Debug, Clone)]
pub struct BoundContext {
    seq: WeightSequence,
    law: LimitLaw,
}

/// Stabilization used by [`BoundContext::new`]: depths 6, 14, 22, 30.
pub fn default_stabilization() -> StabilizeOptions {
    StabilizeOptions {
        start: 6,
        lag: 8,
        eps: 1e-9,
        max_depth: 30,
        ..Default::default()
    }
}

impl BoundContext {
    pub fn new(seq: &WeightSequence) -> Result<Self> {
        Self::with_stabilization(seq, default_stabilization())
    }

    pub fn with_stabilization(seq: &WeightSequence, opts: StabilizeOptions) -> Result<Self> {
        Ok(BoundContext {
            seq: seq.clone(),
            law: stabilized_law(seq, opts)?,
        })
    }

    pub fn seq(&self) -> &WeightSequence {
        &self.seq
    }

    pub fn law(&self) -> &LimitLaw {
        &self.law
    }

    /// `Q_F(lambda)` of the stabilized law.
    pub fn q_f(&self, lambda: f64) -> f64 {
        concentration(&self.law.dist, lambda)
    }

    /// Characteristic function of the stabilized law.
    pub fn phi_limit(&self, t: f64) -> Complex64 {
        phi_value(&self.seq, self.law.depth, t)
    }

    /// `kolmogorov(F_N, F_stab)`.
    pub fn lhs(&self, n: u128) -> Result<f64> {
        Ok(kolmogorov(&self.prefix_law(n)?, &self.law.dist))
    }

    fn prefix_law(&self, n: u128) -> Result<DiscreteDistribution> {
        dist_prefix(&self.seq, &BigUint::from(n))
    }

    fn report(&self, kind: &str, lhs: f64, terms: BTreeMap<String, f64>, params: BoundParams) -> BoundReport {
        let rhs = terms.values().fold(0.0, |a, b| a + b);
        BoundReport {
            kind: kind.to_string(),
            lhs,
            rhs,
            rhs_terms: terms,
            params,
            fitted_constant: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
            stab_depth: self.law.depth,
            stab_gap: self.law.gap,
        }
    }
}

fn ln_n(n: u128) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N must be at least 2, got {n}")));
    }
    Ok((n as f64).ln())
}

/// `Phi_N(t)`, the characteristic function of `f(n)` for `n` uniform on `[0, N)`.
pub fn phi_prefix(seq: &WeightSequence, n: &BigUint, t: f64) -> Result<Complex64> {
    let digits = zeck_encode(n);
    let Some(top) = digits.top() else {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    };
    let depth = (top - 2) as usize;
    let layers: Vec<Complex64> = (0..=depth).map(|k| phi_value(seq, k, t)).collect();
    let n_f = n.to_f64().unwrap_or(f64::INFINITY);
    let mut offset = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for &j in digits.indices().iter().rev() {
        let share = fib(j as usize).to_f64().unwrap() / n_f;
        acc += share * Complex64::new((t * offset).cos(), (t * offset).sin()) * layers[(j - 2) as usize];
        offset += seq.value(j);
    }
    Ok(acc)
}

/// `max_t |Phi_k(t) - Phi_{limit_depth}(t)|` over a grid inside `[-1, 1]`.
pub fn phi_gap(seq: &WeightSequence, k: usize, limit_depth: usize, t_grid: &[f64]) -> Result<f64> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empty frequency grid".into()));
    }
    if t_grid.iter().any(|t| !(t.abs() <= 1.0)) {
        return Err(Error::InvalidParameter("phi_gap needs |t| <= 1".into()));
    }
    Ok(t_grid
        .par_iter()
        .map(|&t| (phi_value(seq, k, t) - phi_value(seq, limit_depth, t)).norm())
        .reduce(|| 0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiGapRow {
    pub k: usize,
    pub gap: f64,
    /// `T_freq^2 * tail_l2(2k)`.
    pub quadratic_tail: f64,
    pub ratio: Option<f64>,
}

/// [`phi_gap`] per depth next to the quadratic tail at the matching cut.
pub fn phi_gap_sweep(
    seq: &WeightSequence,
    ks: &[usize],
    limit_depth: usize,
    t_grid: &[f64],
) -> Result<Vec<PhiGapRow>> {
    let t_freq = t_grid.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    ks.par_iter()
        .map(|&k| {
            let gap = phi_gap(seq, k, limit_depth, t_grid)?;
            let quadratic_tail = t_freq * t_freq * seq.tail_l2(2 * k as u64)?.value;
            Ok(PhiGapRow {
                k,
                gap,
                quadratic_tail,
                ratio: (quadratic_tail > 0.0).then(|| gap / quadratic_tail),
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `x`, ignoring `y <= 0`.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(x, y)| (x, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Adaptive trapezoid with Richardson correction on `[a, b]`.
fn adaptive_trapezoid<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64> {
    const PANELS: usize = 32;
    let h = (b - a) / PANELS as f64;
    let xs: Vec<f64> = (0..=PANELS).map(|i| a + h * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let coarse: f64 = (0..PANELS).map(|i| 0.5 * h * (ys[i] + ys[i + 1])).sum();
    let tol = (QUAD_REL_TOL * coarse.abs()).max(QUAD_ABS_FLOOR * (b - a));
    let mut evals = PANELS + 1;
    let mut total = 0.0;
    for i in 0..PANELS {
        total += refine(f, xs[i], xs[i + 1], ys[i], ys[i + 1], tol / PANELS as f64, 0, &mut evals)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let fm = f(m);
    *evals += 1;
    let whole = 0.5 * (b - a) * (fa + fb);
    let halves = 0.25 * (b - a) * (fa + 2.0 * fm + fb);
    let err = (halves - whole).abs() / 3.0;
    if err <= tol {
        return Ok(halves + (halves - whole) / 3.0);
    }
    if depth >= QUAD_MAX_DEPTH || *evals >= QUAD_MAX_EVALS {
        return Err(Error::Quadrature {
            lo: a,
            hi: b,
            estimate: halves,
        });
    }
    Ok(refine(f, a, m, fa, fm, 0.5 * tol, depth + 1, evals)?
        + refine(f, m, b, fm, fb, 0.5 * tol, depth + 1, evals)?)
}

/// `(1/T) int_lo^hi |Phi_N(t) - Phi(t)| / t dt`, integrated in `ln t`.
fn smoothing_piece(ctx: &BoundContext, n: &BigUint, lo: f64, hi: f64, t_smooth: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let integrand = |s: f64| {
        let t = s.exp();
        let pn = phi_prefix(&ctx.seq, n, t).expect("N >= 1");
        (pn - ctx.phi_limit(t)).norm()
    };
    Ok(adaptive_trapezoid(&integrand, lo.ln(), hi.ln())? / t_smooth)
}

/// Esseen smoothing right side, with `[0, t0]` replaced by `log N / T`.
pub fn smoothing_bound(ctx: &BoundContext, n: u128, t_smooth: f64, t0: Option<f64>) -> Result<BoundReport> {
    let log_n = ln_n(n)?;
    if !(t_smooth >= 1.0) || !t_smooth.is_finite() {
        return Err(Error::InvalidParameter(format!("T_smooth must be >= 1, got {t_smooth}")));
    }
    let t0 = t0.unwrap_or(1.0 / n as f64);
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::InvalidParameter(format!("t0 must lie in (0, 1), got {t0}")));
    }
    let big_n = BigUint::from(n);
    let mid = smoothing_piece(ctx, &big_n, t0, 1.0, t_smooth)?;
    let hf = smoothing_piece(ctx, &big_n, 1.0, t_smooth, t_smooth)?;
    let mut terms = BTreeMap::new();
    terms.insert(Q_TERM.to_string(), ctx.q_f(1.0 / t_smooth));
    terms.insert(LOG_N_TERM.to_string(), log_n / t_smooth);
    terms.insert(MID_TERM.to_string(), mid);
    terms.insert(HF_TERM.to_string(), hf);
    let params = BoundParams {
        n,
        t_smooth: Some(t_smooth),
        t0: Some(t0),
        ..Default::default()
    };
    Ok(ctx.report("smoothing", ctx.lhs(n)?, terms, params))
}

/// `L = ceil(4 ln N)`, `h = ceil(ln N)`.
pub fn default_schedule(n: u128) -> (u64, u64) {
    let log_n = (n.max(2) as f64).ln();
    ((4.0 * log_n).ceil() as u64, log_n.ceil() as u64)
}

fn check_lh(l: u64, h: u64) -> Result<()> {
    if l <= 2 * h {
        return Err(Error::InvalidParameter(format!("need L > 2h, got L = {l}, h = {h}")));
    }
    Ok(())
}

/// Master bound `Q_F(1/T) + logN/T + (logN/T) tail_l2(L - 2h) + logT/T`.
pub fn master_bound(
    ctx: &BoundContext,
    n: u128,
    t_smooth: f64,
    l: Option<u64>,
    h: Option<u64>,
) -> Result<BoundReport> {
    let lhs = ctx.lhs(n)?;
    master_bound_with_lhs(ctx, n, t_smooth, l, h, lhs)
}

fn master_bound_with_lhs(
    ctx: &BoundContext,
    n: u128,
    t_smooth: f64,
    l: Option<u64>,
    h: Option<u64>,
    lhs: f64,
) -> Result<BoundReport> {
    let log_n = ln_n(n)?;
    if !(t_smooth >= 1.0) || !t_smooth.is_finite() {
        return Err(Error::InvalidParameter(format!("T_smooth must be >= 1, got {t_smooth}")));
    }
    let (dl, dh) = default_schedule(n);
    let (l, h) = (l.unwrap_or(dl), h.unwrap_or(dh));
    check_lh(l, h)?;
    let cut = l - 2 * h;
    let tail = ctx.seq.tail_l2(cut)?.value;
    let mut terms = BTreeMap::new();
    terms.insert(Q_TERM.to_string(), ctx.q_f(1.0 / t_smooth));
    terms.insert(LOG_N_TERM.to_string(), log_n / t_smooth);
    terms.insert(TAIL_TERM.to_string(), log_n / t_smooth * tail);
    terms.insert(LOG_T_TERM.to_string(), t_smooth.ln() / t_smooth);
    let params = BoundParams {
        n,
        t_smooth: Some(t_smooth),
        l: Some(l),
        h: Some(h),
        k: Some(cut.div_ceil(2)),
        ..Default::default()
    };
    Ok(ctx.report("master", lhs, terms, params))
}

/// Split form with big weights past `cut_m` counted linearly.
pub fn split_bound(ctx: &BoundContext, n: u128, t_freq: f64, cut_m: Option<u64>) -> Result<BoundReport> {
    let log_n = ln_n(n)?;
    if !(t_freq > 0.0 && t_freq <= 1.0) {
        return Err(Error::InvalidParameter(format!("T_freq must lie in (0, 1], got {t_freq}")));
    }
    let (l, h) = default_schedule(n);
    let cut = cut_m.unwrap_or(l - 2 * h);
    let split = ctx.seq.split_tail(cut, t_freq)?;
    let mut terms = BTreeMap::new();
    terms.insert(Q_TERM.to_string(), ctx.q_f(1.0 / t_freq));
    terms.insert(LOG_N_TERM.to_string(), log_n / t_freq);
    terms.insert(SPLIT_LINEAR.to_string(), split.linear);
    terms.insert(SPLIT_QUADRATIC.to_string(), split.quadratic);
    let params = BoundParams {
        n,
        t_freq: Some(t_freq),
        l: cut_m.is_none().then_some(l),
        h: cut_m.is_none().then_some(h),
        k: Some(cut.div_ceil(2)),
        ..Default::default()
    };
    Ok(ctx.report("split", ctx.lhs(n)?, terms, params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub m: u64,
    pub tail: f64,
    pub remainder: f64,
    pub tail_log_m: f64,
}

/// `(m, tail_l2(m), tail_l2(m) ln m)`.
pub fn example_asymptotics(seq: &WeightSequence, m_list: &[u64]) -> Result<Vec<AsymptoticRow>> {
    if m_list.is_empty() || m_list[0] < 10 || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "m list must be increasing and start at 10 or more".into(),
        ));
    }
    m_list
        .par_iter()
        .map(|&m| {
            let tail = seq.tail_l2(m)?;
            Ok(AsymptoticRow {
                m,
                tail: tail.value,
                remainder: tail.remainder,
                tail_log_m: tail.value * (m as f64).ln(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TSchedule {
    Fixed(f64),
    LogN,
    LogNSquared,
}

impl TSchedule {
    /// `T_smooth` for `N`, never below 1.
    pub fn value(&self, n: u128) -> f64 {
        let log_n = (n.max(2) as f64).ln();
        match *self {
            TSchedule::Fixed(t) => t,
            TSchedule::LogN => log_n,
            TSchedule::LogNSquared => log_n * log_n,
        }
        .max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub n: u128,
    pub lhs: f64,
    pub best_rhs: f64,
    pub best_t: f64,
    pub ratio: f64,
}

/// Per depth `k`, `kolmogorov(F_{G_k}, F_stab)` and the smallest master
/// bound over the `T` schedule.
pub fn convergence_experiment(
    ctx: &BoundContext,
    k_list: &[usize],
    schedule: &[TSchedule],
) -> Result<Vec<ConvergenceRow>> {
    if k_list.is_empty() || k_list.windows(2).any(|w| w[0] >= w[1]) || schedule.is_empty() {
        return Err(Error::InvalidParameter(
            "k list must be increasing and the T schedule nonempty".into(),
        ));
    }
    k_list
        .par_iter()
        .map(|&k| {
            let n = g_u128(k).ok_or_else(|| Error::InvalidParameter(format!("G_{k} exceeds u128")))?;
            let lhs = kolmogorov(&dist_exact(&ctx.seq, k)?, &ctx.law.dist);
            let mut best: Option<BoundReport> = None;
            for s in schedule {
                let r = master_bound_with_lhs(ctx, n.max(2), s.value(n), None, None, lhs)?;
                if best.as_ref().is_none_or(|b| r.rhs < b.rhs) {
                    best = Some(r);
                }
            }
            let best = best.expect("nonempty schedule");
            Ok(ConvergenceRow {
                k,
                n,
                lhs,
                best_rhs: best.rhs,
                best_t: best.params.t_smooth.unwrap(),
                ratio: lhs / best.rhs,
            })
        })
        .collect()
}

/// `max lhs / rhs` over the rows.
pub fn fitted_constant(rows: &[ConvergenceRow]) -> f64 {
    rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeration::g;

    fn explicit(pairs: &[(u32, f64)]) -> WeightSequence {
        WeightSequence::explicit(pairs.iter().copied()).unwrap()
    }

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn phi_prefix_matches_direct_sum() {
        let e = WeightSequence::example();
        for n in [1u64, 2, 7, 100, 1234, 50_000] {
            for t in [-0.9, 0.2, 1.7] {
                let direct: Complex64 = (0..n)
                    .map(|m| {
                        let x = t * e.eval_f(m);
                        Complex64::new(x.cos(), x.sin())
                    })
                    .sum::<Complex64>()
                    / n as f64;
                let p = phi_prefix(&e, &BigUint::from(n), t).unwrap();
                assert!((p - direct).norm() < 1e-11, "n = {n}");
            }
        }
        let k = 14;
        assert!((phi_prefix(&e, &g(k), 0.6).unwrap() - phi_value(&e, k, 0.6)).norm() < 1e-14);
    }

    #[test]
    fn phi_gap_examples() {
        assert_eq!(phi_gap(&WeightSequence::zero(), 10, 60, &grid(11)).unwrap(), 0.0);
        assert!(phi_gap(&WeightSequence::example(), 10, 60, &[2.0]).is_err());
        let g = phi_gap(&WeightSequence::example(), 30, 400, &grid(21)).unwrap();
        assert!(g > 0.0 && g.is_finite());
    }

    #[test]
    fn atomic_gap_decays_at_alpha_squared_per_layer() {
        let alpha = 0.5 * (1.0 + 5f64.sqrt());
        let w = WeightSequence::zero_after(5);
        let pts: Vec<(f64, f64)> = (5..=30)
            .map(|k| (k as f64, phi_gap(&w, k, 120, &grid(41)).unwrap()))
            .collect();
        let slope = fit_log_slope(&pts).unwrap();
        let expected = -2.0 * alpha.ln();
        assert!((slope / expected - 1.0).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn example_gap_over_quadratic_tail_is_bounded() {
        let rows = phi_gap_sweep(&WeightSequence::example(), &[10, 20, 30, 40], 2000, &grid(21)).unwrap();
        for r in &rows {
            let ratio = r.ratio.unwrap();
            assert!(ratio > 0.0 && ratio < 10.0, "{r:?}");
        }
    }

    #[test]
    fn log_slope_fit() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 * (-0.7 * i as f64).exp())).collect();
        assert!((fit_log_slope(&pts).unwrap() + 0.7).abs() < 1e-12);
        assert!(fit_log_slope(&[(1.0, 1.0)]).is_none());
    }

    #[test]
    fn quadrature_of_known_integrals() {
        let v = adaptive_trapezoid(&|x: f64| x.sin(), 0.0, std::f64::consts::PI).unwrap();
        assert!((v - 2.0).abs() < 1e-6);
        let v = adaptive_trapezoid(&|x: f64| (3.0 * x).exp(), -2.0, 1.0).unwrap();
        let exact = ((3.0f64).exp() - (-6.0f64).exp()) / 3.0;
        assert!((v / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_weights_reduce_to_point_mass() {
        let ctx = BoundContext::new(&WeightSequence::zero()).unwrap();
        let n = 1000;
        let r = master_bound(&ctx, n, 1.0, None, None).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs_terms[Q_TERM], 1.0);
        assert_eq!(r.rhs_terms[TAIL_TERM], 0.0);
        assert_eq!(r.rhs_terms[LOG_T_TERM], 0.0);
        let s = smoothing_bound(&ctx, n, 2.0, None).unwrap();
        assert_eq!(s.rhs_terms[Q_TERM], 1.0);
        assert!(s.rhs_terms[MID_TERM] < 1e-12 && s.rhs_terms[HF_TERM] < 1e-12);
    }

    #[test]
    fn terms_sum_to_rhs() {
        let ctx = BoundContext::with_stabilization(
            &WeightSequence::example(),
            StabilizeOptions {
                max_depth: 22,
                ..default_stabilization()
            },
        )
        .unwrap();
        let n = g_u128(16).unwrap();
        let reports = [
            smoothing_bound(&ctx, n, 4.0, None).unwrap(),
            master_bound(&ctx, n, 9.0, None, None).unwrap(),
            split_bound(&ctx, n, 0.5, Some(100)).unwrap(),
        ];
        for r in &reports {
            let s: f64 = r.rhs_terms.values().sum();
            assert!((s - r.rhs).abs() < 1e-12);
            assert!(r.rhs_terms.values().all(|&v| v >= 0.0));
            assert!(r.fitted_constant > 0.0 && r.fitted_constant.is_finite());
            assert!(r.lhs > 0.0 && r.lhs < 1.0);
        }
        assert_eq!(reports[0].rhs_terms.len(), 4);
        // wrong ranges
        assert!(master_bound(&ctx, n, 0.5, None, None).is_err());
        assert!(master_bound(&ctx, n, 2.0, Some(10), Some(5)).is_err());
        assert!(split_bound(&ctx, n, 1.5, None).is_err());
        assert!(smoothing_bound(&ctx, n, 0.9, None).is_err());
    }

    #[test]
    fn master_tail_term_matches_tail_l2() {
        let e = WeightSequence::example();
        let ctx = BoundContext::with_stabilization(
            &e,
            StabilizeOptions {
                max_depth: 14,
                ..default_stabilization()
            },
        )
        .unwrap();
        let n = g_u128(12).unwrap();
        let r = master_bound(&ctx, n, 5.0, Some(40), Some(10)).unwrap();
        let expected = (n as f64).ln() / 5.0 * e.tail_l2(20).unwrap().value;
        assert_eq!(r.rhs_terms[TAIL_TERM], expected);
        assert_eq!(r.params.k, Some(10));
    }

    #[test]
    fn split_examples() {
        let w = explicit(&[(10, 3.0)]);
        let ctx = BoundContext::new(&w).unwrap();
        let r = split_bound(&ctx, 500, 1.0, Some(5)).unwrap();
        assert_eq!(r.rhs_terms[SPLIT_LINEAR], 3.0);
        assert_eq!(r.rhs_terms[SPLIT_QUADRATIC], 0.0);

        let e = WeightSequence::example();
        let ctx = BoundContext::with_stabilization(
            &e,
            StabilizeOptions {
                max_depth: 14,
                ..default_stabilization()
            },
        )
        .unwrap();
        // every tail weight is below 1/T: the split form is the quadratic one
        let r = split_bound(&ctx, 1000, 0.5, Some(100)).unwrap();
        assert_eq!(r.rhs_terms[SPLIT_LINEAR], 0.0);
        assert_eq!(r.rhs_terms[SPLIT_QUADRATIC], 0.25 * e.tail_l2(100).unwrap().value);
    }

    #[test]
    fn asymptotics_table() {
        let rows = example_asymptotics(&WeightSequence::example(), &[100, 10_000]).unwrap();
        let ratio = rows[0].tail / rows[1].tail;
        assert!((ratio / 2.0 - 1.0).abs() < 0.25, "{ratio}");
        let fin = example_asymptotics(&explicit(&[(5, 1.0), (8, 2.0)]), &[10, 20]).unwrap();
        assert!(fin.iter().all(|r| r.tail == 0.0));
        assert!(example_asymptotics(&WeightSequence::example(), &[100, 50]).is_err());
        assert!(example_asymptotics(&WeightSequence::example(), &[5]).is_err());
    }

    #[test]
    fn convergence_experiment_degenerate_and_atomic() {
        let e = WeightSequence::example();
        let ctx = BoundContext::with_stabilization(
            &e,
            StabilizeOptions {
                max_depth: 22,
                ..default_stabilization()
            },
        )
        .unwrap();
        let rows = convergence_experiment(&ctx, &[5], &[TSchedule::LogNSquared]).unwrap();
        assert_eq!(rows.len(), 1);
        let direct = kolmogorov(&dist_exact(&e, 5).unwrap(), &ctx.law().dist);
        assert_eq!(rows[0].lhs, direct);

        let w = WeightSequence::zero_after(5);
        let ctx = BoundContext::new(&w).unwrap();
        let rows = convergence_experiment(&ctx, &[4, 8, 12, 16], &[TSchedule::Fixed(2.0)]).unwrap();
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.k as f64, r.lhs)).collect();
        assert!(fit_log_slope(&pts).unwrap() < -0.5);
    }
}
