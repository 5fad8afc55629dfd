//! Exact laws of `f(n)` for `n` uniform on `[0, G_k)` or `[0, N)`, and the
//! distances between them.
//!
//! Laws are built with the digit recursion `D_{k+1} = D_k + (D_{k-1} shifted by
//! f(F_{k+2}))`, which mirrors the recursion for `H_k`. Masses are carried as
//! integer counts while `G_k` fits in `u128` and as normalized floats beyond.

use std::io::Write;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeration::{fib, g, zeck_encode};
use crate::weights::WeightSequence;

/// Atoms closer than this are treated as one value.
pub const DEFAULT_MERGE_TOL: f64 = 1e-12;
pub const DEFAULT_ATOM_CAP: usize = 8_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistOptions {
    pub merge_tol: f64,
    pub atom_cap: usize,
}

impl Default for DistOptions {
    fn default() -> Self {
        DistOptions {
            merge_tol: DEFAULT_MERGE_TOL,
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

/// Finite law as sorted `(value, mass)` atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

/// Cumulative masses at each atom.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfView {
    pub points: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    /// Sorts, merges ties within `merge_tol` and normalizes.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>, merge_tol: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("distribution without atoms".into()));
        }
        if atoms.iter().any(|&(v, m)| !v.is_finite() || !(m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidParameter("atoms must be finite with mass >= 0".into()));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("total mass must be positive".into()));
        }
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        let mut anchor = f64::NEG_INFINITY;
        for (v, m) in atoms {
            if m == 0.0 {
                continue;
            }
            if v - anchor < merge_tol {
                merged.last_mut().unwrap().1 += m;
            } else {
                anchor = v;
                merged.push((v, m));
            }
        }
        for a in &mut merged {
            a.1 /= total;
        }
        Ok(DiscreteDistribution { atoms: merged })
    }

    pub fn point_mass(v: f64) -> Self {
        DiscreteDistribution {
            atoms: vec![(v, 1.0)],
        }
    }

    /// Equal mass on each listed value.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        Self::from_atoms(values.iter().map(|&v| (v, 1.0)).collect(), DEFAULT_MERGE_TOL)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn max_atom(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).fold(0.0, f64::max)
    }

    pub fn cdf(&self) -> CdfView {
        let mut acc = 0.0;
        CdfView {
            points: self
                .atoms
                .iter()
                .map(|&(v, m)| {
                    acc += m;
                    (v, acc)
                })
                .collect(),
        }
    }

    /// `sum mass * exp(i t value)`.
    pub fn fourier(&self, t: f64) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(v, m)| m * Complex64::new((t * v).cos(), (t * v).sin()))
            .sum()
    }

    /// Writes `value,mass` rows with a header, ascending by value.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["value", "mass"]).map_err(io)?;
        for &(v, m) in &self.atoms {
            w.write_record([v.to_string(), m.to_string()]).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Masses of one recursion layer.
#[derive(Debug, Clone)]
enum Masses {
    /// Exact number of `n` per atom.
    Counts(Vec<u128>),
    /// Normalized probabilities.
    Probs(Vec<f64>),
}

/// Law of `f(n)`, `n < G_k`, as produced by the recursion.
#[derive(Debug, Clone)]
pub struct Layer {
    pub k: usize,
    values: Vec<f64>,
    masses: Masses,
}

impl Layer {
    fn origin() -> Self {
        Layer {
            k: 0,
            values: vec![0.0],
            masses: Masses::Counts(vec![1]),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn to_probs(&self) -> Vec<f64> {
        match &self.masses {
            Masses::Probs(p) => p.clone(),
            Masses::Counts(c) => {
                let total = g(self.k).to_f64().unwrap();
                c.iter().map(|&x| x as f64 / total).collect()
            }
        }
    }

    /// Normalized law; exact integer counts are divided only here.
    pub fn distribution(&self) -> DiscreteDistribution {
        let atoms = match &self.masses {
            Masses::Counts(c) => {
                let total: u128 = c.iter().sum();
                self.values
                    .iter()
                    .zip(c)
                    .map(|(&v, &n)| (v, ratio_u128(n, total)))
                    .collect()
            }
            Masses::Probs(p) => self.values.iter().copied().zip(p.iter().copied()).collect(),
        };
        DiscreteDistribution { atoms }
    }
}

fn ratio_u128(n: u128, d: u128) -> f64 {
    if d < (1u128 << 53) {
        n as f64 / d as f64
    } else {
        // keep the leading bits of both before dividing
        let shift = 128 - d.leading_zeros() - 53;
        (n >> shift) as f64 / (d >> shift) as f64
    }
}

/// Merges two sorted atom lists, the second shifted by `offset`.
fn merge_shifted<M: Copy + std::ops::Add<Output = M>>(
    a_vals: &[f64],
    a_mass: &[M],
    b_vals: &[f64],
    b_mass: &[M],
    offset: f64,
    tol: f64,
) -> (Vec<f64>, Vec<M>) {
    let mut vals = Vec::with_capacity(a_vals.len() + b_vals.len());
    let mut mass: Vec<M> = Vec::with_capacity(a_vals.len() + b_vals.len());
    let (mut i, mut j) = (0, 0);
    let mut anchor = f64::NEG_INFINITY;
    while i < a_vals.len() || j < b_vals.len() {
        let take_a = j >= b_vals.len() || (i < a_vals.len() && a_vals[i] <= b_vals[j] + offset);
        let (v, m) = if take_a {
            i += 1;
            (a_vals[i - 1], a_mass[i - 1])
        } else {
            j += 1;
            (b_vals[j - 1] + offset, b_mass[j - 1])
        };
        if v - anchor < tol {
            let last = mass.last_mut().unwrap();
            *last = *last + m;
        } else {
            anchor = v;
            vals.push(v);
            mass.push(m);
        }
    }
    (vals, mass)
}

/// Streams the layers `D_0, D_1, ...` of the recursion.
pub struct LayerStream<'a> {
    seq: &'a WeightSequence,
    opts: DistOptions,
    prev: Option<Layer>,
    cur: Option<Layer>,
}

impl<'a> LayerStream<'a> {
    pub fn new(seq: &'a WeightSequence, opts: DistOptions) -> Self {
        LayerStream {
            seq,
            opts,
            prev: None,
            cur: None,
        }
    }

    /// The next layer, or an atom-cap error.
    pub fn advance(&mut self) -> Result<&Layer> {
        let next = match (&self.prev, &self.cur) {
            (_, None) => Layer::origin(),
            (None, Some(d0)) => {
                // D_1 = D_0 + (D_{-1} shifted by f(F_2)), D_{-1} = {0}
                let Masses::Counts(c) = &d0.masses else { unreachable!() };
                let (values, counts) = merge_shifted(
                    &d0.values,
                    c,
                    &[0.0],
                    &[1u128],
                    self.seq.value(2),
                    self.opts.merge_tol,
                );
                Layer {
                    k: 1,
                    values,
                    masses: Masses::Counts(counts),
                }
            }
            (Some(dm1), Some(dk)) => self.combine(dm1, dk),
        };
        if next.len() > self.opts.atom_cap {
            return Err(Error::AtomCap {
                cap: self.opts.atom_cap,
                depth: next.k,
            });
        }
        self.prev = self.cur.take();
        self.cur = Some(next);
        Ok(self.cur.as_ref().unwrap())
    }

    fn combine(&self, dm1: &Layer, dk: &Layer) -> Layer {
        let k = dk.k;
        let offset = self.seq.value((k + 2) as u32);
        let tol = self.opts.merge_tol;
        let exact = crate::numeration::g_u128(k + 1).is_some();
        let masses = match (&dk.masses, &dm1.masses, exact) {
            (Masses::Counts(a), Masses::Counts(b), true) => {
                let (values, counts) = merge_shifted(&dk.values, a, &dm1.values, b, offset, tol);
                return Layer {
                    k: k + 1,
                    values,
                    masses: Masses::Counts(counts),
                };
            }
            _ => {
                // G_{k+1} D_{k+1} = G_k D_k + G_{k-1} D_{k-1}
                let r = g_ratio(k);
                let a: Vec<f64> = dk.to_probs().into_iter().map(|p| p * r).collect();
                let b: Vec<f64> = dm1.to_probs().into_iter().map(|p| p * (1.0 - r)).collect();
                merge_shifted(&dk.values, &a, &dm1.values, &b, offset, tol)
            }
        };
        Layer {
            k: k + 1,
            values: masses.0,
            masses: Masses::Probs(masses.1),
        }
    }
}

/// `G_k / G_{k+1}`.
fn g_ratio(k: usize) -> f64 {
    let mut r = 0.5;
    for _ in 0..k {
        r = 1.0 / (1.0 + r);
    }
    r
}

/// Law of `f(n)` for `n` uniform on `[0, G_k)`.
pub fn dist_exact(seq: &WeightSequence, k: usize) -> Result<DiscreteDistribution> {
    dist_exact_with(seq, k, DistOptions::default())
}

pub fn dist_exact_with(
    seq: &WeightSequence,
    k: usize,
    opts: DistOptions,
) -> Result<DiscreteDistribution> {
    let mut stream = LayerStream::new(seq, opts);
    loop {
        let layer = stream.advance()?;
        if layer.k == k {
            return Ok(layer.distribution());
        }
    }
}

/// Law of `f(n)` for `n` uniform on `[0, N)`.
///
/// `[0, N)` splits along the Zeckendorf digits `j_1 > j_2 > ...` of `N` into
/// the blocks `sum_{l<i} F_{j_l} + [0, F_{j_i})`, each a shifted copy of
/// `D_{j_i - 2}`.
pub fn dist_prefix(seq: &WeightSequence, n: &BigUint) -> Result<DiscreteDistribution> {
    dist_prefix_with(seq, n, DistOptions::default())
}

pub fn dist_prefix_with(
    seq: &WeightSequence,
    n: &BigUint,
    opts: DistOptions,
) -> Result<DiscreteDistribution> {
    let digits = zeck_encode(n);
    let Some(top) = digits.top() else {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    };
    let n_f = n.to_f64().unwrap_or(f64::INFINITY);
    let n_u = n.to_u128();
    // layers needed: j - 2 for each digit j, descending
    let mut wanted: Vec<(usize, f64)> = Vec::new();
    let mut offset = 0.0;
    for &j in digits.indices().iter().rev() {
        wanted.push(((j - 2) as usize, offset));
        offset += seq.value(j);
    }
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut stream = LayerStream::new(seq, opts);
    let max_layer = (top - 2) as usize;
    loop {
        let layer = stream.advance()?;
        for &(depth, off) in wanted.iter().filter(|w| w.0 == layer.k) {
            match (&layer.masses, n_u) {
                (Masses::Counts(c), Some(nu)) => {
                    for (&v, &cnt) in layer.values.iter().zip(c) {
                        atoms.push((v + off, ratio_u128(cnt, nu)));
                    }
                }
                _ => {
                    let share = fib(depth + 2).to_f64().unwrap() / n_f;
                    for (v, p) in layer.values.iter().zip(layer.to_probs()) {
                        atoms.push((v + off, p * share));
                    }
                }
            }
        }
        if layer.k >= max_layer {
            break;
        }
    }
    if atoms.len() > opts.atom_cap {
        return Err(Error::AtomCap {
            cap: opts.atom_cap,
            depth: max_layer,
        });
    }
    DiscreteDistribution::from_atoms(atoms, opts.merge_tol)
}

/// `sup_x |F_1(x) - F_2(x)|`, treating locations within `1e-12` as equal.
pub fn kolmogorov(d1: &DiscreteDistribution, d2: &DiscreteDistribution) -> f64 {
    kolmogorov_with_tol(d1, d2, DEFAULT_MERGE_TOL)
}

pub fn kolmogorov_with_tol(d1: &DiscreteDistribution, d2: &DiscreteDistribution, tol: f64) -> f64 {
    let (a, b) = (&d1.atoms, &d2.atoms);
    let (mut i, mut j) = (0, 0);
    let (mut ca, mut cb) = (0.0, 0.0);
    let mut sup: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i].0 <= x + tol {
            ca += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 <= x + tol {
            cb += b[j].1;
            j += 1;
        }
        sup = sup.max((ca - cb).abs());
    }
    sup
}

/// Largest mass of a closed interval of length `lambda`.
pub fn concentration(d: &DiscreteDistribution, lambda: f64) -> f64 {
    let atoms = &d.atoms;
    let slack = DEFAULT_MERGE_TOL;
    let mut best: f64 = 0.0;
    let mut window = 0.0;
    let mut hi = 0;
    for lo in 0..atoms.len() {
        if hi < lo {
            hi = lo;
            window = 0.0;
        }
        while hi < atoms.len() && atoms[hi].0 <= atoms[lo].0 + lambda + slack {
            window += atoms[hi].1;
            hi += 1;
        }
        best = best.max(window);
        window -= atoms[lo].1;
    }
    best.min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dichotomy {
    AtomicSuspected,
    NonAtomicSuspected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub verdict: Dichotomy,
    /// Last index with a nonzero weight, when the family declares one.
    pub support_end: Option<u32>,
    /// Depth of the law used for the concentration profile.
    pub depth: usize,
    /// `(lambda, Q(lambda))` for shrinking `lambda`.
    pub q_decay: Vec<(f64, f64)>,
}

/// Atomic iff the weights vanish eventually, with the empirical decay of
/// the concentration function as supporting evidence.
pub fn dichotomy_probe(seq: &WeightSequence, depth: usize) -> Result<DichotomyReport> {
    if depth < 2 {
        return Err(Error::InvalidParameter("probe depth must be at least 2".into()));
    }
    let support_end = seq.support_end();
    let verdict = if support_end.is_some() {
        Dichotomy::AtomicSuspected
    } else {
        Dichotomy::NonAtomicSuspected
    };
    let k = depth.min(20);
    let d = dist_exact(seq, k)?;
    let q_decay = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&l| (l, concentration(&d, l)))
        .collect();
    Ok(DichotomyReport {
        verdict,
        support_end,
        depth: k,
        q_decay,
    })
}

/// Parameters of the stabilization of `F_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizeOptions {
    pub start: usize,
    pub lag: usize,
    pub eps: f64,
    pub max_depth: usize,
    pub dist: DistOptions,
}

impl Default for StabilizeOptions {
    fn default() -> Self {
        StabilizeOptions {
            start: 8,
            lag: 8,
            eps: 1e-6,
            max_depth: 30,
            dist: DistOptions::default(),
        }
    }
}

/// `F_K` standing in for the limit law.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitLaw {
    pub depth: usize,
    pub dist: DiscreteDistribution,
    /// `kolmogorov(F_{depth - lag}, F_depth)`.
    pub gap: f64,
    pub converged: bool,
}

/// Deepens in steps of `lag` until `kolmogorov(F_{K-lag}, F_K) < eps`, or
/// until `max_depth` or the atom cap is reached.
pub fn stabilized_law(seq: &WeightSequence, opts: StabilizeOptions) -> Result<LimitLaw> {
    if opts.lag == 0 || opts.max_depth < opts.start + opts.lag {
        return Err(Error::InvalidParameter(
            "stabilization needs lag >= 1 and max_depth >= start + lag".into(),
        ));
    }
    let mut stream = LayerStream::new(seq, opts.dist);
    let mut previous: Option<DiscreteDistribution> = None;
    let mut best: Option<LimitLaw> = None;
    loop {
        let layer = match stream.advance() {
            Ok(l) => l,
            Err(Error::AtomCap { .. }) if best.is_some() => break,
            Err(e) => return Err(e),
        };
        let k = layer.k;
        if k < opts.start || (k - opts.start) % opts.lag != 0 {
            continue;
        }
        let d = layer.distribution();
        if let Some(p) = previous.take() {
            let gap = kolmogorov(&p, &d);
            let converged = gap < opts.eps;
            best = Some(LimitLaw {
                depth: k,
                dist: d.clone(),
                gap,
                converged,
            });
            if converged {
                break;
            }
        }
        if k + opts.lag > opts.max_depth {
            break;
        }
        previous = Some(d);
    }
    best.ok_or(Error::AtomCap {
        cap: opts.dist.atom_cap,
        depth: opts.start + opts.lag,
    })
}
