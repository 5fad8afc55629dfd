//! Weight sequences `f(F_j)`, additive evaluation and tail sums.

use std::collections::BTreeMap;
use std::io::BufRead;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeration::{zeck_encode, zeck_encode_u64, ZeckDigits};

/// The values `f(F_j)`, `j >= 2`, of a Zeckendorf-additive function.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSequence {
    /// Finitely many values; every other index is zero.
    Explicit(BTreeMap<u32, f64>),
    /// `(-1)^j / (sqrt(j) log(j + 1))`, square summable but not summable.
    Example,
    /// `base` for `j < cutoff`, zero from `cutoff` on.
    Truncated { cutoff: u32, base: Box<WeightSequence> },
    /// `value` for `2 <= j <= up_to`, zero beyond.
    Constant { value: f64, up_to: u32 },
}

/// Result of a tail summation together with its numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSum {
    pub value: f64,
    /// Half-width of the bracket left by the analytic remainder estimate.
    pub remainder: f64,
    /// Last index summed term by term.
    pub cutoff: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailOptions {
    /// Terms summed directly past the starting index before switching to
    /// the integral-test remainder.
    pub terms: u64,
    /// Largest admissible term at the cutoff.
    pub cauchy_tol: f64,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions {
            terms: 1_000_000,
            cauchy_tol: 1e-6,
        }
    }
}

/// Linear and quadratic parts of a tail split at `|f(F_j)| = 1/T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitTail {
    /// `T * sum |f(F_j)|` over the big-weight indices.
    pub linear: f64,
    /// `T^2 * sum f(F_j)^2` over the remaining indices.
    pub quadratic: f64,
    /// Indices `j > m` with `|f(F_j)| > 1/T`.
    pub big_indices: Vec<u32>,
    /// Numerical error of `quadratic`.
    pub remainder: f64,
}

/// Partial sums of `|f(F_j)|` and `f(F_j)^2` up to `m` and the `l2` tail past `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightDiagnostics {
    pub m: u64,
    pub l1_partial: f64,
    pub l2_partial: f64,
    pub tail_l2: f64,
    pub tail_remainder: f64,
}

const BIG_SCAN_CAP: u64 = 100_000_000;

fn example_value(j: u32) -> f64 {
    let jf = j as f64;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    sign / (jf.sqrt() * (jf + 1.0).ln())
}

fn example_square(j: u64) -> f64 {
    let jf = j as f64;
    let l = (jf + 1.0).ln();
    1.0 / (jf * l * l)
}

impl WeightSequence {
    pub fn zero() -> Self {
        WeightSequence::Explicit(BTreeMap::new())
    }

    pub fn example() -> Self {
        WeightSequence::Example
    }

    /// The example family with every `f(F_j)`, `j >= cutoff`, set to zero.
    pub fn zero_after(cutoff: u32) -> Self {
        WeightSequence::Truncated {
            cutoff,
            base: Box::new(WeightSequence::Example),
        }
    }

    pub fn truncated(base: WeightSequence, cutoff: u32) -> Self {
        WeightSequence::Truncated {
            cutoff,
            base: Box::new(base),
        }
    }

    pub fn constant(value: f64, up_to: u32) -> Self {
        WeightSequence::Constant { value, up_to }
    }

    /// Builds an explicit list, rejecting indices below 2.
    pub fn explicit<I: IntoIterator<Item = (u32, f64)>>(pairs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (j, v) in pairs {
            if j < 2 {
                return Err(Error::IndexBelowTwo(j as u64));
            }
            map.insert(j, v);
        }
        Ok(WeightSequence::Explicit(map))
    }

    /// Reads the `j value` line format. Blank lines and `#` comments are skipped.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            let (Some(js), Some(vs), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::WeightFile {
                    line: lineno,
                    message: "expected two fields: j value".into(),
                });
            };
            let j: u32 = js.parse().map_err(|_| Error::WeightFile {
                line: lineno,
                message: format!("bad index {js:?}"),
            })?;
            if j < 2 {
                return Err(Error::WeightFile {
                    line: lineno,
                    message: format!("index {j} is below 2"),
                });
            }
            let v: f64 = vs.parse().map_err(|_| Error::WeightFile {
                line: lineno,
                message: format!("bad value {vs:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::WeightFile {
                    line: lineno,
                    message: "value is not finite".into(),
                });
            }
            if map.insert(j, v).is_some() {
                return Err(Error::WeightFile {
                    line: lineno,
                    message: format!("duplicate index {j}"),
                });
            }
        }
        Ok(WeightSequence::Explicit(map))
    }

    /// Built-in family by name: `example`, `zero`, `zero-after` (`J`),
    /// `constant` (`c`, `J`).
    pub fn from_family(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let index_param = |key: &str| -> Result<u32> {
            let v = *params
                .get(key)
                .ok_or_else(|| Error::InvalidParameter(format!("family {name} needs {key}")))?;
            if v < 2.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                return Err(Error::InvalidParameter(format!(
                    "{key} must be an integer >= 2, got {v}"
                )));
            }
            Ok(v as u32)
        };
        match name {
            "example" => Ok(WeightSequence::Example),
            "zero" => Ok(WeightSequence::zero()),
            "zero-after" => Ok(WeightSequence::zero_after(index_param("J")?)),
            "constant" => {
                let c = *params
                    .get("c")
                    .ok_or_else(|| Error::InvalidParameter("family constant needs c".into()))?;
                Ok(WeightSequence::constant(c, index_param("J")?))
            }
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }

    /// `f(F_j)`; indices below 2 are rejected.
    pub fn weight(&self, j: u64) -> Result<f64> {
        if j < 2 {
            return Err(Error::IndexBelowTwo(j));
        }
        Ok(self.value(j.min(u32::MAX as u64) as u32))
    }

    /// `f(F_j)` with `j < 2` read as zero.
    #[inline]
    pub fn value(&self, j: u32) -> f64 {
        if j < 2 {
            return 0.0;
        }
        match self {
            WeightSequence::Explicit(map) => map.get(&j).copied().unwrap_or(0.0),
            WeightSequence::Example => example_value(j),
            WeightSequence::Truncated { cutoff, base } => {
                if j >= *cutoff {
                    0.0
                } else {
                    base.value(j)
                }
            }
            WeightSequence::Constant { value, up_to } => {
                if j <= *up_to {
                    *value
                } else {
                    0.0
                }
            }
        }
    }

    /// Largest index carrying a nonzero weight, or `None` when infinitely many do.
    pub fn support_end(&self) -> Option<u32> {
        match self {
            WeightSequence::Explicit(map) => Some(
                map.iter()
                    .rev()
                    .find(|(_, &v)| v != 0.0)
                    .map(|(&j, _)| j)
                    .unwrap_or(1),
            ),
            WeightSequence::Example => None,
            WeightSequence::Truncated { cutoff, base } => {
                let end = cutoff.saturating_sub(1).max(1);
                Some(base.support_end().map_or(end, |b| b.min(end)))
            }
            WeightSequence::Constant { value, up_to } => {
                Some(if *value == 0.0 { 1 } else { (*up_to).max(1) })
            }
        }
    }

    /// Whether the family declares `f(F_j) = 0` for all large `j`.
    pub fn eventually_vanishes(&self) -> bool {
        self.support_end().is_some()
    }

    pub fn eval_digits(&self, d: &ZeckDigits) -> f64 {
        d.indices().iter().map(|&j| self.value(j)).fold(0.0, |a, b| a + b)
    }

    /// `f(n)` for machine-word `n`.
    pub fn eval_f(&self, n: u64) -> f64 {
        self.eval_digits(&zeck_encode_u64(n))
    }

    pub fn eval_f_big(&self, n: &BigUint) -> f64 {
        self.eval_digits(&zeck_encode(n))
    }

    /// `sum_{2 <= j <= m} |f(F_j)|`.
    pub fn l1_partial(&self, m: u64) -> f64 {
        self.partial(m, |v| v.abs())
    }

    /// `sum_{2 <= j <= m} f(F_j)^2`.
    pub fn l2_partial(&self, m: u64) -> f64 {
        self.partial(m, |v| v * v)
    }

    fn partial(&self, m: u64, map: impl Fn(f64) -> f64) -> f64 {
        let end = match self.support_end() {
            Some(e) => m.min(e as u64),
            None => m,
        };
        // small terms first
        (2..=end.min(u32::MAX as u64))
            .rev()
            .map(|j| map(self.value(j as u32)))
            .fold(0.0, |a, b| a + b)
    }

    /// `sum_{j > m} f(F_j)^2` with default options.
    pub fn tail_l2(&self, m: u64) -> Result<TailSum> {
        self.tail_l2_with(m, TailOptions::default())
    }

    pub fn tail_l2_with(&self, m: u64, opts: TailOptions) -> Result<TailSum> {
        if let Some(end) = self.support_end() {
            let value = ((m + 1)..=(end as u64))
                .rev()
                .map(|j| {
                    let v = self.value(j as u32);
                    v * v
                })
                .fold(0.0, |a, b| a + b);
            return Ok(TailSum {
                value,
                remainder: 0.0,
                cutoff: (end as u64).max(m),
            });
        }
        match self {
            WeightSequence::Example => {
                let cutoff = m + opts.terms.max(1);
                let last_term = example_square(cutoff);
                if !(last_term < opts.cauchy_tol) {
                    return Err(Error::NonConvergentTail { cutoff, last_term });
                }
                let direct: f64 = ((m + 1)..=cutoff).rev().map(example_square).sum();
                let c = cutoff as f64;
                let l1 = (c + 1.0).ln();
                let upper = 1.0 / l1 + 1.0 / (c * l1 * l1);
                let lower = 1.0 / (c + 2.0).ln();
                Ok(TailSum {
                    value: direct + 0.5 * (upper + lower),
                    remainder: 0.5 * (upper - lower),
                    cutoff,
                })
            }
            // every other variant has finite support
            _ => unreachable!("infinite support only for the example family"),
        }
    }

    /// Indices `j > m` with `|f(F_j)| > threshold`.
    pub fn big_indices(&self, m: u64, threshold: f64) -> Result<Vec<u32>> {
        if let Some(end) = self.support_end() {
            return Ok(((m + 1)..=(end as u64))
                .map(|j| j as u32)
                .filter(|&j| self.value(j).abs() > threshold)
                .collect());
        }
        // |f(F_j)| is strictly decreasing for the example family
        let mut out = Vec::new();
        let mut j = (m + 1).max(2);
        while self.value(j as u32).abs() > threshold {
            out.push(j as u32);
            j += 1;
            if j - m > BIG_SCAN_CAP {
                return Err(Error::InfiniteBigWeightSet { threshold });
            }
        }
        Ok(out)
    }

    /// Split of the tail past `m` at `|f(F_j)| = 1/T`.
    pub fn split_tail(&self, m: u64, t: f64) -> Result<SplitTail> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("T must be positive, got {t}")));
        }
        let threshold = 1.0 / t;
        let big = self.big_indices(m, threshold)?;
        let linear = t * big.iter().map(|&j| self.value(j).abs()).fold(0.0, |a, b| a + b);
        let (quad_sum, remainder) = if self.support_end().is_some() {
            let s: f64 = self
                .tail_l2(m)?
                .value
                - big.iter().map(|&j| self.value(j).powi(2)).sum::<f64>();
            (s.max(0.0), 0.0)
        } else {
            // the big set is a contiguous run starting at m + 1
            let start = big.last().map_or(m, |&j| j as u64);
            let tail = self.tail_l2(start)?;
            (tail.value, tail.remainder)
        };
        Ok(SplitTail {
            linear,
            quadratic: t * t * quad_sum,
            big_indices: big,
            remainder: t * t * remainder,
        })
    }

    pub fn diagnostics(&self, m: u64) -> Result<WeightDiagnostics> {
        let tail = self.tail_l2(m)?;
        Ok(WeightDiagnostics {
            m,
            l1_partial: self.l1_partial(m),
            l2_partial: self.l2_partial(m),
            tail_l2: tail.value,
            tail_remainder: tail.remainder,
        })
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            WeightSequence::Explicit(map) => format!("explicit({} entries)", map.len()),
            WeightSequence::Example => "example".into(),
            WeightSequence::Truncated { cutoff, base } => {
                format!("{}, zero from j={cutoff}", base.label())
            }
            WeightSequence::Constant { value, up_to } => format!("constant {value} up to j={up_to}"),
        }
    }
}
