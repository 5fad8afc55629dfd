//! Randomized battery of the exact algebraic identities behind the paired-block
//! factorization.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::charfn::block::{reconstruction_error, BlockDecomposition};
use crate::charfn::frame::GoldenFrame;
use crate::charfn::{nilpotent_check, step_matrix};
use crate::error::Result;
use crate::weights::WeightSequence;

pub const NILPOTENT: &str = "Delta_{2k+1}·Delta_{2k} = 0";
pub const B11_LINEAR: &str = "(B~_k)11 = alpha^2 + (alpha/sqrt5)(delta_2k + delta_2k+1)";
pub const R11_EXACT: &str = "(R_k)11 = exp(-theta)(1 + theta) - 1";
pub const R11_QUADRATIC: &str = "|(R_k)11| <= 2 t^2 V_k";
pub const RECONSTRUCTION: &str = "paired product reconstruction";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    /// Frequencies are drawn from `[-t_max, t_max]`.
    pub t_max: f64,
    /// Weights are drawn from `[-w_max, w_max]`.
    pub w_max: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            trials: 10_000,
            t_max: 1.0,
            w_max: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub trials: usize,
    pub tolerance: f64,
    pub worst: f64,
    pub passed: bool,
    /// False for bounds checked as a ratio rather than an exact identity.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub results: Vec<IdentityResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn first_failure(&self) -> Option<&IdentityResult> {
        self.results.iter().find(|r| !r.passed)
    }

    /// Worst deviation among the exact identities.
    pub fn worst_deviation(&self) -> f64 {
        self.results
            .iter()
            .filter(|r| r.exact)
            .map(|r| r.worst)
            .fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.results.iter().find(|r| r.name == name)
    }

    /// Fixed-layout text, identical for identical seeds.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "seed {}", self.seed).unwrap();
        for r in &self.results {
            writeln!(
                s,
                "{} {} trials={} tol={:e} worst={:e}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.trials,
                r.tolerance,
                r.worst
            )
            .unwrap();
        }
        match self.first_failure() {
            None => writeln!(s, "all identities hold, worst deviation {:e}", self.worst_deviation()),
            Some(r) => writeln!(s, "first failure: {}", r.name),
        }
        .unwrap();
        s
    }
}

fn result(name: &str, trials: usize, tolerance: f64, worst: f64) -> IdentityResult {
    IdentityResult {
        name: name.to_string(),
        trials,
        tolerance,
        worst,
        passed: worst <= tolerance,
        exact: true,
    }
}

/// Runs the battery against the given frame.
pub fn run_battery(frame: &GoldenFrame, opts: VerifyOptions) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut results = Vec::new();

    for c in frame.checks() {
        results.push(result(c.name, 1, 1e-13, c.deviation));
    }

    let n = opts.trials;
    let (mut nil, mut b11, mut r11, mut quad) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let k = rng.gen_range(1..500usize);
        let t = rng.gen_range(-opts.t_max..=opts.t_max);
        let we = rng.gen_range(-opts.w_max..=opts.w_max);
        let wo = rng.gen_range(-opts.w_max..=opts.w_max);

        let seq = WeightSequence::explicit([(2 * k as u32 + 2, we), (2 * k as u32 + 3, wo)])?;
        let even = step_matrix(&seq, 2 * k, t)?;
        let odd = step_matrix(&seq, 2 * k + 1, t)?;
        nil = nil.max(nilpotent_check(&odd, &even));

        let b = BlockDecomposition::from_weights(frame, k, t, we, wo);
        b11 = b11.max((b.b_tilde.at(1, 1) - b.b11_closed_form(frame)).norm());
        r11 = r11.max((b.r.at(1, 1) - b.r11_closed_form()).norm());
        let v = we * we + wo * wo;
        if t != 0.0 && v > 0.0 {
            quad = quad.max(b.r.at(1, 1).norm() / (2.0 * t * t * v));
        }
    }
    results.push(result(NILPOTENT, n, 1e-30, nil));
    results.push(result(B11_LINEAR, n, 1e-12, b11));
    results.push(result(R11_EXACT, n, 1e-12, r11));
    // ratio to the bound, passes at <= 1
    results.push(IdentityResult {
        exact: false,
        ..result(R11_QUADRATIC, n, 1.0, quad)
    });

    let example = WeightSequence::example();
    let spans = (n / 100).max(1);
    let mut rec = 0.0f64;
    for _ in 0..spans {
        let first = rng.gen_range(2..40usize);
        let last = first + rng.gen_range(0..=40usize);
        let t = rng.gen_range(-opts.t_max..=opts.t_max);
        rec = rec.max(reconstruction_error(frame, &example, first, last, t)?);
    }
    results.push(result(RECONSTRUCTION, spans, 1e-9, rec));

    Ok(VerifyReport {
        seed: opts.seed,
        results,
    })
}
