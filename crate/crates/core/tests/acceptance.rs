//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zeck_ew::bounds::{
    convergence_experiment, fit_log_slope, fitted_constant, phi_gap, BoundContext, TSchedule,
};
use zeck_ew::charfn::block::{reconstruction_error, RemainderFit};
use zeck_ew::charfn::frame::CHECK_DIAGONALIZES;
use zeck_ew::charfn::{h_bruteforce, h_matrix, h_scalar, phi_value, BlockDecomposition, GoldenFrame};
use zeck_ew::distribution::{dist_exact, DiscreteDistribution};
use zeck_ew::verify::{run_battery, VerifyOptions, B11_LINEAR, NILPOTENT, R11_EXACT};
use zeck_ew::weights::WeightSequence;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn run(id: &str, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            o.passed = false;
            o.detail.push_str(&format!("; runtime {elapsed:.2?} exceeds {limit:?}"));
        }
    }
    println!(
        "{} criterion {id} ({title}): {} [{elapsed:.2?}]",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail
    );
    o.passed
}

// Independent oracles: greedy Zeckendorf digits from a local Fibonacci table.

fn local_fibs() -> Vec<u64> {
    let mut f = vec![0u64, 1];
    while f.len() < 90 {
        let n = f.len();
        f.push(f[n - 1] + f[n - 2]);
    }
    f
}

fn oracle_digits(fibs: &[u64], mut n: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut j = fibs.len() - 1;
    while n > 0 {
        while fibs[j] > n {
            j -= 1;
        }
        out.push(j);
        n -= fibs[j];
        j -= 2;
    }
    out
}

fn oracle_values(seq: &WeightSequence, k: usize) -> Vec<f64> {
    let fibs = local_fibs();
    (0..fibs[k + 2])
        .map(|n| {
            oracle_digits(&fibs, n)
                .iter()
                .map(|&j| seq.value(j as u32))
                .sum::<f64>()
        })
        .collect()
}

fn oracle_h(seq: &WeightSequence, k: usize, t: f64) -> Complex64 {
    oracle_values(seq, k)
        .iter()
        .map(|v| Complex64::new((t * v).cos(), (t * v).sin()))
        .sum()
}

fn oracle_law(seq: &WeightSequence, k: usize) -> Vec<(f64, f64)> {
    let mut vals = oracle_values(seq, k);
    let total = vals.len() as f64;
    vals.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for v in vals {
        match out.last_mut() {
            Some(last) if v - last.0 < 1e-12 => last.1 += 1.0,
            _ => out.push((v, 1.0)),
        }
    }
    out.into_iter().map(|(v, c)| (v, c / total)).collect()
}

fn random_weights(rng: &mut ChaCha8Rng, up_to: u32) -> WeightSequence {
    WeightSequence::explicit((2..=up_to).map(|j| (j, rng.gen_range(-2.0..2.0)))).unwrap()
}

fn law_deviation(d: &DiscreteDistribution, oracle: &[(f64, f64)]) -> f64 {
    if d.len() != oracle.len() {
        return f64::INFINITY;
    }
    d.atoms()
        .iter()
        .zip(oracle)
        .map(|(a, b)| {
            if (a.0 - b.0).abs() > 1e-9 {
                f64::INFINITY
            } else {
                (a.1 - b.1).abs()
            }
        })
        .fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let report = run_battery(&GoldenFrame::new(), VerifyOptions::default()).unwrap();
    let worst = |name: &str| report.get(name).unwrap().worst;
    let frame_names = [CHECK_DIAGONALIZES, "det P = sqrt5", "||A||_A = alpha", "||A^2||_A = alpha^2"];
    let frame_worst = frame_names.iter().map(|n| worst(n)).fold(0.0, f64::max);
    let trials = report.get(NILPOTENT).unwrap().trials;
    let ok = trials >= 10_000
        && worst(NILPOTENT) <= 1e-30
        && worst(B11_LINEAR) <= 1e-12
        && worst(R11_EXACT) <= 1e-12
        && frame_worst <= 1e-13;
    outcome(
        ok,
        format!(
            "{trials} trials; nilpotent {:e}, B11 {:e}, R11 {:e}, frame {:e}",
            worst(NILPOTENT),
            worst(B11_LINEAR),
            worst(R11_EXACT),
            frame_worst
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fibs = local_fibs();
    let mut worst_rel: f64 = 0.0;
    for _ in 0..200 {
        let k = rng.gen_range(0..=20usize);
        let t = rng.gen_range(-3.0..3.0);
        let seq = random_weights(&mut rng, k as u32 + 1);
        let oracle = oracle_h(&seq, k, t);
        let brute = h_bruteforce(&seq, k, t).unwrap();
        let g = fibs[k + 2] as f64;
        for v in [h_scalar(&seq, k, t), h_matrix(&seq, k, t), brute] {
            worst_rel = worst_rel.max((v - oracle).norm() / g);
        }
        worst_rel = worst_rel.max((h_scalar(&seq, k, t) - brute).norm() / g);
        worst_rel = worst_rel.max((h_matrix(&seq, k, t) - brute).norm() / g);
    }
    let mut worst_atom: f64 = 0.0;
    for k in 0..=18 {
        for seq in [WeightSequence::example(), random_weights(&mut rng, k as u32 + 1)] {
            let d = dist_exact(&seq, k).unwrap();
            worst_atom = worst_atom.max(law_deviation(&d, &oracle_law(&seq, k)));
        }
    }
    outcome(
        worst_rel < 1e-9 && worst_atom < 1e-10,
        format!("max |H - H_brute| / G_k = {worst_rel:e}; max atom error {worst_atom:e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid: Vec<f64> = (0..50).map(|i| -2.0 + 4.0 * i as f64 / 49.0).collect();
    let mut worst: f64 = 0.0;
    for k in 0..=18 {
        for seq in [WeightSequence::example(), random_weights(&mut rng, k as u32 + 1)] {
            let d = dist_exact(&seq, k).unwrap();
            for &t in &grid {
                worst = worst.max((d.fourier(t) - phi_value(&seq, k, t)).norm());
            }
        }
    }
    outcome(worst < 1e-9, format!("max |sum mass e^(itv) - Phi_k(t)| = {worst:e}"))
}

fn criterion_4() -> Outcome {
    let frame = GoldenFrame::new();
    let e = WeightSequence::example();
    let ts = [-1.0, -0.55, -0.1, 0.3, 0.75, 1.0];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for first in 2..=42 {
        for span in 0..=40 {
            for &t in &ts {
                worst = worst.max(reconstruction_error(&frame, &e, first, first + span, t).unwrap());
                cases += 1;
            }
        }
    }
    outcome(worst < 1e-9, format!("{cases} spans, max relative entry error {worst:e}"))
}

fn criterion_5() -> Outcome {
    let frame = GoldenFrame::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut fit = RemainderFit::default();
    while fit.samples < 10_000 {
        let t: f64 = rng.gen_range(-1.0..1.0);
        let (we, wo) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = BlockDecomposition::from_weights(&frame, rng.gen_range(1..1000), t, we, wo);
        fit.observe(&frame, &b, we, wo);
    }
    let ok = fit.quadratic_constant <= 2.0 && fit.adapted_constant.is_finite();
    outcome(
        ok,
        format!(
            "{} points; max |R11| / (t^2 V) = {:.4}; fitted C' = {:.4}",
            fit.samples, fit.quadratic_constant, fit.adapted_constant
        ),
    )
}

fn criterion_6() -> Outcome {
    let alpha = 0.5 * (1.0 + 5f64.sqrt());
    let grid: Vec<f64> = (0..41).map(|i| -1.0 + 0.05 * i as f64).collect();
    let w = WeightSequence::zero_after(5);
    let pts: Vec<(f64, f64)> = (5..=30)
        .map(|k| (k as f64, phi_gap(&w, k, 120, &grid).unwrap()))
        .collect();
    let slope = fit_log_slope(&pts).unwrap();
    let expected = -2.0 * alpha.ln();
    let rel = (slope / expected - 1.0).abs();
    outcome(
        rel < 0.15,
        format!("slope {slope:.5} vs -2 ln alpha = {expected:.5} (relative error {rel:.2e})"),
    )
}

fn criterion_7() -> Outcome {
    let e = WeightSequence::example();
    let mut products = Vec::new();
    for m in [1_000u64, 10_000, 100_000, 1_000_000] {
        let tail = e.tail_l2(m).unwrap().value;
        products.push(tail * (m as f64).ln());
    }
    let ratio = e.l1_partial(1_000_000) / e.l1_partial(100);
    let ok = products.iter().all(|p| (0.5..=2.0).contains(p)) && ratio > 10.0;
    outcome(ok, format!("tail * ln m = {products:.4?}; l1 ratio {ratio:.2}"))
}

fn criterion_8() -> Outcome {
    let ctx = BoundContext::new(&WeightSequence::example()).unwrap();
    let rows = convergence_experiment(
        &ctx,
        &[10, 15, 20, 25],
        &[TSchedule::LogN, TSchedule::LogNSquared],
    )
    .unwrap();
    let c = fitted_constant(&rows);
    let dominated = c.is_finite() && c > 0.0 && rows.iter().all(|r| r.lhs <= c * r.best_rhs);
    let worst_rise = rows
        .windows(2)
        .map(|w| w[1].lhs - w[0].lhs)
        .fold(f64::NEG_INFINITY, f64::max);
    let monotone = worst_rise <= 1e-3;
    let lhs: Vec<f64> = rows.iter().map(|r| r.lhs).collect();
    outcome(
        dominated && monotone,
        format!(
            "F_stab depth {} (gap {:.2e}); lhs {lhs:.5?}; single constant {c:.4} dominates: {dominated}; largest rise {worst_rise:.2e} (allowed 1e-3)",
            ctx.law().depth,
            ctx.law().gap
        ),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_zeck-ew"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let (c1, v1) = run_cli(&["verify", "--seed", "7"]);
    let (c2, v2) = run_cli(&["verify", "--seed", "7"]);
    let verify_same = c1 == 0 && c2 == 0 && v1 == v2 && !v1.is_empty();

    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let (e1, _) = run_cli(&["example", "--seed", "7", "--k", "15", "--out", a.to_str().unwrap()]);
    let (e2, _) = run_cli(&["example", "--seed", "7", "--k", "15", "--out", b.to_str().unwrap()]);
    let (fa, fb) = (dir_bytes(&a), dir_bytes(&b));
    let example_same = e1 == 0 && e2 == 0 && fa.len() == 3 && fa == fb;
    outcome(
        verify_same && example_same,
        format!(
            "verify identical: {verify_same}; example identical over {} files: {example_same}",
            fa.len()
        ),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run("1", "identity battery", Some(secs(5)), criterion_1),
        run("2", "oracle equivalence", Some(secs(60)), criterion_2),
        run("3", "Fourier consistency", Some(secs(30)), criterion_3),
        run("4", "factorization reconstruction", Some(secs(10)), criterion_4),
        run("5", "quadratic remainder", None, criterion_5),
        run("6", "atomic geometric decay", Some(secs(10)), criterion_6),
        run("7", "example tail asymptotics", Some(secs(30)), criterion_7),
        run("8", "end-to-end bound sanity", Some(secs(300)), criterion_8),
        run("9", "CLI determinism", None, criterion_9),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
