//! Command-line front end shared by the `zeck-ew` binary and the tests.
//!
//! Settings come from flags, then a flat `key = value` config file, then
//! defaults. Exit codes: 0 success, 1 identity failure, 2 invalid
//! configuration, 3 numerical non-convergence.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use crate::bounds::{
    convergence_experiment, example_asymptotics, fitted_constant, master_bound, smoothing_bound,
    split_bound, BoundContext, BoundReport, TSchedule,
};
use crate::charfn::frame::GoldenFrame;
use crate::charfn::phi;
use crate::distribution::{dist_exact, dist_prefix};
use crate::error::{Error, Result};
use crate::numeration::g_u128;
use crate::verify::{run_battery, VerifyOptions};
use crate::weights::WeightSequence;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "zeck-ew", version, about = "Zeckendorf-additive functions: exact laws, characteristic functions, effective bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Randomized identity battery
    Verify,
    /// Characteristic function Phi_k on a grid
    Charfn,
    /// Exact law of f(n), n < G_k or n < N
    Dist,
    /// Smoothing, master and split bound reports
    Bound,
    /// Tables for the built-in example family
    Example,
}

#[derive(Args, Debug, Default, Clone)]
struct Flags {
    /// Weight file with `j value` lines
    #[arg(long, global = true, conflicts_with = "family")]
    weights: Option<PathBuf>,
    /// example | zero | zero-after | constant
    #[arg(long, global = true)]
    family: Option<String>,
    /// Family parameters, e.g. `J=10,c=0.5`
    #[arg(long, global = true)]
    params: Option<String>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long = "N", global = true)]
    n: Option<u128>,
    #[arg(long = "T", global = true)]
    t: Option<f64>,
    #[arg(long = "L", global = true)]
    l: Option<u64>,
    #[arg(long, global = true)]
    h: Option<u64>,
    /// Frequency grid `a:b:n`
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    overwrite: bool,
    /// Flat `key = value` file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, hide = true)]
    corrupt_frame: bool,
}

/// Where the weights come from.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    File(PathBuf),
    Family {
        name: String,
        params: BTreeMap<String, f64>,
    },
}

/// Uniform frequency grid `a:b:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::InvalidParameter(format!("grid must be a:b:n, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].parse().map_err(|_| bad())?;
        let b: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if n == 0 || !a.is_finite() || !b.is_finite() || (n > 1 && b < a) {
            return Err(bad());
        }
        Ok(Grid { a, b, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.a];
        }
        let step = (self.b - self.a) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.a + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Verify,
    Charfn,
    Dist,
    Bound,
    Example,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub weights: WeightSource,
    pub k: usize,
    pub n: Option<u128>,
    pub t: Option<f64>,
    pub l: Option<u64>,
    pub h: Option<u64>,
    pub grid: Grid,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub overwrite: bool,
    pub corrupt_frame: bool,
}

fn parse_params(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("parameter {item:?} is not key=value")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("parameter {key} is not a number")))?;
        out.insert(key.trim().to_string(), v);
    }
    Ok(out)
}

/// Reads a flat `key = value` file; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("config line {}: expected key = value", i + 1))
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    file.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::InvalidParameter(format!("config key {key}: cannot parse {v:?}")))
        })
        .transpose()
}

const CONFIG_KEYS: [&str; 14] = [
    "weights", "family", "params", "k", "N", "T", "L", "h", "grid", "tol", "seed", "out", "overwrite",
    "corrupt_frame",
];

impl RunConfig {
    fn resolve(command: Command, flags: Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        if let Some(key) = file.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!("unknown config key {key:?}")));
        }
        let command = match command {
            Command::Verify => CommandKind::Verify,
            Command::Charfn => CommandKind::Charfn,
            Command::Dist => CommandKind::Dist,
            Command::Bound => CommandKind::Bound,
            Command::Example => CommandKind::Example,
        };

        let weights = match (flags.weights, flags.family) {
            (Some(p), _) => WeightSource::File(p),
            (None, Some(name)) => WeightSource::Family {
                name,
                params: parse_params(flags.params.as_deref().or(file.get("params").map(String::as_str)).unwrap_or(""))?,
            },
            (None, None) => match (file.get("weights"), file.get("family")) {
                (Some(p), _) => WeightSource::File(PathBuf::from(p)),
                (None, name) => WeightSource::Family {
                    name: name.cloned().unwrap_or_else(|| "example".to_string()),
                    params: parse_params(
                        flags.params.as_deref().or(file.get("params").map(String::as_str)).unwrap_or(""),
                    )?,
                },
            },
        };

        let default_k = if command == CommandKind::Example { 25 } else { 20 };
        let grid = match flags.grid.or_else(|| file.get("grid").cloned()) {
            Some(s) => Grid::parse(&s)?,
            None => Grid { a: -1.0, b: 1.0, n: 21 },
        };
        let cfg = RunConfig {
            command,
            weights,
            k: flags.k.or(from_file(&file, "k")?).unwrap_or(default_k),
            n: flags.n.or(from_file(&file, "N")?),
            t: flags.t.or(from_file(&file, "T")?),
            l: flags.l.or(from_file(&file, "L")?),
            h: flags.h.or(from_file(&file, "h")?),
            grid,
            tol: flags.tol.or(from_file(&file, "tol")?).unwrap_or(1e-6),
            seed: flags.seed.or(from_file(&file, "seed")?).unwrap_or(1),
            out: flags.out.or(from_file(&file, "out")?),
            overwrite: flags.overwrite || from_file(&file, "overwrite")?.unwrap_or(false),
            corrupt_frame: flags.corrupt_frame || from_file(&file, "corrupt_frame")?.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if let Some(t) = self.t {
            if !(t > 0.0) || !t.is_finite() {
                return bad(format!("T must be positive, got {t}"));
            }
        }
        if let (Some(l), Some(h)) = (self.l, self.h) {
            if l <= 2 * h {
                return bad(format!("need L > 2h, got L = {l}, h = {h}"));
            }
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.n == Some(0) {
            return bad("N must be at least 1".into());
        }
        Ok(())
    }

    pub fn load_weights(&self) -> Result<WeightSequence> {
        match &self.weights {
            WeightSource::File(p) => {
                let f = fs::File::open(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                WeightSequence::from_reader(BufReader::new(f))
            }
            WeightSource::Family { name, params } => WeightSequence::from_family(name, params),
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoStabilization { .. }
        | Error::Quadrature { .. }
        | Error::NonConvergentTail { .. }
        | Error::AtomCap { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Named output files, written to `--out` or printed.
struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    fn open(cfg: &RunConfig) -> Result<Self> {
        if let Some(dir) = &cfg.out {
            if dir.exists() {
                let nonempty = fs::read_dir(dir)?.next().is_some();
                if nonempty && !cfg.overwrite {
                    return Err(Error::InvalidParameter(format!(
                        "output directory {} is not empty; pass --overwrite",
                        dir.display()
                    )));
                }
            }
            fs::create_dir_all(dir)?;
        }
        Ok(Sink { dir: cfg.out.clone() })
    }

    fn emit(&self, name: &str, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
        match &self.dir {
            Some(d) => fs::write(d.join(name), bytes)?,
            None => stdout.write_all(bytes)?,
        }
        Ok(())
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn jsonl(reports: &[BoundReport]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in reports {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Io(e.to_string()))?;
        out.push(b'\n');
    }
    Ok(out)
}

fn cmd_verify(cfg: &RunConfig, sink: &Sink, stdout: &mut dyn Write) -> Result<i32> {
    let frame = if cfg.corrupt_frame {
        GoldenFrame::corrupted()
    } else {
        GoldenFrame::new()
    };
    let report = run_battery(
        &frame,
        VerifyOptions {
            seed: cfg.seed,
            ..Default::default()
        },
    )?;
    let text = report.to_text();
    sink.emit("verify.txt", text.as_bytes(), stdout)?;
    if sink.dir.is_some() {
        stdout.write_all(text.as_bytes())?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_IDENTITY })
}

fn cmd_charfn(cfg: &RunConfig, sink: &Sink, stdout: &mut dyn Write) -> Result<i32> {
    let seq = cfg.load_weights()?;
    let profile = phi(&seq, cfg.k, &cfg.grid.points());
    let rows = profile.t_grid.iter().zip(&profile.values).map(|(t, z)| {
        vec![t.to_string(), z.re.to_string(), z.im.to_string(), z.norm().to_string()]
    });
    sink.emit("charfn.csv", &csv_table(&["t", "re", "im", "abs"], rows)?, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_dist(cfg: &RunConfig, sink: &Sink, stdout: &mut dyn Write) -> Result<i32> {
    let seq = cfg.load_weights()?;
    let d = match cfg.n {
        Some(n) => dist_prefix(&seq, &BigUint::from(n))?,
        None => dist_exact(&seq, cfg.k)?,
    };
    let mut buf = Vec::new();
    d.write_csv(&mut buf)?;
    sink.emit("dist.csv", &buf, stdout)?;
    Ok(EXIT_OK)
}

fn resolve_n(cfg: &RunConfig) -> Result<u128> {
    match cfg.n {
        Some(n) => Ok(n),
        None => g_u128(cfg.k).ok_or_else(|| Error::InvalidParameter("G_k exceeds u128".into())),
    }
}

fn cmd_bound(cfg: &RunConfig, sink: &Sink, stdout: &mut dyn Write) -> Result<i32> {
    let seq = cfg.load_weights()?;
    let n = resolve_n(cfg)?.max(2);
    let t = cfg.t.unwrap_or_else(|| TSchedule::LogNSquared.value(n));
    let ctx = BoundContext::new(&seq)?;
    let mut reports = Vec::new();
    if t >= 1.0 {
        reports.push(master_bound(&ctx, n, t, cfg.l, cfg.h)?);
        reports.push(smoothing_bound(&ctx, n, t, None)?);
    }
    if t <= 1.0 {
        reports.push(split_bound(&ctx, n, t, None)?);
    }
    sink.emit("bound.jsonl", &jsonl(&reports)?, stdout)?;
    Ok(EXIT_OK)
}

/// Depths of the convergence table: multiples of 5 up to the cap, and the cap.
pub fn example_depths(cap: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (1..).map(|i| 5 * i).take_while(|&k| k <= cap).collect();
    if ks.last() != Some(&cap) && cap > 0 {
        ks.push(cap);
    }
    ks
}

fn cmd_example(cfg: &RunConfig, sink: &Sink, stdout: &mut dyn Write) -> Result<i32> {
    let seq = cfg.load_weights()?;
    let rows = example_asymptotics(&seq, &[100, 1_000, 10_000, 100_000, 1_000_000])?;
    let table = csv_table(
        &["m", "tail_l2", "remainder", "tail_log_m"],
        rows.iter().map(|r| {
            vec![r.m.to_string(), r.tail.to_string(), r.remainder.to_string(), r.tail_log_m.to_string()]
        }),
    )?;
    sink.emit("tail_asymptotics.csv", &table, stdout)?;

    let ctx = BoundContext::new(&seq)?;
    let ks = example_depths(cfg.k);
    let schedule = [TSchedule::LogN, TSchedule::LogNSquared];
    let conv = convergence_experiment(&ctx, &ks, &schedule)?;
    let table = csv_table(
        &["k", "N", "lhs", "best_rhs", "best_T", "ratio"],
        conv.iter().map(|r| {
            vec![
                r.k.to_string(),
                r.n.to_string(),
                r.lhs.to_string(),
                r.best_rhs.to_string(),
                r.best_t.to_string(),
                r.ratio.to_string(),
            ]
        }),
    )?;
    sink.emit("convergence.csv", &table, stdout)?;

    let mut reports = Vec::new();
    for &k in &ks {
        let n = g_u128(k).unwrap().max(2);
        reports.push(master_bound(&ctx, n, TSchedule::LogNSquared.value(n), cfg.l, cfg.h)?);
    }
    let terms: Vec<String> = reports
        .first()
        .map(|r| r.rhs_terms.keys().cloned().collect())
        .unwrap_or_default();
    let mut header = vec!["N", "T", "L", "h", "K", "lhs", "rhs", "fitted_constant"];
    header.extend(terms.iter().map(String::as_str));
    let table = csv_table(
        &header,
        reports.iter().map(|r| {
            let mut row = vec![
                r.params.n.to_string(),
                opt(r.params.t_smooth),
                opt(r.params.l),
                opt(r.params.h),
                opt(r.params.k),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.fitted_constant.to_string(),
            ];
            row.extend(terms.iter().map(|t| r.rhs_terms[t].to_string()));
            row
        }),
    )?;
    sink.emit("bounds.csv", &table, stdout)?;
    if sink.dir.is_some() {
        writeln!(
            stdout,
            "wrote tail_asymptotics.csv, convergence.csv, bounds.csv; fitted constant {}",
            fitted_constant(&conv)
        )?;
    }
    Ok(EXIT_OK)
}

/// Runs a resolved configuration and returns the exit code.
pub fn execute(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let sink = Sink::open(cfg)?;
    match cfg.command {
        CommandKind::Verify => cmd_verify(cfg, &sink, stdout),
        CommandKind::Charfn => cmd_charfn(cfg, &sink, stdout),
        CommandKind::Dist => cmd_dist(cfg, &sink, stdout),
        CommandKind::Bound => cmd_bound(cfg, &sink, stdout),
        CommandKind::Example => cmd_example(cfg, &sink, stdout),
    }
}

/// Parses `args` (program name first) into a [`RunConfig`].
pub fn parse_args<I, S>(args: I) -> std::result::Result<RunConfig, (i32, String)>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        (code, e.to_string())
    })?;
    RunConfig::resolve(cli.command, cli.flags).map_err(|e| (EXIT_CONFIG, format!("error: {e}\n")))
}

/// Entry point of the binary.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_args(args) {
        Ok(c) => c,
        Err((code, msg)) => {
            if code == EXIT_OK {
                print!("{msg}");
            } else {
                eprint!("{msg}");
            }
            return code;
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(&cfg, &mut lock) {
        Ok(code) => {
            if code == EXIT_IDENTITY {
                eprintln!("identity check failed");
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        let mut all = vec!["zeck-ew"];
        all.extend_from_slice(args);
        parse_args(all).unwrap()
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(Grid::parse("0:0:1").unwrap().points(), vec![0.0]);
        assert_eq!(Grid::parse("-1:1:3").unwrap().points(), vec![-1.0, 0.0, 1.0]);
        assert!(Grid::parse("1:0:5").is_err());
        assert!(Grid::parse("0:1:0").is_err());
        assert!(Grid::parse("0:1").is_err());
    }

    #[test]
    fn flags_and_defaults() {
        let c = cfg(&["dist", "--family", "zero-after", "--params", "J=7", "--k", "9"]);
        assert_eq!(c.command, CommandKind::Dist);
        assert_eq!(c.k, 9);
        assert_eq!(
            c.weights,
            WeightSource::Family {
                name: "zero-after".into(),
                params: [("J".to_string(), 7.0)].into_iter().collect()
            }
        );
        let c = cfg(&["example"]);
        assert_eq!(c.k, 25);
        assert_eq!(c.seed, 1);
    }

    #[test]
    fn config_file_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# run\nk = 7\nseed = 42\nfamily = zero\nT = 3\n").unwrap();
        let p = path.to_str().unwrap();
        let c = cfg(&["bound", "--config", p, "--k", "11"]);
        assert_eq!(c.k, 11);
        assert_eq!(c.seed, 42);
        assert_eq!(c.t, Some(3.0));
        assert!(matches!(c.weights, WeightSource::Family { ref name, .. } if name == "zero"));

        fs::write(&path, "bogus = 1\n").unwrap();
        assert!(parse_args(["zeck-ew", "verify", "--config", p]).is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for args in [
            vec!["zeck-ew", "bound", "--T", "-1"],
            vec!["zeck-ew", "bound", "--L", "4", "--h", "2"],
            vec!["zeck-ew", "charfn", "--grid", "1:0:3"],
            vec!["zeck-ew", "dist", "--params", "J"],
            vec!["zeck-ew", "nonsense"],
        ] {
            assert_eq!(parse_args(args).unwrap_err().0, EXIT_CONFIG);
        }
    }

    #[test]
    fn example_depth_list() {
        assert_eq!(example_depths(10), vec![5, 10]);
        assert_eq!(example_depths(12), vec![5, 10, 12]);
        assert_eq!(example_depths(3), vec![3]);
    }

    #[test]
    fn dist_to_stdout() {
        let c = cfg(&["dist", "--family", "zero", "--k", "5"]);
        let mut out = Vec::new();
        assert_eq!(execute(&c, &mut out).unwrap(), EXIT_OK);
        assert_eq!(String::from_utf8(out).unwrap(), "value,mass\n0,1\n");
    }

    #[test]
    fn charfn_at_zero_is_one() {
        let c = cfg(&["charfn", "--grid", "0:0:1", "--k", "12"]);
        let mut out = Vec::new();
        execute(&c, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "t,re,im,abs\n0,1,0,1\n");
    }

    #[test]
    fn refuses_nonempty_out_dir() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("keep"), "x").unwrap();
        let d = dir.path().to_str().unwrap();
        let c = cfg(&["dist", "--family", "zero", "--out", d]);
        let err = execute(&c, &mut Vec::new()).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_CONFIG);
        let c = cfg(&["dist", "--family", "zero", "--out", d, "--overwrite"]);
        assert_eq!(execute(&c, &mut Vec::new()).unwrap(), EXIT_OK);
        assert!(dir.path().join("dist.csv").exists());
    }
}
