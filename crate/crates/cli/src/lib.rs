//! The `rezeta` command-line tool.
//!
//! [`run`] parses arguments, dispatches to a subcommand and returns the
//! process exit code: 0 on success, 2 on a usage error (bad flags or
//! arguments outside a routine's domain), 1 when a computation fails.

pub mod checkpoint;
pub mod format;
pub mod reference;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rezeta::mc::{self, ModelConfig, TailDiagnostics};
use rezeta::precision::digits_to_bits;
use rezeta::rootfind::Strategy;
use rezeta::scan::{self, Certification, NegativeWindow, ScanConfig, ScanReport, Scanner};
use rezeta::serde_float::to_decimal;
use rezeta::sigma0::{self, Method};
use rezeta::{PrecisionContext, Tolerance};
use rug::Float;
use serde::Serialize;
use serde_json::json;

use checkpoint::{CheckpointRecord, CheckpointWriter};
use reference::REFERENCE_MINIMA;

/// Version of every JSON document and checkpoint record.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "rezeta", version, about = "Sign structure of Re ζ(s) for Re s >= 1")]
pub struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "REZETA_THREADS")]
    pub threads: Option<usize>,
    /// Write results to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Directory for checkpoint files; relative `--checkpoint` paths are
    /// resolved against it.
    #[arg(long, global = true, env = "REZETA_CHECKPOINT_DIR")]
    pub checkpoint_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute σ₀, the root of Σ_p arcsin(p^-σ) = π/2, to the requested digits.
    Sigma0(Sigma0Args),
    /// Evaluate the prime zeta function P(σ) with a guaranteed error bound.
    PrimeZeta(PrimeZetaArgs),
    /// Find the windows where Re ζ(1+it) < 0 in a range of t.
    Scan(ScanArgs),
    /// Prove Re ζ(1+it) > 0 on a range with the maximum slope principle.
    Certify(CertifyArgs),
    /// Monte Carlo estimate of the density of Re ζ(σ+it) < 0.
    Mc(McArgs),
    /// Recompute the first rows of the list of negative minima.
    Table(TableArgs),
}

#[derive(Debug, Args)]
pub struct Sigma0Args {
    #[arg(long, default_value_t = 100)]
    pub digits: u32,
    /// Series for f(σ): `arcsin` or `logzeta`.
    #[arg(long, default_value = "logzeta")]
    pub method: Method,
    /// Zero finder: `bisect`, `hybrid` or `convex`.
    #[arg(long, default_value = "hybrid")]
    pub strategy: Strategy,
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    pub emit: Emit,
}

#[derive(Debug, Args)]
pub struct PrimeZetaArgs {
    /// Argument, parsed at full working precision (e.g. `3` or `1.1`).
    #[arg(long)]
    pub sigma: String,
    /// Absolute accuracy 10^-digits.
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    pub emit: Emit,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 0.01)]
    pub coarse_step: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub refine_tol: f64,
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    pub emit: Emit,
    /// Append progress to this JSON-lines file and resume from it.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Certify Re ζ > 0 between the windows found.
    #[arg(long)]
    pub certify_gaps: bool,
    /// Angular margin used by `--certify-gaps`.
    #[arg(long, default_value_t = scan::DEFAULT_MARGIN)]
    pub margin: f64,
    /// Grid intervals per work unit.
    #[arg(long, default_value_t = 2000, hide = true)]
    pub chunk_len: u64,
    /// Stop after this many chunks (to exercise resuming).
    #[arg(long, hide = true)]
    pub stop_after_chunks: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = scan::DEFAULT_MARGIN)]
    pub margin: f64,
    /// Give up when the certified step falls below this.
    #[arg(long, default_value_t = scan::DEFAULT_MIN_STEP)]
    pub min_step: f64,
    /// Include every step in JSON output.
    #[arg(long)]
    pub steps: bool,
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    pub emit: Emit,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Required unless `--long-run` is given.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Required unless `--long-run` is given (which defaults to 10^9).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent generator streams; results do not depend on the
    /// thread count.
    #[arg(long, default_value_t = 64)]
    pub streams: u32,
    /// Largest prime in the random Euler product.
    #[arg(long, default_value_t = mc::DEFAULT_CUTOFF)]
    pub cutoff: u64,
    /// Run the σ ∈ {1, 1.01, 1.02} estimates (or `--sigma`) with 10^9
    /// trials unless `--trials` says otherwise.
    #[arg(long)]
    pub long_run: bool,
    #[arg(long, value_enum, default_value_t = Emit::Json)]
    pub emit: Emit,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Number of rows, at most 50.
    #[arg(long, default_value_t = 5)]
    pub rows: usize,
    /// Scan upward from t = 10 instead of around the listed heights.
    #[arg(long)]
    pub full: bool,
    /// Upper end of the `--full` scan.
    #[arg(long, default_value_t = 16_700_000.0)]
    pub to: f64,
    #[arg(long, default_value_t = 0.01)]
    pub coarse_step: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub refine_tol: f64,
    /// Checkpoint file for `--full`.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Emit::Csv)]
    pub emit: Emit,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Computation(String),
}

impl From<rezeta::Error> for Failure {
    fn from(e: rezeta::Error) -> Self {
        use rezeta::Error::*;
        match e {
            Domain { .. } | Pole { .. } | Capacity { .. } | Precision { .. } | Config(_) => Failure::Usage(e.to_string()),
            NoSignChange { .. } | NonFinite { .. } | Inconsistent(_) => Failure::Computation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Computation(e.to_string())
    }
}

impl From<checkpoint::CheckpointError> for Failure {
    fn from(e: checkpoint::CheckpointError) -> Self {
        match e {
            checkpoint::CheckpointError::Mismatch(_) => Failure::Usage(e.to_string()),
            _ => Failure::Computation(e.to_string()),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Computation(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Runs the tool on the process arguments with the standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] writing to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    // Commands write into buffers so that they can run inside a thread
    // pool; output assembly stays on this thread.
    let mut buf = Vec::new();
    let mut notes = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut buf, &mut notes)),
            Err(e) => Err(Failure::Computation(e.to_string())),
        },
        None => dispatch(&cli, &mut buf, &mut notes),
    };
    let _ = err.write_all(&notes);
    let result = result.and_then(|()| deliver(&cli, &buf, out));
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Computation(msg)) => {
            let _ = writeln!(err, "computation failed: {msg}");
            1
        }
    }
}

fn dispatch(cli: &Cli, buf: &mut Vec<u8>, notes: &mut Vec<u8>) -> Outcome {
    match &cli.command {
        Command::Sigma0(a) => cmd_sigma0(a, buf),
        Command::PrimeZeta(a) => cmd_prime_zeta(a, buf),
        Command::Scan(a) => cmd_scan(a, cli.checkpoint_dir.as_deref(), buf, notes),
        Command::Certify(a) => cmd_certify(a, buf),
        Command::Mc(a) => cmd_mc(a, buf),
        Command::Table(a) => cmd_table(a, cli.checkpoint_dir.as_deref(), buf, notes),
    }
}

fn deliver(cli: &Cli, buf: &[u8], out: &mut dyn Write) -> Outcome {
    match &cli.output {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(buf)?;
            f.flush()?;
        }
        None => {
            out.write_all(buf)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn reject(emit: Emit, allowed: &[Emit], command: &str) -> Outcome {
    if allowed.contains(&emit) {
        Ok(())
    } else {
        Err(usage(format!("{command} does not support --emit {emit:?}").to_lowercase()))
    }
}

fn write_json<T: Serialize>(out: &mut Vec<u8>, value: &T) -> Outcome {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::Computation(e.to_string()))?;
    out.push(b'\n');
    Ok(())
}

/// `2^log2` in scientific notation, also for values below the `f64` range.
fn sci_from_log2(log2: f64) -> String {
    let log10 = log2 * std::f64::consts::LOG10_2;
    let e = log10.floor();
    format!("{:.2}e{}", 10f64.powf(log10 - e), e as i64)
}

fn cmd_sigma0(a: &Sigma0Args, out: &mut Vec<u8>) -> Outcome {
    reject(a.emit, &[Emit::Text, Emit::Json], "sigma0")?;
    let sol = sigma0::solve_sigma0(a.digits, a.method, a.strategy)?;
    let width = sol.width();
    let width_str = sci_from_log2(width.clone().log2().to_f64());
    match a.emit {
        Emit::Json => write_json(
            out,
            &json!({
                "schema": SCHEMA,
                "digits": sol.digits,
                "value": sol.value,
                "enclosure": {
                    "lo": to_decimal(&sol.bracket.lo),
                    "hi": to_decimal(&sol.bracket.hi),
                    "width": width_str,
                },
                "method": sol.method,
                "strategy": sol.strategy,
                "bits": sol.bits,
                "evaluations": sol.evaluations,
                "iterations": sol.iterations,
            }),
        ),
        _ => {
            writeln!(out, "{}", sol.value)?;
            writeln!(out, "enclosure width  {width_str}")?;
            writeln!(out, "evaluations      {}", sol.evaluations)?;
            writeln!(out, "iterations       {}", sol.iterations)?;
            writeln!(
                out,
                "method {}, strategy {}, {} bits",
                json!(sol.method).as_str().unwrap_or_default(),
                json!(sol.strategy).as_str().unwrap_or_default(),
                sol.bits
            )?;
            Ok(())
        }
    }
}

fn cmd_prime_zeta(a: &PrimeZetaArgs, out: &mut Vec<u8>) -> Outcome {
    reject(a.emit, &[Emit::Text, Emit::Json], "prime-zeta")?;
    if a.digits == 0 || a.digits > sigma0::MAX_DIGITS {
        return Err(usage(format!("--digits must be in 1..={}", sigma0::MAX_DIGITS)));
    }
    let ctx = PrecisionContext::with_bits(digits_to_bits(a.digits))?;
    let parsed = Float::parse(a.sigma.trim()).map_err(|e| usage(format!("--sigma {:?}: {e}", a.sigma)))?;
    let sigma = Float::with_val(ctx.working_bits(), parsed);
    let eps = Tolerance::from_decimal_digits(a.digits);
    let v = rezeta::prime_zeta::prime_zeta(&sigma, eps, &ctx)?;
    let shown = format::fixed_float(&v.value, a.digits);
    let bound = sci_from_log2(v.error_bound.log2());
    match a.emit {
        Emit::Json => write_json(
            out,
            &json!({
                "schema": SCHEMA,
                "sigma": a.sigma,
                "digits": a.digits,
                "value": shown,
                "error_bound": bound,
                "error_bound_log2": v.error_bound.log2(),
                "terms": v.terms,
            }),
        ),
        _ => {
            writeln!(out, "P({}) = {shown}", a.sigma)?;
            writeln!(out, "error bound  {bound}")?;
            writeln!(out, "terms        {}", v.terms)?;
            Ok(())
        }
    }
}

fn resolve_checkpoint(explicit: Option<&Path>, dir: Option<&Path>, default_name: impl FnOnce() -> String) -> Option<PathBuf> {
    match (explicit, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_owned()),
        (None, Some(d)) => Some(d.join(default_name())),
        (None, None) => None,
    }
}

/// How a checkpointed scan ended.
enum ScanEnd {
    Complete(ScanReport, f64),
    /// Stopped early; the windows found so far, sorted.
    Stopped(Vec<NegativeWindow>, u64),
}

/// Runs `scanner`, resuming from and appending to `checkpoint` when given.
/// `stop` sees the windows found so far and the next chunk index.
fn scan_checkpointed<S>(scanner: &Scanner, checkpoint: Option<&Path>, err: &mut dyn Write, mut stop: S) -> Result<ScanEnd, Failure>
where
    S: FnMut(&[NegativeWindow], u64) -> bool,
{
    let cfg = *scanner.config();
    let range = scanner.range();
    let started = Instant::now();
    let (first, windows, evaluations, prior_wall) = match checkpoint {
        Some(path) => match checkpoint::load_last(path)? {
            Some(rec) => {
                if !rec.matches(range, cfg.coarse_step, cfg.refine_tol, cfg.chunk_len) {
                    return Err(checkpoint::CheckpointError::Mismatch(path.to_owned()).into());
                }
                writeln!(
                    err,
                    "resuming from chunk {} of {} (t = {})",
                    rec.next_chunk,
                    scanner.chunk_count(),
                    rec.completed_to
                )?;
                (rec.next_chunk, rec.windows, rec.evaluations, rec.wall_time)
            }
            None => (0, Vec::new(), 0, 0.0),
        },
        None => (0, Vec::new(), 0, 0.0),
    };
    let mut writer = match checkpoint {
        Some(path) => Some(CheckpointWriter::open(path, first)?),
        None => None,
    };
    let mut write_error = None;
    let mut stopped = None;
    let report = scanner.run_from(first, windows, evaluations, |p| {
        if let Some(w) = writer.as_mut() {
            let rec = CheckpointRecord {
                schema: checkpoint::SCHEMA,
                range,
                coarse_step: cfg.coarse_step,
                refine_tol: cfg.refine_tol,
                chunk_len: cfg.chunk_len,
                next_chunk: p.next_chunk,
                completed_to: p.completed_to,
                windows: p.windows.to_vec(),
                evaluations: p.evaluations,
                wall_time: prior_wall + started.elapsed().as_secs_f64(),
            };
            if let Err(e) = w.append(&rec) {
                write_error = Some(e);
                return Ok(ControlFlow::Break(()));
            }
        }
        if p.next_chunk < scanner.chunk_count() && stop(p.windows, p.next_chunk) {
            let mut found = p.windows.to_vec();
            found.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
            stopped = Some((found, p.next_chunk));
            return Ok(ControlFlow::Break(()));
        }
        Ok(ControlFlow::Continue(()))
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    let wall = prior_wall + started.elapsed().as_secs_f64();
    match (report, stopped) {
        (Some(r), _) => Ok(ScanEnd::Complete(r, wall)),
        (None, Some((w, k))) => Ok(ScanEnd::Stopped(w, k)),
        (None, None) => Err(Failure::Computation("scan stopped unexpectedly".into())),
    }
}

#[derive(Serialize)]
struct ScanDocument<'a> {
    schema: u32,
    #[serde(flatten)]
    report: &'a ScanReport,
    config: ScanConfig,
    wall_time: f64,
}

fn cmd_scan(a: &ScanArgs, dir: Option<&Path>, out: &mut Vec<u8>, err: &mut dyn Write) -> Outcome {
    let cfg = ScanConfig {
        coarse_step: a.coarse_step,
        refine_tol: a.refine_tol,
        chunk_len: a.chunk_len,
        certify_gaps: a.certify_gaps,
        margin: a.margin,
    };
    let scanner = Scanner::new(a.from, a.to, cfg)?;
    let path = resolve_checkpoint(a.checkpoint.as_deref(), dir, || format!("scan_{}_{}.jsonl", a.from, a.to));
    let first = match &path {
        Some(p) => checkpoint::load_last(p)?.map_or(0, |r| r.next_chunk),
        None => 0,
    };
    let limit = a.stop_after_chunks;
    let end = scan_checkpointed(&scanner, path.as_deref(), err, |_, next| {
        limit.is_some_and(|n| next >= first + n)
    })?;
    let (report, wall) = match end {
        ScanEnd::Complete(r, w) => (r, w),
        ScanEnd::Stopped(found, next) => {
            writeln!(
                err,
                "stopped at chunk {next} of {} with {} windows; rerun with the same checkpoint to resume",
                scanner.chunk_count(),
                found.len()
            )?;
            return Ok(());
        }
    };
    match a.emit {
        Emit::Csv => format::write_windows_csv(&mut *out, &report.windows)?,
        Emit::Json => write_json(
            out,
            &ScanDocument {
                schema: SCHEMA,
                report: &report,
                config: cfg,
                wall_time: wall,
            },
        )?,
        Emit::Text => {
            writeln!(out, "{:>18} {:>12} {:>18} {:>18} {:>12}", "t_min", "re_zeta_min", "t_start", "t_end", "length")?;
            for w in &report.windows {
                writeln!(
                    out,
                    "{:>18} {:>12} {:>18} {:>18} {:>12}",
                    format::fixed(w.t_min, 8),
                    format::fixed(w.min_value, 8),
                    format::fixed(w.t_start, 8),
                    format::fixed(w.t_end, 8),
                    format::fixed(w.length, 8)
                )?;
            }
            writeln!(
                out,
                "{} windows in [{}, {}], {} evaluations",
                report.windows.len(),
                report.t_lo,
                report.t_hi,
                report.evaluations
            )?;
            if let Some(c) = &report.coverage {
                let certified: f64 = c.certified.iter().map(|r| r.t_hi - r.t_lo).sum();
                let uncovered: f64 = c.uncovered.iter().map(|(x, y)| y - x).sum();
                writeln!(out, "certified positive on {certified:.6} of the gaps; {} pieces ({uncovered:.6}) not covered", c.uncovered.len())?;
                for (x, y) in &c.uncovered {
                    writeln!(out, "  not covered: [{x}, {y}]")?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_certify(a: &CertifyArgs, out: &mut Vec<u8>) -> Outcome {
    reject(a.emit, &[Emit::Text, Emit::Json], "certify")?;
    let c = scan::certify_positive_with(a.from, a.to, a.margin, a.min_step)?;
    match a.emit {
        Emit::Json => {
            let range = c.range();
            let mut doc = json!({
                "schema": SCHEMA,
                "status": if c.is_certified() { "certified" } else { "failed" },
                "t_lo": a.from,
                "t_hi": a.to,
                "margin": a.margin,
                "certified_to": range.t_hi,
                "step_count": range.steps.len(),
            });
            if let Certification::Failed { t_fail, .. } = &c {
                doc["t_fail"] = json!(t_fail);
            }
            if a.steps {
                doc["steps"] = json!(range.steps);
            }
            write_json(out, &doc)
        }
        _ => {
            match &c {
                Certification::Certified { range } => writeln!(
                    out,
                    "certified: Re ζ(1+it) > 0 for t in [{}, {}] ({} steps)",
                    range.t_lo,
                    range.t_hi,
                    range.steps.len()
                )?,
                Certification::Failed { t_fail, partial } => writeln!(
                    out,
                    "not certified: headroom exhausted at t = {t_fail} after {} steps; Re ζ(1+it) > 0 is proved on [{}, {}]",
                    partial.steps.len(),
                    partial.t_lo,
                    partial.t_hi
                )?,
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct McDocument {
    schema: u32,
    config: ModelConfig,
    #[serde(flatten)]
    stats: mc::EstimatorStats,
    moments: McMoments,
    tail: TailDiagnostics,
}

#[derive(Serialize)]
struct McMoments {
    mean_target: f64,
    mean_pass: bool,
    abs2_target: f64,
    abs2_pass: bool,
    variance_target: f64,
}

fn cmd_mc(a: &McArgs, out: &mut Vec<u8>) -> Outcome {
    reject(a.emit, &[Emit::Text, Emit::Json], "mc")?;
    let sigmas = match (a.sigma, a.long_run) {
        (Some(s), _) => vec![s],
        (None, true) => vec![1.0, 1.01, 1.02],
        (None, false) => return Err(usage("mc needs --sigma (or --long-run)")),
    };
    let trials = match (a.trials, a.long_run) {
        (Some(n), _) => n,
        (None, true) => 1_000_000_000,
        (None, false) => return Err(usage("mc needs --trials (or --long-run)")),
    };
    for sigma in sigmas {
        let config = ModelConfig {
            sigma,
            prime_cutoff: a.cutoff,
            trials,
            seed: a.seed,
            streams: a.streams,
        };
        let m = mc::moment_check(&config)?;
        let tail = mc::tail_diagnostics(sigma, a.cutoff);
        let s = m.stats;
        match a.emit {
            Emit::Json => {
                let doc = McDocument {
                    schema: SCHEMA,
                    config,
                    stats: s,
                    moments: McMoments {
                        mean_target: m.mean_target,
                        mean_pass: m.mean_pass,
                        abs2_target: m.abs2_target,
                        abs2_pass: m.abs2_pass,
                        variance_target: m.variance_target,
                    },
                    tail,
                };
                serde_json::to_writer(&mut *out, &doc).map_err(|e| Failure::Computation(e.to_string()))?;
                out.push(b'\n');
            }
            _ => {
                writeln!(
                    out,
                    "sigma {sigma}, {} trials, primes <= {}, seed {}, {} streams",
                    s.trials, a.cutoff, a.seed, a.streams
                )?;
                writeln!(
                    out,
                    "  negative hits {}  d = {:.4e}  95% CI [{:.4e}, {:.4e}]",
                    s.negative_hits, s.d_hat, s.ci95.0, s.ci95.1
                )?;
                writeln!(out, "  mean Re Z   {:.6} ± {:.6} (model 1)", s.mean, s.mean_se)?;
                writeln!(
                    out,
                    "  mean |Z|^2  {:.6} ± {:.6} (model {:.6})",
                    s.mean_abs2, s.mean_abs2_se, m.abs2_target
                )?;
                writeln!(
                    out,
                    "  variance    {:.6} (model {:.6}); Re Z alone {:.6}",
                    s.variance, m.variance_target, s.variance_re
                )?;
                match tail.arg_bound {
                    Some(b) => writeln!(out, "  omitted primes move arg Z by at most {b:.3e} (rms {:.3e})", tail.arg_rms_bound)?,
                    None => writeln!(out, "  omitted primes: rms effect on arg Z {:.3e}", tail.arg_rms_bound)?,
                }
            }
        }
    }
    Ok(())
}

fn cmd_table(a: &TableArgs, dir: Option<&Path>, out: &mut Vec<u8>, err: &mut dyn Write) -> Outcome {
    if a.rows == 0 || a.rows > REFERENCE_MINIMA.len() {
        return Err(usage(format!("--rows must be in 1..={}", REFERENCE_MINIMA.len())));
    }
    let cfg = ScanConfig {
        coarse_step: a.coarse_step,
        refine_tol: a.refine_tol,
        ..ScanConfig::default()
    };
    let windows = if a.full {
        let scanner = Scanner::new(scan::SLOPE_BOUND_MIN_T, a.to, cfg)?;
        let path = resolve_checkpoint(a.checkpoint.as_deref(), dir, || format!("table_{}.jsonl", a.to));
        let rows = a.rows;
        match scan_checkpointed(&scanner, path.as_deref(), err, |w, _| w.len() >= rows)? {
            ScanEnd::Complete(r, _) => r.windows,
            ScanEnd::Stopped(w, _) => w,
        }
    } else {
        let mut all = Vec::new();
        for &(t, _, _) in &REFERENCE_MINIMA[..a.rows] {
            let found = Scanner::new(t - 0.5, t + 0.5, cfg)?.run()?.windows;
            all.extend(found);
        }
        all
    };
    let shown = &windows[..windows.len().min(a.rows)];
    match a.emit {
        Emit::Csv => format::write_windows_csv(&mut *out, shown)?,
        Emit::Json => write_json(
            out,
            &json!({
                "schema": SCHEMA,
                "mode": if a.full { "full" } else { "local" },
                "windows": shown,
                "length_sum": shown.iter().map(|w| w.length).sum::<f64>(),
            }),
        )?,
        Emit::Text => {
            writeln!(out, "{:>3} {:>14} {:>8} {:>8}   listed", "row", "t", "Re ζ", "length")?;
            for (i, w) in shown.iter().enumerate() {
                let (t, re, len) = REFERENCE_MINIMA[i];
                let same = format::fixed(w.t_min, 4) == format::fixed(t, 4)
                    && format::fixed(w.min_value, 4) == format::fixed(re, 4)
                    && format::fixed(w.length, 4) == format::fixed(len, 4);
                writeln!(
                    out,
                    "{:>3} {:>14} {:>8} {:>8}   {}",
                    i + 1,
                    format::fixed(w.t_min, 4),
                    format::fixed(w.min_value, 4),
                    format::fixed(w.length, 4),
                    if same { "match".to_string() } else { format!("differs ({t:.4}, {re:.4}, {len:.4})") }
                )?;
            }
            let sum: f64 = shown.iter().map(|w| w.length).sum();
            writeln!(out, "sum of lengths {sum:.8}")?;
        }
    }
    if shown.len() < a.rows {
        return Err(Failure::Computation(format!(
            "found {} windows, {} requested",
            shown.len(),
            a.rows
        )));
    }
    Ok(())
}
