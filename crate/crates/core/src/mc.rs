//! Monte Carlo for the random Euler product
//! `Z = Π_{p <= P} (1 - p^{-σ} e^{iθ_p})^{-1}` with independent uniform
//! phases `θ_p`, the usual model for the value distribution of ζ(σ+it).
//!
//! The fraction of samples with `Re Z < 0` estimates the density `d(σ)` of
//! the set where `Re ζ(σ+it) < 0`. The model has `E[Z] = 1` and
//! `E|Z|² = Π_p (1 - p^{-2σ})^{-1}`, which at `σ = 1` tends to `ζ(2)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::arith::PrimeSieve;
use crate::error::{Error, Result};

/// Default prime cutoff at `σ = 1`.
pub const DEFAULT_CUTOFF: u64 = 100_000;
/// Smallest cutoff accepted for `σ <= 1.05`.
pub const MIN_CUTOFF_NEAR_ONE: u64 = 10_000;
/// Hits below which the exact Poisson interval is used.
const POISSON_HITS: u64 = 100;
/// `p^{-σ}` below this uses a short power series for the logarithm.
const SERIES_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub sigma: f64,
    pub prime_cutoff: u64,
    pub trials: u64,
    pub seed: u64,
    pub streams: u32,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 1.0) || !self.sigma.is_finite() {
            return Err(Error::domain("mc sigma", self.sigma, "sigma >= 1"));
        }
        if self.prime_cutoff < 2 {
            return Err(Error::domain("mc prime_cutoff", self.prime_cutoff, "cutoff >= 2"));
        }
        if self.sigma <= 1.05 && self.prime_cutoff < MIN_CUTOFF_NEAR_ONE {
            return Err(Error::domain(
                "mc prime_cutoff",
                self.prime_cutoff,
                "cutoff >= 10000 when sigma <= 1.05",
            ));
        }
        if self.prime_cutoff > u64::from(u32::MAX) {
            return Err(Error::capacity("mc prime_cutoff", self.prime_cutoff, u32::MAX));
        }
        if self.trials == 0 {
            return Err(Error::domain("mc trials", 0, "trials >= 1"));
        }
        if self.streams == 0 {
            return Err(Error::domain("mc streams", 0, "streams >= 1"));
        }
        Ok(())
    }
}

/// The primes of the product and their weights `p^{-σ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    sigma: f64,
    primes: Vec<u64>,
    radii: Vec<f64>,
}

impl Model {
    /// All primes up to `cutoff`.
    pub fn new(sigma: f64, cutoff: u64) -> Result<Self> {
        Self::with_primes(sigma, PrimeSieve::new(cutoff).primes().to_vec())
    }

    /// An explicit set of primes (or any integers > 1).
    pub fn with_primes(sigma: f64, primes: Vec<u64>) -> Result<Self> {
        if !(sigma >= 1.0) || !sigma.is_finite() {
            return Err(Error::domain("model sigma", sigma, "sigma >= 1"));
        }
        if primes.iter().any(|&p| p < 2) {
            return Err(Error::domain("model primes", "value < 2", "every p >= 2"));
        }
        let radii = primes.iter().map(|&p| (p as f64).powf(-sigma)).collect();
        Ok(Model { sigma, primes, radii })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `E|Z|² = Π (1 - p^{-2σ})^{-1}`.
    pub fn second_moment(&self) -> f64 {
        self.radii.iter().map(|r| -(-r * r).ln_1p()).sum::<f64>().exp()
    }

    /// `log Z` for the given unit vectors `(cos θ_p, sin θ_p)`.
    fn log_sample(&self, mut unit: impl FnMut() -> (f64, f64)) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for &r in &self.radii {
            let (c, s) = unit();
            let (dr, di) = neg_log_one_minus(r, c, s);
            re += dr;
            im += di;
        }
        Complex64::new(re, im)
    }
}

/// `-log(1 - r e^{iθ})` for `0 < r < 1`, `(c, s) = (cos θ, sin θ)`.
fn neg_log_one_minus(r: f64, c: f64, s: f64) -> (f64, f64) {
    if r < SERIES_RADIUS {
        // z + z²/2 + z³/3 + z⁴/4 + z⁵/5, relative error below r⁵
        let (zr, zi) = (r * c, r * s);
        let (z2r, z2i) = (zr * zr - zi * zi, 2.0 * zr * zi);
        let (z3r, z3i) = (z2r * zr - z2i * zi, z2r * zi + z2i * zr);
        let (z4r, z4i) = (z2r * z2r - z2i * z2i, 2.0 * z2r * z2i);
        let (z5r, z5i) = (z4r * zr - z4i * zi, z4r * zi + z4i * zr);
        (
            zr + z2r / 2.0 + z3r / 3.0 + z4r / 4.0 + z5r / 5.0,
            zi + z2i / 2.0 + z3i / 3.0 + z4i / 4.0 + z5i / 5.0,
        )
    } else {
        let modulus_log = 0.5 * (r * r - 2.0 * r * c).ln_1p();
        let arg = (-r * s).atan2(1.0 - r * c);
        (-modulus_log, -arg)
    }
}

/// One sample of the product for explicit phases (one per prime).
pub fn sample_model(sigma: f64, phases: &[f64], primes: &PrimeSieve) -> Result<Complex64> {
    if phases.len() != primes.len() {
        return Err(Error::Config(format!(
            "{} phases for {} primes",
            phases.len(),
            primes.len()
        )));
    }
    let model = Model::with_primes(sigma, primes.primes().to_vec())?;
    let mut it = phases.iter();
    let log = model.log_sample(|| {
        let (s, c) = it.next().expect("one phase per prime").sin_cos();
        (c, s)
    });
    Ok(log.exp())
}

/// A uniformly distributed point on the unit circle, by rejection from
/// the square (no trigonometric calls). Each coordinate has 31 random bits.
fn random_unit(rng: &mut ChaCha8Rng) -> (f64, f64) {
    const SCALE: f64 = 1.0 / (1u64 << 31) as f64;
    loop {
        let bits: u64 = rng.random();
        let x = ((bits >> 32) as f64) * SCALE - 1.0;
        let y = ((bits & 0xffff_ffff) as f64) * SCALE - 1.0;
        let s = x * x + y * y;
        if s <= 1.0 && s > 1e-12 {
            let inv = s.sqrt().recip();
            return (x * inv, y * inv);
        }
    }
}

/// Which samples count as hits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Event {
    /// `Re Z < 0`, decided from the sign of `cos(arg Z)`.
    NegativeReal,
    /// `Re Z < threshold`.
    RealBelow(f64),
}

impl Event {
    fn hit(&self, log: Complex64) -> (bool, Complex64) {
        let z = log.exp();
        let hit = match self {
            Event::NegativeReal => log.im.cos() < 0.0,
            Event::RealBelow(c) => z.re < *c,
        };
        (hit, z)
    }
}

/// Running tallies of one or more streams.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    pub hits: u64,
    pub mean_re: f64,
    pub mean_im: f64,
    /// Σ |z - mean|².
    pub m2: f64,
    /// Σ (Re z - mean_re)².
    pub m2_re: f64,
    /// Mean of |z|² and Σ (|z|² - mean_abs2)².
    pub mean_abs2: f64,
    pub m2_abs2: f64,
}

impl Tally {
    /// Adds one sample (Welford update).
    pub fn push(&mut self, z: Complex64, hit: bool) {
        self.trials += 1;
        self.hits += u64::from(hit);
        let n = self.trials as f64;
        let (dr, di) = (z.re - self.mean_re, z.im - self.mean_im);
        self.mean_re += dr / n;
        self.mean_im += di / n;
        let (er, ei) = (z.re - self.mean_re, z.im - self.mean_im);
        self.m2 += dr * er + di * ei;
        self.m2_re += dr * er;
        let a = z.norm_sqr();
        let da = a - self.mean_abs2;
        self.mean_abs2 += da / n;
        self.m2_abs2 += da * (a - self.mean_abs2);
    }

    /// Combines two tallies (Chan et al.); the order of arguments is fixed
    /// by stream number, so the result is reproducible.
    pub fn merge(&self, other: &Tally) -> Tally {
        if self.trials == 0 {
            return *other;
        }
        if other.trials == 0 {
            return *self;
        }
        let (na, nb) = (self.trials as f64, other.trials as f64);
        let n = na + nb;
        let (dr, di) = (other.mean_re - self.mean_re, other.mean_im - self.mean_im);
        let da = other.mean_abs2 - self.mean_abs2;
        let w = na * nb / n;
        Tally {
            trials: self.trials + other.trials,
            hits: self.hits + other.hits,
            mean_re: self.mean_re + dr * nb / n,
            mean_im: self.mean_im + di * nb / n,
            m2: self.m2 + other.m2 + (dr * dr + di * di) * w,
            m2_re: self.m2_re + other.m2_re + dr * dr * w,
            mean_abs2: self.mean_abs2 + da * nb / n,
            m2_abs2: self.m2_abs2 + other.m2_abs2 + da * da * w,
        }
    }
}

/// Tallies for `trials` samples drawn from stream `stream` of `seed`.
pub fn run_stream(model: &Model, event: Event, seed: u64, stream: u64, trials: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut tally = Tally::default();
    for _ in 0..trials {
        let log = model.log_sample(|| random_unit(&mut rng));
        let (hit, z) = event.hit(log);
        tally.push(z, hit);
    }
    tally
}

/// Splits `trials` over `streams` streams, runs them in parallel and
/// merges in stream order.
pub fn run_streams(model: &Model, event: Event, seed: u64, streams: u32, trials: u64) -> Tally {
    let k = u64::from(streams.max(1));
    let tallies: Vec<Tally> = (0..k)
        .into_par_iter()
        .map(|s| {
            let n = trials / k + u64::from(s < trials % k);
            run_stream(model, event, seed, s, n)
        })
        .collect();
    tallies.iter().fold(Tally::default(), |acc, t| acc.merge(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorStats {
    pub trials: u64,
    pub negative_hits: u64,
    /// Sample mean of `Re Z`.
    pub mean: f64,
    /// Standard error of `mean`.
    pub mean_se: f64,
    /// Sample variance `Σ|Z - Z̄|²/(n-1)` of the complex samples.
    pub variance: f64,
    /// Sample variance of `Re Z`.
    pub variance_re: f64,
    /// Sample mean of `|Z|²` and its standard error.
    pub mean_abs2: f64,
    pub mean_abs2_se: f64,
    pub d_hat: f64,
    pub ci95: (f64, f64),
    /// Fewer than two trials: variances are reported as zero.
    pub degenerate: bool,
}

impl EstimatorStats {
    pub fn from_tally(t: &Tally) -> EstimatorStats {
        let n = t.trials as f64;
        let degenerate = t.trials < 2;
        let (variance, variance_re, var_abs2) = if degenerate {
            (0.0, 0.0, 0.0)
        } else {
            (t.m2 / (n - 1.0), t.m2_re / (n - 1.0), t.m2_abs2 / (n - 1.0))
        };
        let d_hat = t.hits as f64 / n;
        EstimatorStats {
            trials: t.trials,
            negative_hits: t.hits,
            mean: t.mean_re,
            mean_se: (variance_re / n).sqrt(),
            variance,
            variance_re,
            mean_abs2: t.mean_abs2,
            mean_abs2_se: (var_abs2 / n).sqrt(),
            d_hat,
            ci95: proportion_ci95(t.hits, t.trials),
            degenerate,
        }
    }
}

/// 95% interval for a hit rate: exact Poisson (Garwood) for few hits,
/// normal approximation otherwise.
pub fn proportion_ci95(hits: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    if hits < POISSON_HITS {
        let k = hits as f64;
        let lo = if hits == 0 {
            0.0
        } else {
            ChiSquared::new(2.0 * k).expect("dof > 0").inverse_cdf(0.025) / 2.0
        };
        let hi = ChiSquared::new(2.0 * k + 2.0).expect("dof > 0").inverse_cdf(0.975) / 2.0;
        ((lo / n).min(p), (hi / n).max(p))
    } else {
        let half = 1.959_963_984_540_054 * (p * (1.0 - p) / n).sqrt();
        ((p - half).max(0.0), p + half)
    }
}

/// Estimate of `d(σ)` from `config.trials` samples of the model.
pub fn estimate_d(config: &ModelConfig) -> Result<EstimatorStats> {
    config.validate()?;
    let model = Model::new(config.sigma, config.prime_cutoff)?;
    let tally = run_streams(&model, Event::NegativeReal, config.seed, config.streams, config.trials);
    Ok(EstimatorStats::from_tally(&tally))
}

/// Bounds on how much the primes above the cutoff could move `arg Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostics {
    /// Worst case `Σ_{p > P} arcsin(p^{-σ}) <= 2 P^{1-σ}/(σ-1)`; infinite
    /// at `σ = 1`, reported as `None`.
    pub arg_bound: Option<f64>,
    /// `sqrt(Σ_{n > P} n^{-2σ} / 2)`, bounding the root-mean-square
    /// contribution of the omitted factors to `arg Z`.
    pub arg_rms_bound: f64,
}

pub fn tail_diagnostics(sigma: f64, cutoff: u64) -> TailDiagnostics {
    let p = cutoff as f64;
    let arg_bound = (sigma > 1.0).then(|| 2.0 * p.powf(1.0 - sigma) / (sigma - 1.0));
    let sum_sq = p.powf(1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0);
    TailDiagnostics {
        arg_bound,
        arg_rms_bound: (sum_sq / 2.0).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub stats: EstimatorStats,
    /// `E Re Z = 1`.
    pub mean_target: f64,
    pub mean_pass: bool,
    /// `E|Z|² = Π_{p <= P} (1 - p^{-2σ})^{-1}`, which is ζ(2σ) up to the
    /// omitted primes.
    pub abs2_target: f64,
    pub abs2_pass: bool,
    /// `E|Z - 1|² = E|Z|² - 1`; `ζ(2) - 1` at `σ = 1`.
    pub variance_target: f64,
    pub pass: bool,
}

/// Compares sample moments with the model's exact ones at three standard
/// errors.
pub fn moment_check(config: &ModelConfig) -> Result<MomentCheck> {
    config.validate()?;
    let model = Model::new(config.sigma, config.prime_cutoff)?;
    let tally = run_streams(&model, Event::NegativeReal, config.seed, config.streams, config.trials);
    let stats = EstimatorStats::from_tally(&tally);
    let abs2_target = model.second_moment();
    let mean_pass = !stats.degenerate && (stats.mean - 1.0).abs() <= 3.0 * stats.mean_se;
    let abs2_pass = !stats.degenerate && (stats.mean_abs2 - abs2_target).abs() <= 3.0 * stats.mean_abs2_se;
    Ok(MomentCheck {
        stats,
        mean_target: 1.0,
        mean_pass,
        abs2_target,
        abs2_pass,
        variance_target: abs2_target - 1.0,
        pass: mean_pass && abs2_pass,
    })
}
