//! Replicated estimation of expected star discrepancy and the comparison of
//! simple random against jittered sampling.
//!
//! Stream layout: replication `k` of the sampler in slot `s` (its position in
//! [`RunConfig::samplers`]) draws from `derive_stream(master_seed, 2k + s)`.
//! Every replication is stored at its own index, so the results do not depend
//! on how the work is scheduled across threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{
    cover_discrepancy, exact_star_discrepancy_with_guard, DeltaCover, DEFAULT_EXACT_GUARD,
};
use crate::error::{domain, Error, Result};
use crate::geometry::{AnchoredBox, GridPartition};
use crate::samplers::{self, derive_stream, PointSet, RandomStream, GENERATOR};
use crate::stats::{welch, Summary, WelchComparison};

/// Number of stream slots per replication.
pub const STREAM_STRIDE: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Simple,
    Jittered,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Simple => "simple",
            SamplerKind::Jittered => "jittered",
        }
    }

    /// One point set of `N = m^d` points.
    pub fn sample(self, partition: &GridPartition, stream: &mut RandomStream) -> PointSet {
        match self {
            SamplerKind::Simple => samplers::simple_random(partition.cell_count(), partition.dim(), stream)
                .expect("partition dimensions are positive"),
            SamplerKind::Jittered => samplers::jittered(partition, stream),
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(SamplerKind::Simple),
            "jittered" => Ok(SamplerKind::Jittered),
            other => domain(format!("unknown sampler {other:?}")),
        }
    }
}

/// How each replication's star discrepancy is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    Exact,
    /// `D_Γ` over a grid δ-cover; the star discrepancy lies in `[D_Γ, D_Γ + δ]`.
    Cover { delta: f64 },
    /// Exact when `N^d ≤ 10^8`, otherwise a cover with `δ = 1/N`.
    #[default]
    Auto,
}

fn default_samplers() -> Vec<SamplerKind> {
    vec![SamplerKind::Simple, SamplerKind::Jittered]
}

fn default_confidence() -> f64 {
    0.99
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    /// Cells per axis; `N = m^d`.
    pub m: usize,
    /// One or two samplers. With two, the comparison is `slot 0 − slot 1`.
    #[serde(default = "default_samplers")]
    pub samplers: Vec<SamplerKind>,
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

impl RunConfig {
    /// Simple against jittered, exact method, 99% confidence.
    pub fn new(d: usize, m: usize, replications: usize, master_seed: u64) -> Self {
        Self {
            d,
            m,
            samplers: default_samplers(),
            replications,
            master_seed,
            method: Method::Auto,
            confidence: default_confidence(),
        }
    }

    pub fn partition(&self) -> Result<GridPartition> {
        GridPartition::new(self.d, self.m)
    }

    pub fn validate(&self) -> Result<()> {
        let partition = self.partition()?;
        if self.replications < 2 {
            return domain(format!("need at least 2 replications, got {}", self.replications));
        }
        if self.samplers.is_empty() || self.samplers.len() > STREAM_STRIDE as usize {
            return domain(format!("need one or two samplers, got {}", self.samplers.len()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return domain(format!("confidence {} outside (0,1)", self.confidence));
        }
        self.resolve_method(&partition).map(|_| ())
    }

    fn resolve_method(&self, partition: &GridPartition) -> Result<Evaluator> {
        let n = partition.cell_count() as f64;
        let work = n.powi(self.d as i32);
        match self.method {
            Method::Exact if work > DEFAULT_EXACT_GUARD => Err(Error::Resource(format!(
                "exact method needs N^d = {work:e} > {DEFAULT_EXACT_GUARD:e}; use a cover method"
            ))),
            Method::Exact => Ok(Evaluator::Exact),
            Method::Cover { delta } => Ok(Evaluator::Cover(DeltaCover::new(self.d, delta)?)),
            Method::Auto if work <= DEFAULT_EXACT_GUARD => Ok(Evaluator::Exact),
            Method::Auto => Ok(Evaluator::Cover(DeltaCover::new(self.d, 1.0 / n)?)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Evaluator {
    Exact,
    Cover(DeltaCover),
}

impl Evaluator {
    fn evaluate(&self, points: &PointSet) -> Result<f64> {
        match self {
            Evaluator::Exact => Ok(exact_star_discrepancy_with_guard(points, f64::INFINITY)?.value),
            Evaluator::Cover(cover) => cover_discrepancy(points, cover),
        }
    }

    fn delta(&self) -> Option<f64> {
        match self {
            Evaluator::Exact => None,
            Evaluator::Cover(c) => Some(c.delta()),
        }
    }
}

/// Discrepancy samples of one sampler slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerRun {
    pub sampler: SamplerKind,
    pub slot: usize,
    /// Indexed by replication.
    #[serde(skip)]
    pub samples: Vec<f64>,
    pub summary: Summary,
    /// `∫_0^1 P(D ≥ t) dt` of the empirical distribution.
    pub tail_integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The confidence interval for `E[slot 0] − E[slot 1]` lies above 0.
    Confirmed,
    /// The interval contains 0.
    Inconclusive,
    /// The interval lies below 0.
    Reversed,
}

impl Verdict {
    fn from_interval(low: f64, high: f64) -> Self {
        if low > 0.0 {
            Verdict::Confirmed
        } else if high < 0.0 {
            Verdict::Reversed
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: RunConfig,
    /// `"exact"` or `"cover"`.
    pub method: String,
    /// Cover resolution δ; the true discrepancy lies in `[value, value + δ]`.
    pub delta: Option<f64>,
    pub generator: String,
    pub runs: Vec<SamplerRun>,
    /// Present when two samplers ran.
    pub difference: Option<WelchComparison>,
    pub verdict: Option<Verdict>,
    pub runtime_seconds: f64,
}

impl ExperimentResult {
    pub fn run(&self, sampler: SamplerKind) -> Option<&SamplerRun> {
        self.runs.iter().find(|r| r.sampler == sampler)
    }
}

/// Mean of a nonnegative sample computed as the integral of its empirical
/// survival function, `Σ (x_(i) − x_(i−1)) · (n − i + 1)/n`.
pub fn tail_integral_expectation(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return domain("tail integral needs at least one sample");
    }
    if let Some(bad) = samples.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return domain(format!("sample {bad} outside [0,1]"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut prev = 0.0;
    let mut total = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        total += (x - prev) * (n - i as f64) / n;
        prev = x;
    }
    Ok(total)
}

fn run_slot(
    config: &RunConfig,
    partition: &GridPartition,
    evaluator: &Evaluator,
    slot: usize,
) -> Result<SamplerRun> {
    let sampler = config.samplers[slot];
    let samples = (0..config.replications)
        .into_par_iter()
        .map(|k| {
            let mut stream = derive_stream(config.master_seed, k as u64 * STREAM_STRIDE + slot as u64);
            evaluator.evaluate(&sampler.sample(partition, &mut stream))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SamplerRun {
        sampler,
        slot,
        summary: Summary::of(&samples)?,
        tail_integral: tail_integral_expectation(&samples)?,
        samples,
    })
}

/// Replicated discrepancy samples for the first slot holding `sampler`.
pub fn estimate_expected_discrepancy(config: &RunConfig, sampler: SamplerKind) -> Result<SamplerRun> {
    config.validate()?;
    let slot = config
        .samplers
        .iter()
        .position(|&s| s == sampler)
        .ok_or_else(|| Error::Domain(format!("sampler {} not enabled", sampler.name())))?;
    let partition = config.partition()?;
    let evaluator = config.resolve_method(&partition)?;
    run_slot(config, &partition, &evaluator, slot)
}

/// Runs every configured sampler and, with two, compares their means.
pub fn compare_samplers(config: &RunConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let started = Instant::now();
    let partition = config.partition()?;
    let evaluator = config.resolve_method(&partition)?;
    let runs = (0..config.samplers.len())
        .map(|slot| run_slot(config, &partition, &evaluator, slot))
        .collect::<Result<Vec<_>>>()?;
    let difference = match runs.as_slice() {
        [a, b] => Some(welch(&a.summary, &b.summary, config.confidence)?),
        _ => None,
    };
    Ok(ExperimentResult {
        config: config.clone(),
        method: match evaluator {
            Evaluator::Exact => "exact".into(),
            Evaluator::Cover(_) => "cover".into(),
        },
        delta: evaluator.delta(),
        generator: GENERATOR.into(),
        verdict: difference.map(|w| Verdict::from_interval(w.ci_low, w.ci_high)),
        difference,
        runs,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

/// [`compare_samplers`] on a dedicated pool of `threads` workers.
pub fn compare_samplers_with_threads(config: &RunConfig, threads: usize) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("cannot build thread pool: {e}")))?;
    pool.install(|| compare_samplers(config))
}

/// Empirical moments of the box count `Σ 1_R(W_n)` over replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountMoments {
    pub mean: f64,
    pub variance: f64,
    /// Plug-in standard error of `variance` from the sample fourth central
    /// moment; it runs low when the count is close to a fair Bernoulli.
    pub variance_std_error: f64,
}

/// Simulates the count of points in `[0,x]` for `replications` point sets.
pub fn count_moments(
    partition: &GridPartition,
    bx: &AnchoredBox,
    sampler: SamplerKind,
    replications: usize,
    master_seed: u64,
) -> Result<CountMoments> {
    if replications < 2 {
        return domain("count moments need at least 2 replications");
    }
    if bx.dim() != partition.dim() {
        return domain("box and partition dimensions differ");
    }
    let counts: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|k| {
            let mut stream = derive_stream(master_seed, k as u64);
            let points = sampler.sample(partition, &mut stream);
            crate::discrepancy::count_in_box(&points, bx.corner(), crate::discrepancy::Convention::Closed) as f64
        })
        .collect();
    let n = replications as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let m2 = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n;
    let m4 = counts.iter().map(|c| (c - mean).powi(4)).sum::<f64>() / n;
    let variance = m2 * n / (n - 1.0);
    let var_of_var = ((m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n).max(0.0);
    Ok(CountMoments {
        mean,
        variance,
        variance_std_error: var_of_var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"d":2,"m":4,"replications":10}"#).unwrap();
        assert_eq!(c.samplers, default_samplers());
        assert_eq!((c.method, c.confidence, c.master_seed), (Method::Auto, 0.99, 0));
        let c: RunConfig =
            serde_json::from_str(r#"{"d":2,"m":4,"replications":10,"method":{"kind":"cover","delta":0.1}}"#)
                .unwrap();
        assert_eq!(c.method, Method::Cover { delta: 0.1 });
        assert!(serde_json::from_str::<RunConfig>(r#"{"d":2,"m":4,"replications":10,"x":1}"#).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(2, 4, 1, 0);
        assert!(c.validate().is_err());
        c.replications = 2;
        assert!(c.validate().is_ok());
        c.samplers.clear();
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(4, 8, 10, 0);
        c.method = Method::Exact;
        assert!(matches!(c.validate(), Err(Error::Resource(_))));
        c.method = Method::Auto;
        assert!(matches!(c.resolve_method(&c.partition().unwrap()), Ok(Evaluator::Cover(_))));
    }

    #[test]
    fn tail_integral_examples() {
        assert_eq!(tail_integral_expectation(&[0.5]).unwrap(), 0.5);
        assert_eq!(tail_integral_expectation(&[0.25, 0.75]).unwrap(), 0.5);
        assert!(tail_integral_expectation(&[]).is_err());
        assert!(tail_integral_expectation(&[1.5]).is_err());
    }

    #[test]
    fn single_point_expectation_is_three_quarters() {
        // D* of one uniform point U is max(U, 1 − U); its mean is 3/4.
        let mut c = RunConfig::new(1, 1, 10_000, 5);
        c.samplers = vec![SamplerKind::Simple];
        let run = estimate_expected_discrepancy(&c, SamplerKind::Simple).unwrap();
        assert!((run.summary.mean - 0.75).abs() < 3.0 * run.summary.std_error);
    }

    #[test]
    fn one_dimensional_jittered_beats_simple() {
        let r = compare_samplers(&RunConfig::new(1, 2, 10_000, 17)).unwrap();
        let w = r.difference.unwrap();
        assert!(w.ci_low > 0.0);
        assert_eq!(r.verdict, Some(Verdict::Confirmed));
    }

    #[test]
    fn repeated_runs_are_identical() {
        let c = RunConfig::new(2, 3, 50, 99);
        let a = compare_samplers(&c).unwrap();
        let b = compare_samplers_with_threads(&c, 1).unwrap();
        for (x, y) in a.runs.iter().zip(&b.runs) {
            assert_eq!(x.samples, y.samples);
        }
    }

    #[test]
    fn tiny_runs_may_be_inconclusive() {
        let r = compare_samplers(&RunConfig::new(2, 4, 2, 3)).unwrap();
        let w = r.difference.unwrap();
        assert!(w.ci_low <= w.ci_high);
    }

    #[test]
    fn cover_method_reports_delta() {
        let mut c = RunConfig::new(2, 2, 20, 1);
        c.method = Method::Cover { delta: 0.05 };
        let r = compare_samplers(&c).unwrap();
        assert_eq!((r.method.as_str(), r.delta), ("cover", Some(0.05)));
    }
}
