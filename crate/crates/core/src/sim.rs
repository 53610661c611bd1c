//! Seeded experiment harness: identifiability surveys, recovery-error sweeps
//! and minimum-path ratio histograms over generated topologies.
//!
//! Every instance and trial draws from its own `ChaCha8Rng` stream derived
//! from the config seed, so results do not depend on the number of worker
//! threads. Aggregation always runs in instance order.

use num_rational::Ratio;
use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expander::{
    certify_1_identifiable, k_identifiable, ExpanderCertificate, ExpanderError, KCheck,
};
use crate::netgraph::RoutingMatrix;
use crate::pathsel::{identifiability_heuristic, PathSelError};
use crate::tomo::{appendix_error_bound, estimate_delays, DelayVector, TomoError};
use crate::topogen::{generate_instance, GeneratedInstance, TopoConfig, TopoError};

pub const HISTOGRAM_BINS: usize = 20;
/// Normal quantile for 95% Wilson intervals.
const Z95: f64 = 1.959_963_984_540_054;

// stream tags keep instance and trial randomness apart
const STREAM_TOPOLOGY: u64 = 1 << 60;
const STREAM_RECOVERY: u64 = 2 << 60;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid sim config: {0}")]
    InvalidConfig(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("estimate failed on boundary {boundary} instance {index}: {source}")]
    Estimate {
        boundary: usize,
        index: usize,
        source: TomoError,
    },
    #[error(transparent)]
    Topo(#[from] TopoError),
    #[error(transparent)]
    Expander(#[from] ExpanderError),
    #[error(transparent)]
    Tomo(#[from] TomoError),
    #[error(transparent)]
    PathSel(#[from] PathSelError),
}

fn default_k() -> Vec<usize> {
    vec![1, 2, 3]
}

fn default_delay() -> f64 {
    10.0
}

/// `0, 0.1, ..., 1.0`.
pub fn default_mu_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 10.0).collect()
}

fn default_exponent() -> f64 {
    2.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Instances per boundary count.
    pub instances: usize,
    pub nodes: usize,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    pub boundary_counts: Vec<usize>,
    /// Congested-link counts swept by the recovery experiment.
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
    #[serde(default = "default_delay")]
    pub congested_delay: f64,
    /// Mean background delays.
    #[serde(default = "default_mu_grid")]
    pub mu: Vec<f64>,
    pub seed: u64,
    /// Round cap for the minimum-path heuristic; defaults to the path count.
    #[serde(default)]
    pub heuristic_rounds: Option<usize>,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let config: SimConfig =
            serde_json::from_str(text).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if self.instances == 0 {
            return bad("instances must be positive".into());
        }
        if self.boundary_counts.is_empty() {
            return bad("boundary_counts is empty".into());
        }
        for &b in &self.boundary_counts {
            self.topology(b, 0).validate()?;
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return bad(format!(
                "k must be a nonempty list of positive counts, got {:?}",
                self.k
            ));
        }
        if self.mu.is_empty() || self.mu.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return bad(format!(
                "mu must be a nonempty list of finite values >= 0, got {:?}",
                self.mu
            ));
        }
        let max_mu = self.mu.iter().fold(0.0f64, |a, &b| a.max(b));
        if !(self.congested_delay.is_finite() && self.congested_delay > max_mu) {
            return bad(format!(
                "congested_delay {} must exceed the largest mu {max_mu}",
                self.congested_delay
            ));
        }
        if self.heuristic_rounds == Some(0) {
            return bad("heuristic_rounds must be positive".into());
        }
        Ok(())
    }

    pub fn topology(&self, boundary: usize, index: usize) -> TopoConfig {
        TopoConfig {
            nodes: self.nodes,
            exponent: self.exponent,
            boundary,
            seed: derive_seed(self.seed, STREAM_TOPOLOGY, boundary, index),
        }
    }
}

/// First output of the ChaCha8 stream `tag | boundary << 32 | index`.
pub fn derive_seed(seed: u64, tag: u64, boundary: usize, index: usize) -> u64 {
    stream_rng(seed, tag, boundary, index).next_u64()
}

fn stream_rng(seed: u64, tag: u64, boundary: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag | (boundary as u64) << 32 | index as u64);
    rng
}

fn par_map<T: Sync, R: Send>(
    jobs: usize,
    items: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> Result<Vec<R>, SimError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    boundary: usize,
    index: usize,
}

fn slots(config: &SimConfig) -> Vec<Slot> {
    config
        .boundary_counts
        .iter()
        .flat_map(|&boundary| (0..config.instances).map(move |index| Slot { boundary, index }))
        .collect()
}

fn build(config: &SimConfig, slot: Slot) -> Result<GeneratedInstance, SimError> {
    Ok(generate_instance(
        &config.topology(slot.boundary, slot.index),
    )?)
}

/// 95% Wilson score interval; `None` for an empty sample.
pub fn wilson_interval(successes: usize, trials: usize) -> Option<(f64, f64)> {
    if trials == 0 {
        return None;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Some(((centre - half).max(0.0), (centre + half).min(1.0)))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

// survey

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub boundary: usize,
    pub k: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// `passed / (passed + failed)`; skipped instances are excluded.
    pub fraction: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Passes among instances no k skipped.
    pub common_passed: usize,
    pub common_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedInstance {
    pub boundary: usize,
    pub index: usize,
    pub seed: u64,
    pub routing: crate::netgraph::io::RoutingFile,
    pub certificate: ExpanderCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub rows: Vec<SurveyRow>,
    /// k=1 ≥ k=2 ≥ k=3 passes on the common set of every boundary count.
    pub nested: bool,
    pub certified: Vec<CertifiedInstance>,
}

pub const SURVEY_K: [usize; 3] = [1, 2, 3];

/// k = 1, 2, 3 checks for one routing matrix.
pub fn k_checks(routing: &RoutingMatrix) -> Result<Vec<KCheck>, SimError> {
    Ok(SURVEY_K
        .iter()
        .map(|&k| k_identifiable(routing, k))
        .collect::<Result<Vec<_>, _>>()?)
}

/// One row per k from per-instance [`k_checks`] results, plus whether
/// passes nest on the instances none of the checks skipped.
pub fn survey_rows(boundary: usize, checks: &[Vec<KCheck>]) -> (Vec<SurveyRow>, bool) {
    let common: Vec<&Vec<KCheck>> = checks
        .iter()
        .filter(|c| !c.contains(&KCheck::Skipped))
        .collect();
    let mut rows = Vec::new();
    for (slot_k, &k) in SURVEY_K.iter().enumerate() {
        let count = |want: KCheck| checks.iter().filter(|c| c[slot_k] == want).count();
        let (passed, failed, skipped) = (
            count(KCheck::Pass),
            count(KCheck::Fail),
            count(KCheck::Skipped),
        );
        let evaluated = passed + failed;
        let ci = wilson_interval(passed, evaluated);
        rows.push(SurveyRow {
            boundary,
            k,
            passed,
            failed,
            skipped,
            fraction: (evaluated > 0).then(|| passed as f64 / evaluated as f64),
            ci_low: ci.map(|c| c.0),
            ci_high: ci.map(|c| c.1),
            common_passed: common.iter().filter(|c| c[slot_k] == KCheck::Pass).count(),
            common_total: common.len(),
        });
    }
    let nested = rows
        .windows(2)
        .all(|w| w[0].common_passed >= w[1].common_passed);
    (rows, nested)
}

pub fn run_identifiability_survey(
    config: &SimConfig,
    jobs: usize,
) -> Result<SurveyReport, SimError> {
    config.validate()?;
    let slots = slots(config);
    let outcomes = par_map(jobs, &slots, |&slot| -> Result<_, SimError> {
        let inst = build(config, slot)?;
        let checks = k_checks(&inst.routing)?;
        let cert = certify_1_identifiable(&inst.routing)?;
        Ok((slot, inst.routing, cert, checks))
    })?;
    let mut certified = Vec::new();
    let mut by_boundary: Vec<Vec<_>> = vec![Vec::new(); config.boundary_counts.len()];
    for outcome in outcomes {
        let (slot, routing, cert, checks) = outcome?;
        if cert.verdict {
            certified.push(CertifiedInstance {
                boundary: slot.boundary,
                index: slot.index,
                seed: config.topology(slot.boundary, slot.index).seed,
                routing: (&routing).into(),
                certificate: cert,
            });
        }
        let pos = config
            .boundary_counts
            .iter()
            .position(|&b| b == slot.boundary)
            .expect("known boundary");
        by_boundary[pos].push(checks);
    }
    let mut rows = Vec::new();
    let mut nested = true;
    for (&boundary, checks) in config.boundary_counts.iter().zip(&by_boundary) {
        let (r, n) = survey_rows(boundary, checks);
        rows.extend(r);
        nested &= n;
    }
    Ok(SurveyReport {
        rows,
        nested,
        certified,
    })
}

impl SurveyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "boundary,k,passed,failed,skipped,fraction,ci_low,ci_high,common_passed,common_total\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.boundary,
                r.k,
                r.passed,
                r.failed,
                r.skipped,
                fmt_opt(r.fraction),
                fmt_opt(r.ci_low),
                fmt_opt(r.ci_high),
                r.common_passed,
                r.common_total
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// Table layout: one row per k, one column per boundary count.
    pub fn plot_csv(&self) -> String {
        let mut bounds: Vec<usize> = self.rows.iter().map(|r| r.boundary).collect();
        bounds.dedup();
        let mut out = String::from("k");
        for b in &bounds {
            out.push_str(&format!(",b{b}"));
        }
        out.push('\n');
        for k in SURVEY_K {
            out.push_str(&k.to_string());
            for b in &bounds {
                let f = self
                    .rows
                    .iter()
                    .find(|r| r.k == k && r.boundary == *b)
                    .and_then(|r| r.fraction);
                out.push_str(&format!(",{}", fmt_opt(f)));
            }
            out.push('\n');
        }
        out
    }
}

// recovery

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub boundary: usize,
    pub k: usize,
    pub mu: f64,
    /// Normalized l2 error per instance, in instance order.
    pub errors: Vec<f64>,
    pub mean: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
    /// Generated instances without a certificate, per boundary count.
    pub uncertified: Vec<(usize, usize)>,
    pub bound_checks: usize,
    pub bound_violations: usize,
}

/// `‖x − x̂‖₂ / ‖x‖₂`.
pub fn normalized_error(x: &[f64], estimate: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(estimate).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = x.iter().map(|a| a * a).sum();
    (num / den).sqrt()
}

struct Trial {
    errors: Vec<f64>,
    bound_checks: usize,
    bound_violations: usize,
}

/// Congested links get `congested_delay`; the rest `mu · e` with one
/// `Exp(1)` draw `e` per link shared by every `mu` (common random numbers).
fn recovery_trials(
    config: &SimConfig,
    slot: Slot,
    routing: &RoutingMatrix,
    cert: &ExpanderCertificate,
    k: usize,
) -> Result<Option<Trial>, SimError> {
    let n = routing.link_count();
    if k > n {
        return Ok(None);
    }
    let mut rng = stream_rng(
        config.seed,
        STREAM_RECOVERY | (k as u64) << 48,
        slot.boundary,
        slot.index,
    );
    let mut congested = index::sample(&mut rng, n, k).into_vec();
    congested.sort_unstable();
    let base: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
    let mut trial = Trial {
        errors: Vec::with_capacity(config.mu.len()),
        bound_checks: 0,
        bound_violations: 0,
    };
    for &mu in &config.mu {
        let xs: Vec<f64> = (0..n)
            .map(|j| {
                if congested.binary_search(&j).is_ok() {
                    config.congested_delay
                } else {
                    mu * base[j]
                }
            })
            .collect();
        let x = DelayVector::new(xs)?;
        let est = estimate_delays(routing, &x.measure(routing)?).map_err(|source| {
            SimError::Estimate {
                boundary: slot.boundary,
                index: slot.index,
                source,
            }
        })?;
        trial
            .errors
            .push(normalized_error(x.values(), &est.estimate));
        let bound = appendix_error_bound(&x, cert.max_epsilon())?;
        let scale = x.values().iter().sum::<f64>().max(1.0);
        trial.bound_checks += 1;
        if est.l1_error(x.values()) > bound + 1e-9 * scale {
            trial.bound_violations += 1;
        }
    }
    Ok(Some(trial))
}

pub fn run_recovery_experiment(config: &SimConfig, jobs: usize) -> Result<ErrorReport, SimError> {
    config.validate()?;
    let slots = slots(config);
    let outcomes = par_map(jobs, &slots, |&slot| -> Result<_, SimError> {
        let inst = build(config, slot)?;
        let cert = certify_1_identifiable(&inst.routing)?;
        if !cert.verdict {
            return Ok(None);
        }
        let trials = config
            .k
            .iter()
            .map(|&k| recovery_trials(config, slot, &inst.routing, &cert, k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(trials))
    })?;
    let mut report = ErrorReport {
        rows: Vec::new(),
        uncertified: config.boundary_counts.iter().map(|&b| (b, 0)).collect(),
        bound_checks: 0,
        bound_violations: 0,
    };
    for &boundary in &config.boundary_counts {
        for &k in &config.k {
            for &mu in &config.mu {
                report.rows.push(ErrorRow {
                    boundary,
                    k,
                    mu,
                    errors: Vec::new(),
                    mean: None,
                    max: None,
                });
            }
        }
    }
    let (nk, nmu) = (config.k.len(), config.mu.len());
    for (slot, outcome) in slots.iter().zip(outcomes) {
        let b = config
            .boundary_counts
            .iter()
            .position(|&b| b == slot.boundary)
            .expect("known boundary");
        let Some(trials) = outcome? else {
            report.uncertified[b].1 += 1;
            continue;
        };
        for (ki, trial) in trials.into_iter().enumerate() {
            let Some(trial) = trial else { continue };
            report.bound_checks += trial.bound_checks;
            report.bound_violations += trial.bound_violations;
            for (mi, e) in trial.errors.into_iter().enumerate() {
                report.rows[(b * nk + ki) * nmu + mi].errors.push(e);
            }
        }
    }
    for row in &mut report.rows {
        row.mean = mean(&row.errors);
        row.max = row.errors.iter().copied().reduce(f64::max);
    }
    Ok(report)
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl ErrorReport {
    /// Mean error per `(k, mu)` pooled over boundary counts, in config order.
    pub fn pooled(&self) -> Vec<(usize, f64, Option<f64>)> {
        let mut keys: Vec<(usize, f64)> = Vec::new();
        for r in &self.rows {
            if !keys.iter().any(|&(k, m)| k == r.k && m == r.mu) {
                keys.push((r.k, r.mu));
            }
        }
        keys.into_iter()
            .map(|(k, mu)| {
                let all: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.k == k && r.mu == mu)
                    .flat_map(|r| r.errors.iter().copied())
                    .collect();
                (k, mu, mean(&all))
            })
            .collect()
    }

    /// Whether the pooled mean for `k` never decreases along the mu grid.
    pub fn nondecreasing_in_mu(&self, k: usize) -> bool {
        let means: Vec<f64> = self
            .pooled()
            .into_iter()
            .filter(|p| p.0 == k)
            .filter_map(|p| p.2)
            .collect();
        means.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("boundary,k,mu,instances,mean_error,max_error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.boundary,
                r.k,
                r.mu,
                r.errors.len(),
                fmt_opt(r.mean),
                fmt_opt(r.max)
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// x = mu, y = mean error, one series per k.
    pub fn plot_csv(&self) -> String {
        let mut out = String::from("mu,k,mean_error\n");
        for (k, mu, m) in self.pooled() {
            out.push_str(&format!("{mu},{k},{}\n", fmt_opt(m)));
        }
        out
    }
}

// min paths

/// r/n for one instance, kept as a reduced fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRatio {
    pub boundary: usize,
    pub index: usize,
    pub selected: usize,
    pub links: usize,
}

impl PathRatio {
    pub fn ratio(&self) -> Ratio<usize> {
        Ratio::new(self.selected, self.links)
    }

    /// Bin index by exact arithmetic; a ratio of 1 lands in the last bin,
    /// ratios above 1 in none.
    pub fn bin(&self) -> Option<usize> {
        if self.selected > self.links {
            return None;
        }
        Some((self.selected * HISTOGRAM_BINS / self.links).min(HISTOGRAM_BINS - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioHistogram {
    pub bin_width: f64,
    pub counts: Vec<usize>,
    /// Selections with more paths than links.
    pub above_one: usize,
    pub ratios: Vec<PathRatio>,
    /// Certified instances where the heuristic returned no selection.
    pub failures: usize,
    pub uncertified: usize,
    /// Lower edge of the fullest bin (lowest on ties).
    pub mode: Option<f64>,
    pub note: Option<String>,
}

impl RatioHistogram {
    pub fn from_ratios(ratios: Vec<PathRatio>, failures: usize, uncertified: usize) -> Self {
        let mut counts = vec![0; HISTOGRAM_BINS];
        let mut above_one = 0;
        for r in &ratios {
            match r.bin() {
                Some(b) => counts[b] += 1,
                None => above_one += 1,
            }
        }
        let top = counts.iter().copied().max().unwrap_or(0);
        let mode = (top > 0).then(|| {
            counts.iter().position(|&c| c == top).expect("max exists") as f64
                / HISTOGRAM_BINS as f64
        });
        let note = ratios
            .is_empty()
            .then(|| "no instance produced a heuristic selection".to_string());
        RatioHistogram {
            bin_width: 1.0 / HISTOGRAM_BINS as f64,
            counts,
            above_one,
            ratios,
            failures,
            uncertified,
            mode,
            note,
        }
    }

    pub fn successes(&self) -> usize {
        self.ratios.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{c}\n",
                i as f64 / HISTOGRAM_BINS as f64,
                (i + 1) as f64 / HISTOGRAM_BINS as f64
            ));
        }
        out.push_str(&format!("1,,{}\n", self.above_one));
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

/// Heuristic path count over link count, on a certified routing matrix.
pub fn minpath_ratio(
    routing: &RoutingMatrix,
    max_rounds: Option<usize>,
) -> Result<(usize, usize), PathSelError> {
    let rounds = max_rounds.unwrap_or(routing.path_count());
    let sel = identifiability_heuristic(routing, rounds)?;
    Ok((sel.selected().len(), routing.link_count()))
}

/// Heuristic selections on the certified instances only; uncertified ones
/// and heuristic failures are counted apart from the histogram.
pub fn run_minpath_survey(config: &SimConfig, jobs: usize) -> Result<RatioHistogram, SimError> {
    config.validate()?;
    let slots = slots(config);
    let outcomes = par_map(jobs, &slots, |&slot| -> Result<_, SimError> {
        let inst = build(config, slot)?;
        if !certify_1_identifiable(&inst.routing)?.verdict {
            return Ok(None);
        }
        Ok(Some(minpath_ratio(&inst.routing, config.heuristic_rounds)))
    })?;
    let (mut ratios, mut failures, mut uncertified) = (Vec::new(), 0, 0);
    for (slot, outcome) in slots.iter().zip(outcomes) {
        match outcome? {
            None => uncertified += 1,
            Some(Ok((selected, links))) => ratios.push(PathRatio {
                boundary: slot.boundary,
                index: slot.index,
                selected,
                links,
            }),
            Some(Err(PathSelError::Lp(e))) => return Err(PathSelError::Lp(e).into()),
            Some(Err(_)) => failures += 1,
        }
    }
    Ok(RatioHistogram::from_ratios(ratios, failures, uncertified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn small() -> SimConfig {
        SimConfig {
            instances: 4,
            nodes: 40,
            exponent: 2.1,
            boundary_counts: vec![4, 6],
            k: vec![1, 2],
            congested_delay: 10.0,
            mu: vec![0.0, 0.5, 1.0],
            seed: 11,
            heuristic_rounds: None,
        }
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = SimConfig::from_json(
            r#"{"instances": 2, "nodes": 30, "boundary_counts": [5], "seed": 1}"#,
        )
        .unwrap();
        assert_eq!(c.k, vec![1, 2, 3]);
        assert_eq!(c.mu.len(), 11);
        assert_eq!(c.congested_delay, 10.0);
        for bad in [
            r#"{"instances": 0, "nodes": 30, "boundary_counts": [5], "seed": 1}"#,
            r#"{"instances": 1, "nodes": 30, "boundary_counts": [5], "k": [0], "seed": 1}"#,
            r#"{"instances": 1, "nodes": 30, "boundary_counts": [5], "mu": [-1], "seed": 1}"#,
            r#"{"instances": 1, "nodes": 30, "boundary_counts": [5], "mu": [20], "seed": 1}"#,
            r#"{"instances": 1, "nodes": 5, "boundary_counts": [5], "seed": 1}"#,
            r#"{"instances": 1, "nodes": 30, "boundary_counts": [5], "seed": 1, "extra": 2}"#,
        ] {
            assert!(SimConfig::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn wilson_matches_reference() {
        // 8 of 10 at 95%: (0.4902, 0.9433)
        let (lo, hi) = wilson_interval(8, 10).unwrap();
        assert!((lo - 0.4902).abs() < 1e-4 && (hi - 0.9433).abs() < 1e-4);
        assert_eq!(wilson_interval(0, 0), None);
        let (lo, hi) = wilson_interval(5, 5).unwrap();
        assert!(hi == 1.0 && lo > 0.5);
    }

    #[test]
    fn reports_independent_of_jobs() {
        let c = small();
        assert_eq!(
            run_recovery_experiment(&c, 1).unwrap(),
            run_recovery_experiment(&c, 3).unwrap()
        );
        assert_eq!(
            run_identifiability_survey(&c, 1).unwrap(),
            run_identifiability_survey(&c, 4).unwrap()
        );
    }

    #[test]
    fn recovery_exact_without_background() {
        let report = run_recovery_experiment(&small(), 2).unwrap();
        for row in report.rows.iter().filter(|r| r.k == 1 && r.mu == 0.0) {
            assert!(row.errors.iter().all(|&e| e <= 1e-6), "{row:?}");
        }
        assert_eq!(report.bound_violations, 0);
    }

    #[test]
    fn four_probe_paths_give_ratio_six_tenths() {
        let (r, n) = minpath_ratio(&fixtures::five_link_routing(), None).unwrap();
        assert_eq!((r, n), (3, 5));
        let h = RatioHistogram::from_ratios(
            vec![PathRatio {
                boundary: 4,
                index: 0,
                selected: r,
                links: n,
            }],
            0,
            0,
        );
        assert_eq!(h.counts[12], 1);
        assert_eq!(h.mode, Some(0.6));
    }

    #[test]
    fn empty_histogram_has_note() {
        let h = RatioHistogram::from_ratios(Vec::new(), 2, 1);
        assert_eq!(h.mode, None);
        assert!(h.note.is_some());
        assert_eq!(h.counts.iter().sum::<usize>(), 0);
    }

    #[test]
    fn full_ratio_in_last_bin() {
        let p = PathRatio {
            boundary: 2,
            index: 0,
            selected: 4,
            links: 4,
        };
        assert_eq!(p.bin(), Some(HISTOGRAM_BINS - 1));
        let h = RatioHistogram::from_ratios(vec![p.clone(), PathRatio { selected: 5, ..p }], 0, 0);
        assert_eq!(h.above_one, 1);
        assert_eq!(h.counts.iter().sum::<usize>() + h.above_one, h.successes());
    }
}
