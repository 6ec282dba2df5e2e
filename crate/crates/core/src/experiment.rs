//! Monte Carlo harness: capacity histograms, bound audits and sweeps.
//!
//! Trial `i` draws everything from the child stream `(master_seed, "trial", i)`,
//! so results do not depend on how trials are scheduled across workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    cut_tail_bound, expected_cut_capacity, full_report, upper_bound_report, BoundReport, PPrimeSource, TailBound,
    DEFAULT_P_PRIME_SAMPLES,
};
use crate::cut::{cut_capacity, min_cut};
use crate::error::{Error, Result};
use crate::field::Gf256;
use crate::graph::ConnectivityGraph;
use crate::model::ConnectionModel;
use crate::rlnc::{build_coding_dag, code_trial, DagOutcome};
use crate::rng::{Seed, STREAM_VERSION};
use crate::scalar::Real;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const CONSTANTS_NOTE: &str =
    "failure probabilities use proof-explicit constants: 2*tau/n^2 (lower) and 2*n^(-4/3) (upper)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    pub epsilons: Vec<f64>,
    pub k_list: Vec<usize>,
    #[serde(default)]
    pub basis: PPrimeBasis,
}

/// Which p' value the audit plugs into thresholds and bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PPrimeBasis {
    /// The Monte Carlo point value from the bound report.
    #[default]
    Estimate,
    /// The upper end of the closed-form interval.
    IntervalUpper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
pub struct ExperimentConfig<T> {
    pub n_relays: usize,
    pub n_terminals: usize,
    pub model: ConnectionModel<T>,
    pub trials: usize,
    pub master_seed: u64,
    /// `None` selects unit-width bins aligned to the integers.
    pub histogram_bins: Option<usize>,
    pub audit: Option<AuditSpec>,
    pub rlnc_check: bool,
    /// Monte Carlo pairs for the p' point value in the bound report.
    pub p_prime_samples: usize,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn new(
        n_relays: usize,
        n_terminals: usize,
        model: ConnectionModel<T>,
        trials: usize,
        master_seed: u64,
    ) -> Self {
        ExperimentConfig {
            n_relays,
            n_terminals,
            model,
            trials,
            master_seed,
            histogram_bins: None,
            audit: None,
            rlnc_check: false,
            p_prime_samples: DEFAULT_P_PRIME_SAMPLES,
            notes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_relays < 2 {
            return Err(Error::param(format!("experiments need at least 2 relays, got {}", self.n_relays)));
        }
        if self.n_terminals == 0 {
            return Err(Error::param("at least one terminal is required"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.histogram_bins == Some(0) {
            return Err(Error::param("histogram_bins must be at least 1"));
        }
        if self.p_prime_samples == 0 {
            return Err(Error::param("p_prime_samples must be at least 1"));
        }
        if let Some(audit) = &self.audit {
            check_audit(self.n_relays, &audit.epsilons, &audit.k_list)?;
        }
        Ok(())
    }

    /// Cut sizes sampled each trial: always 0, plus the audit list.
    fn sampled_ks(&self) -> Vec<usize> {
        let mut ks = vec![0];
        if let Some(audit) = &self.audit {
            ks.extend(&audit.k_list);
        }
        ks.sort_unstable();
        ks.dedup();
        ks
    }
}

fn check_audit(n: usize, epsilons: &[f64], k_list: &[usize]) -> Result<()> {
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::param(format!("audit epsilon must lie in (0,1), got {e}")));
    }
    if let Some(k) = k_list.iter().find(|&&k| k >= n) {
        return Err(Error::param(format!("audit cut size k={k} must be below n={n}")));
    }
    Ok(())
}

/// Parameter sets for the two histogram experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Fig4,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Preset> {
        match name {
            "fig3" => Some(Preset::Fig3),
            "fig4" => Some(Preset::Fig4),
            _ => None,
        }
    }

    /// `(n, r, r')`.
    pub fn geometry(self) -> (usize, f64, f64) {
        match self {
            Preset::Fig3 => (200, 0.1, 0.2),
            Preset::Fig4 => (200, 0.13, 0.18),
        }
    }

    /// Preset with p = 0.5 and one terminal.
    pub fn config<T: Real>(self, trials: usize, master_seed: u64) -> ExperimentConfig<T> {
        let (n, r, r_prime) = self.geometry();
        let model = ConnectionModel::fixed(T::lit(r), T::lit(r_prime), T::lit(0.5)).expect("preset model is valid");
        let mut config = ExperimentConfig::new(n, 1, model, trials, master_seed);
        config.notes.push("p=0.5 and tau=1 are inferred defaults, not stated with the figure".into());
        config
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RlncOutcome {
    Success,
    Failure,
    CyclicSkip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub capacity: u64,
    pub per_terminal_cuts: Vec<u64>,
    /// `(k, C_k)` with `V_k` the first `k` relays of the trial graph.
    pub cuts: Vec<(usize, u64)>,
    pub rlnc: Option<RlncOutcome>,
}

pub fn trial_seed(master_seed: u64, trial_index: usize) -> Seed {
    Seed(master_seed).child("trial", trial_index as u64)
}

/// One graph realisation and its capacities. Relay positions are i.i.d., so
/// a fixed prefix of relays is a uniformly random `k`-subset.
pub fn run_trial<T: Real>(config: &ExperimentConfig<T>, trial_index: usize) -> Result<TrialOutcome> {
    if trial_index >= config.trials {
        return Err(Error::param(format!("trial index {trial_index} out of range for {} trials", config.trials)));
    }
    let seed = trial_seed(config.master_seed, trial_index);
    let graph = ConnectivityGraph::build(config.n_relays, config.n_terminals, &config.model, seed)?;
    let per_terminal_cuts =
        graph.terminals().iter().map(|&t| min_cut(&graph, t).map(|c| c.capacity)).collect::<Result<Vec<_>>>()?;
    let capacity = per_terminal_cuts.iter().copied().min().unwrap_or(0);
    let first_terminal = graph.terminals()[0];
    let cuts = config
        .sampled_ks()
        .into_iter()
        .map(|k| cut_capacity(&graph, first_terminal, &graph.relays()[..k]).map(|c| (k, c)))
        .collect::<Result<Vec<_>>>()?;
    let rlnc = if config.rlnc_check { Some(rlnc_trial(&graph, capacity, seed)?) } else { None };
    Ok(TrialOutcome { capacity, per_terminal_cuts, cuts, rlnc })
}

fn rlnc_trial<T: Real>(graph: &ConnectivityGraph<T>, capacity: u64, seed: Seed) -> Result<RlncOutcome> {
    if capacity == 0 {
        return Ok(RlncOutcome::Success);
    }
    Ok(match build_coding_dag(graph, capacity as usize)? {
        DagOutcome::Cyclic(_) => RlncOutcome::CyclicSkip,
        DagOutcome::Acyclic(dag) => {
            let (ok, _) = code_trial::<Gf256, _>(&dag, &mut seed.child("rlnc", 0).rng());
            if ok {
                RlncOutcome::Success
            } else {
                RlncOutcome::Failure
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Unit-width bins `[v, v+1)` covering `min..=max`, or `bins` equal-width
    /// bins over `[min, max + 1)`.
    pub fn of(values: &[u64], bins: Option<usize>) -> Histogram {
        let lo = values.iter().copied().min().unwrap_or(0);
        let hi = values.iter().copied().max().unwrap_or(0) + 1;
        let bins = bins.unwrap_or((hi - lo) as usize);
        let width = (hi - lo) as f64 / bins as f64;
        let bin_edges = (0..=bins).map(|i| lo as f64 + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let idx = (((v - lo) as f64 / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Histogram { bin_edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutSamples {
    pub k: usize,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditCheck {
    /// Frequency of `C_k <= (1 - eps) E[C_k]` against the cut tail bound.
    CutLowerTail,
    /// Frequency of capacity above the upper high-probability bound.
    CapacityUpper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub check: AuditCheck,
    pub epsilon: f64,
    pub k: usize,
    pub threshold: f64,
    pub observed: f64,
    pub bound: f64,
    pub slack: f64,
    pub vacuous: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Provenance<T> {
    pub config: ExperimentConfig<T>,
    pub tool_version: String,
    pub master_seed: u64,
    pub stream_version: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ExperimentResult<T> {
    pub per_trial_capacity: Vec<u64>,
    pub mean: f64,
    pub std_dev: f64,
    pub histogram: Histogram,
    pub bound_report: BoundReport<T>,
    pub cut_samples: Vec<CutSamples>,
    pub audit_outcomes: Vec<AuditRow>,
    pub rlnc_success_fraction: Option<f64>,
    pub skipped_cyclic_fraction: Option<f64>,
    pub provenance: Provenance<T>,
}

impl<T> ExperimentResult<T> {
    pub fn coefficient_of_variation(&self) -> f64 {
        self.std_dev / self.mean
    }

    pub fn audit_passed(&self) -> bool {
        self.audit_outcomes.iter().all(|row| row.pass)
    }

    pub fn cut_values(&self, k: usize) -> Option<&[u64]> {
        self.cut_samples.iter().find(|s| s.k == k).map(|s| s.values.as_slice())
    }
}

/// Sample mean and (n - 1)-normalised standard deviation.
pub fn mean_and_std(values: &[u64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let sum: u128 = values.iter().map(|&v| u128::from(v)).sum();
    let mean = sum as f64 / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Runs on all available cores.
pub fn run_experiment<T: Real>(config: &ExperimentConfig<T>) -> Result<ExperimentResult<T>> {
    run_experiment_with_jobs(config, 0)
}

/// `jobs = 0` uses every available core. The result does not depend on `jobs`.
pub fn run_experiment_with_jobs<T: Real>(config: &ExperimentConfig<T>, jobs: usize) -> Result<ExperimentResult<T>> {
    config.validate()?;
    let outcomes = pool(jobs)?
        .install(|| (0..config.trials).into_par_iter().map(|i| run_trial(config, i)).collect::<Result<Vec<_>>>())?;

    let per_trial_capacity: Vec<u64> = outcomes.iter().map(|o| o.capacity).collect();
    let (mean, std_dev) = mean_and_std(&per_trial_capacity);
    let histogram = Histogram::of(&per_trial_capacity, config.histogram_bins);
    let cut_samples = config
        .sampled_ks()
        .into_iter()
        .enumerate()
        .map(|(slot, k)| CutSamples { k, values: outcomes.iter().map(|o| o.cuts[slot].1).collect() })
        .collect();

    let p_prime_seed = Seed(config.master_seed).child("p-prime", 0);
    let bound_report = full_report(
        config.n_relays,
        config.n_terminals,
        &config.model,
        0,
        PPrimeSource::Estimate { samples: config.p_prime_samples, seed: p_prime_seed },
    )?;

    let (rlnc_success_fraction, skipped_cyclic_fraction) = if config.rlnc_check {
        let count = |want: RlncOutcome| outcomes.iter().filter(|o| o.rlnc.as_ref() == Some(&want)).count();
        let skipped = count(RlncOutcome::CyclicSkip);
        let ran = config.trials - skipped;
        let success = (ran > 0).then(|| count(RlncOutcome::Success) as f64 / ran as f64);
        (success, Some(skipped as f64 / config.trials as f64))
    } else {
        (None, None)
    };

    let mut notes = vec![CONSTANTS_NOTE.to_string()];
    notes.extend(config.notes.iter().cloned());
    let mut result = ExperimentResult {
        per_trial_capacity,
        mean,
        std_dev,
        histogram,
        bound_report,
        cut_samples,
        audit_outcomes: Vec::new(),
        rlnc_success_fraction,
        skipped_cyclic_fraction,
        provenance: Provenance {
            config: config.clone(),
            tool_version: TOOL_VERSION.to_string(),
            master_seed: config.master_seed,
            stream_version: STREAM_VERSION.to_string(),
            notes,
        },
    };
    if let Some(audit) = &config.audit {
        result.audit_outcomes = audit_bounds_with(&result, &audit.epsilons, &audit.k_list, audit.basis)?;
    }
    Ok(result)
}

fn sampling_slack(bound: f64, trials: usize) -> f64 {
    3.0 * (bound * (1.0 - bound) / trials as f64).sqrt()
}

/// Empirical frequencies against the lower cut-tail bound for every
/// `(epsilon, k)` (k = 0 always included) and one upper-bound exceedance
/// row. Cut samples for every requested `k` must be present in `result`.
pub fn audit_bounds<T: Real>(
    result: &ExperimentResult<T>,
    epsilons: &[f64],
    k_list: &[usize],
) -> Result<Vec<AuditRow>> {
    audit_bounds_with(result, epsilons, k_list, PPrimeBasis::Estimate)
}

pub fn audit_bounds_with<T: Real>(
    result: &ExperimentResult<T>,
    epsilons: &[f64],
    k_list: &[usize],
    basis: PPrimeBasis,
) -> Result<Vec<AuditRow>> {
    let report = &result.bound_report;
    let n = report.n;
    check_audit(n, epsilons, k_list)?;
    if epsilons.is_empty() {
        return Ok(Vec::new());
    }
    let trials = result.per_trial_capacity.len();
    let p_prime = match basis {
        PPrimeBasis::Estimate => report.p_prime.as_f64(),
        PPrimeBasis::IntervalUpper => report.p_prime_interval.1.as_f64(),
    };
    let mut ks = vec![0];
    ks.extend(k_list);
    ks.sort_unstable();
    ks.dedup();

    let mut rows = Vec::new();
    for &epsilon in epsilons {
        for &k in &ks {
            let values =
                result.cut_values(k).ok_or_else(|| Error::param(format!("result holds no cut samples for k={k}")))?;
            let threshold = (1.0 - epsilon) * expected_cut_capacity(n, k, p_prime)?;
            let observed = frequency(values, |c| c <= threshold);
            let bound = if p_prime > 0.0 { cut_tail_bound(n, k, p_prime, epsilon)? } else { 1.0 };
            let slack = sampling_slack(bound, trials);
            rows.push(AuditRow {
                check: AuditCheck::CutLowerTail,
                epsilon,
                k,
                threshold,
                observed,
                bound,
                slack,
                vacuous: false,
                pass: observed <= bound + slack,
            });
        }
    }

    let upper = if p_prime > 0.0 {
        upper_bound_report(n, p_prime)?
    } else {
        TailBound { epsilon: f64::INFINITY, bound: 0.0, fail_prob: report.upper_fail_prob.as_f64(), vacuous: true }
    };
    let (epsilon, threshold, bound, vacuous) = (upper.epsilon, upper.bound, upper.fail_prob, upper.vacuous);
    let observed = frequency(&result.per_trial_capacity, |c| c > threshold);
    let slack = sampling_slack(bound, trials);
    rows.push(AuditRow {
        check: AuditCheck::CapacityUpper,
        epsilon,
        k: 0,
        threshold,
        observed,
        bound,
        slack,
        vacuous,
        pass: vacuous || observed <= bound + slack,
    });
    Ok(rows)
}

fn frequency(values: &[u64], hit: impl Fn(f64) -> bool) -> f64 {
    values.iter().filter(|&&v| hit(v as f64)).count() as f64 / values.len() as f64
}

/// How the outer radius of each sweep cell is derived from `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterRadius {
    Ratio(f64),
    Offset(f64),
    /// One `r'` per entry of the `r` list.
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub r_list: Vec<f64>,
    pub outer: OuterRadius,
    pub p_connection: f64,
    pub n_terminals: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub p_prime_samples: usize,
}

impl SweepConfig {
    /// Decay-kernel sweep with `r' = 1.8 r` and `p_connection = 0.9`.
    pub fn fig5(trials: usize, master_seed: u64) -> SweepConfig {
        SweepConfig {
            n_list: vec![50, 100, 150, 200, 250, 300],
            r_list: vec![0.05, 0.1, 0.15],
            outer: OuterRadius::Ratio(1.8),
            p_connection: 0.9,
            n_terminals: 1,
            trials,
            master_seed,
            p_prime_samples: 100_000,
        }
    }

    fn r_prime(&self, index: usize, r: f64) -> Result<f64> {
        match &self.outer {
            OuterRadius::Ratio(m) => Ok(r * m),
            OuterRadius::Offset(d) => Ok(r + d),
            OuterRadius::List(list) => {
                list.get(index).copied().ok_or_else(|| Error::param("r' list must have one entry per r value"))
            }
        }
    }

    /// Experiment configuration for one `(n, r)` cell.
    pub fn cell<T: Real>(&self, n: usize, r_index: usize) -> Result<ExperimentConfig<T>> {
        let r = *self.r_list.get(r_index).ok_or_else(|| Error::param("r index out of range"))?;
        let r_prime = self.r_prime(r_index, r)?;
        let model = ConnectionModel::linear_decay(T::lit(r), T::lit(r_prime), T::lit(self.p_connection))?;
        let mut config = ExperimentConfig::new(n, self.n_terminals, model, self.trials, self.master_seed);
        config.p_prime_samples = self.p_prime_samples;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub r: f64,
    pub r_prime: f64,
    pub mean: f64,
    pub std_dev: f64,
}

/// One row per `(n, r)` cell, sorted by `n` then `r`. Every cell shares the
/// master seed.
pub fn run_sweep<T: Real>(sweep: &SweepConfig, jobs: usize) -> Result<Vec<SweepRow>> {
    if sweep.n_list.is_empty() || sweep.r_list.is_empty() {
        return Err(Error::param("sweep needs non-empty n and r lists"));
    }
    if let OuterRadius::List(list) = &sweep.outer {
        if list.len() != sweep.r_list.len() {
            return Err(Error::param("r' list must have one entry per r value"));
        }
    }
    let mut cells: Vec<(usize, usize)> =
        sweep.n_list.iter().flat_map(|&n| (0..sweep.r_list.len()).map(move |ri| (n, ri))).collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(sweep.r_list[a.1].total_cmp(&sweep.r_list[b.1])));
    cells
        .into_iter()
        .map(|(n, ri)| {
            let config = sweep.cell::<T>(n, ri)?;
            let result = run_experiment_with_jobs(&config, jobs)?;
            Ok(SweepRow {
                n,
                r: sweep.r_list[ri],
                r_prime: config.model.r_prime().as_f64(),
                mean: result.mean,
                std_dev: result.std_dev,
            })
        })
        .collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut out = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &p in &idx[i..=j] {
                out[p] = avg;
            }
            i = j + 1;
        }
        out
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
