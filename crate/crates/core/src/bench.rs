//! Convergence and cost-scaling studies, summary statistics and report emission.

use crate::inference::{
    pcn_chain, posterior_expectation, slice_chain, ChainFile, LikelihoodKind, LikelihoodSpec, PosteriorChain,
    PriorConfig, SamplerConfig, SamplerKind, Sigma2Rule,
};
use crate::io::write_atomic;
use crate::linalg::CVector;
use crate::measurements::{
    bell_state, ground_truth_state, is_prime, simulate_counts, two_qudit_mub_measurements, CountData, MeasurementSet,
};
use crate::rng::derive_seed;
use crate::states::{fidelity, purity, DensityMatrix};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

/// Seed of chain `i` in a study: `seed ⊕ splitmix64(i)`. The same chain index
/// gets the same seed for every thinning factor.
pub fn chain_seed(seed: u64, chain: usize) -> u64 {
    derive_seed(seed, chain as u64)
}

/// Simulated two-qudit MUB data around the noisy Bell ground truth.
#[derive(Debug, Clone)]
pub struct StudyData {
    pub d: usize,
    pub lambda: f64,
    pub shots_per_setting: u64,
    pub measurements: Arc<MeasurementSet>,
    pub truth: DensityMatrix,
    pub counts: CountData,
    pub target: CVector,
}

impl StudyData {
    pub fn simulate(d: usize, lambda: f64, shots_per_setting: u64, seed: u64) -> Result<Self> {
        let measurements = Arc::new(two_qudit_mub_measurements(d)?);
        let truth = ground_truth_state(d, lambda)?;
        let counts = simulate_counts(&truth, &measurements, shots_per_setting, seed)?;
        Ok(Self {
            d,
            lambda,
            shots_per_setting,
            measurements,
            truth,
            counts,
            target: bell_state(d),
        })
    }

    pub fn dim(&self) -> usize {
        self.measurements.dim()
    }

    /// Fidelity of the ground truth with the Bell target, `λ + (1−λ)/D`.
    pub fn true_fidelity(&self) -> f64 {
        self.lambda + (1.0 - self.lambda) / self.dim() as f64
    }

    pub fn likelihood(&self, kind: LikelihoodKind, sigma2: Sigma2Rule) -> Result<LikelihoodSpec> {
        match kind {
            LikelihoodKind::Full => LikelihoodSpec::full(&self.counts, self.measurements.clone()),
            LikelihoodKind::Pseudo => LikelihoodSpec::pseudo(&self.counts, &self.measurements, sigma2),
            LikelihoodKind::Unit => Ok(LikelihoodSpec::unit(self.dim())),
        }
    }
}

/// Runs the requested sampler.
pub fn run_chain(
    sampler: SamplerKind,
    prior: &PriorConfig,
    lik: &LikelihoodSpec,
    cfg: &SamplerConfig,
) -> Result<PosteriorChain> {
    match sampler {
        SamplerKind::Pcn => pcn_chain(prior, lik, cfg),
        SamplerKind::Slice => slice_chain(prior, lik, cfg),
    }
}

/// Order statistics of a sample with Tukey whiskers at 1.5 × IQR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Smallest observation not below `q1 − 1.5 IQR`.
    pub lower_whisker: f64,
    /// Largest observation not above `q3 + 1.5 IQR`.
    pub upper_whisker: f64,
    pub outliers: usize,
    pub mean: f64,
    /// Sample standard deviation (divisor `n − 1`); zero for a single value.
    pub std: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BoxStats {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyChain);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalValidity("box statistics of non-finite values".into()));
        }
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        let (q1, median, q3) = (quantile(&s, 0.25), quantile(&s, 0.5), quantile(&s, 0.75));
        let iqr = q3 - q1;
        let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let lower_whisker = *s.iter().find(|&&v| v >= lo_fence).expect("q1 lies inside the fences");
        let upper_whisker = *s
            .iter()
            .rev()
            .find(|&&v| v <= hi_fence)
            .expect("q3 lies inside the fences");
        let outliers = s.iter().filter(|&&v| v < lo_fence || v > hi_fence).count();
        let mean = s.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            n,
            min: s[0],
            q1,
            median,
            q3,
            max: s[n - 1],
            lower_whisker,
            upper_whisker,
            outliers,
            mean,
            std,
        })
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidConfig("a slope needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Domain("log-log fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("log-log fit needs at least two distinct x values".into()));
    }
    Ok(sxy / sxx)
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

// ---------------------------------------------------------------------------
// Convergence study

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub d: usize,
    pub lambda: f64,
    pub shots_per_setting: u64,
    pub data_seed: u64,
    pub likelihood: LikelihoodKind,
    pub sigma2: Sigma2Rule,
    pub alpha: f64,
    pub sampler: SamplerKind,
    pub retained: usize,
    /// Zero by default: every chain starts from its own prior draw.
    pub burn_in: usize,
    pub thins: Vec<usize>,
    pub chains: usize,
    pub seed: u64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            d: 2,
            lambda: 0.95,
            shots_per_setting: 400,
            data_seed: 42,
            likelihood: LikelihoodKind::Full,
            sigma2: Sigma2Rule::InverseN,
            alpha: 1.0,
            sampler: SamplerKind::Pcn,
            retained: 1 << 10,
            burn_in: 0,
            thins: (0..10).map(|k| 1 << k).collect(),
            chains: 20,
            seed: 7,
        }
    }
}

impl ConvergenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thins.is_empty() || self.thins.contains(&0) {
            return Err(Error::InvalidConfig(
                "thinning grid must be non-empty and positive".into(),
            ));
        }
        if self.chains == 0 {
            return Err(Error::InvalidConfig("need at least one chain".into()));
        }
        if self.retained == 0 {
            return Err(Error::InvalidConfig("retained sample count must be positive".into()));
        }
        PriorConfig::new(self.alpha, 1).map(|_| ())
    }

    pub fn sampler_config(&self, thin: usize, chain: usize) -> SamplerConfig {
        SamplerConfig {
            retained: self.retained,
            thin,
            burn_in: self.burn_in,
            seed: chain_seed(self.seed, chain),
            ..Default::default()
        }
    }
}

/// One chain of the study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub thin: usize,
    pub chain: usize,
    pub seed: u64,
    pub mean_fidelity: f64,
    pub delta_fidelity: f64,
    pub acceptance_rate: f64,
    /// All density evaluations of the chain; the cost axis of the study.
    pub density_evals: u64,
    /// Density evaluations after burn-in.
    pub sampling_evals: u64,
    pub wall_seconds: f64,
}

/// Per-thinning summary across chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinSummary {
    pub thin: usize,
    pub chains: usize,
    /// Mean total density evaluations per chain, burn-in included.
    pub cost: f64,
    pub mean_fidelity: BoxStats,
    pub delta_fidelity: BoxStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ConvergenceConfig,
    pub true_fidelity: f64,
    pub records: Vec<ConvergenceRecord>,
    pub summaries: Vec<ThinSummary>,
}

impl ConvergenceReport {
    fn summarize(config: ConvergenceConfig, true_fidelity: f64, records: Vec<ConvergenceRecord>) -> Result<Self> {
        let summaries = config
            .thins
            .iter()
            .map(|&thin| {
                let group: Vec<&ConvergenceRecord> = records.iter().filter(|r| r.thin == thin).collect();
                let f: Vec<f64> = group.iter().map(|r| r.mean_fidelity).collect();
                let df: Vec<f64> = group.iter().map(|r| r.delta_fidelity).collect();
                let cost = group.iter().map(|r| r.density_evals as f64).sum::<f64>() / group.len() as f64;
                Ok(ThinSummary {
                    thin,
                    chains: group.len(),
                    cost,
                    mean_fidelity: BoxStats::of(&f)?,
                    delta_fidelity: BoxStats::of(&df)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            config,
            true_fidelity,
            records,
            summaries,
        })
    }

    /// Rebuilds the summaries after permuting or editing records.
    pub fn from_records(
        config: ConvergenceConfig,
        true_fidelity: f64,
        records: Vec<ConvergenceRecord>,
    ) -> Result<Self> {
        Self::summarize(config, true_fidelity, records)
    }

    /// `(cost, across-chain std of ⟨F⟩, across-chain std of ΔF)` per thinning factor.
    pub fn spreads(&self) -> Vec<(f64, f64, f64)> {
        self.summaries
            .iter()
            .map(|s| (s.cost, s.mean_fidelity.std, s.delta_fidelity.std))
            .collect()
    }
}

/// Runs `chains` independent chains at every thinning factor on one simulated dataset.
/// Chains run in parallel; results are ordered by `(thin, chain)`.
pub fn run_convergence_study(cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let data = StudyData::simulate(cfg.d, cfg.lambda, cfg.shots_per_setting, cfg.data_seed)?;
    let lik = data.likelihood(cfg.likelihood, cfg.sigma2)?;
    let prior = PriorConfig::new(cfg.alpha, data.dim())?;
    let jobs: Vec<(usize, usize)> = cfg
        .thins
        .iter()
        .flat_map(|&t| (0..cfg.chains).map(move |c| (t, c)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(thin, chain)| {
            let sc = cfg.sampler_config(thin, chain);
            let run = run_chain(cfg.sampler, &prior, &lik, &sc)?;
            let (mean_fidelity, delta_fidelity) =
                posterior_expectation(&run, |rho| fidelity(rho, &data.target).unwrap_or(f64::NAN))?;
            log::debug!("thin {thin} chain {chain}: F = {mean_fidelity:.5} ± {delta_fidelity:.5}");
            Ok(ConvergenceRecord {
                thin,
                chain,
                seed: sc.seed,
                mean_fidelity,
                delta_fidelity,
                acceptance_rate: run.acceptance_rate,
                density_evals: run.density_evals,
                sampling_evals: run.sampling_evals,
                wall_seconds: run.sampling_seconds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::summarize(cfg.clone(), data.true_fidelity(), records)
}

// ---------------------------------------------------------------------------
// Timing study

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    pub ds: Vec<usize>,
    pub lambda: f64,
    /// Shots per setting are `shots_factor · D`.
    pub shots_factor: u64,
    pub alpha: f64,
    pub retained: usize,
    pub burn_in: usize,
    pub sigma2: Sigma2Rule,
    pub seed: u64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            ds: vec![2, 3, 5, 7],
            lambda: 0.95,
            shots_factor: 100,
            alpha: 1.0,
            retained: 1 << 14,
            burn_in: 1 << 10,
            sigma2: Sigma2Rule::InverseN,
            seed: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub d: usize,
    pub dim: usize,
    pub likelihood: LikelihoodKind,
    pub mean_sample_seconds: f64,
    pub std_sample_seconds: f64,
    pub samples: usize,
    pub density_evals: u64,
    pub sampling_evals: u64,
    /// Post-burn-in density evaluations per proposal.
    pub evals_per_proposal: f64,
    /// Likelihood multiply-adds per evaluation, excluding the shared ρ(x) construction.
    pub ops_per_eval: u64,
    pub acceptance_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRatio {
    pub d: usize,
    /// Full over pseudo mean per-sample time.
    pub time_ratio: f64,
    /// Full over pseudo likelihood operations per evaluation.
    pub ops_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub config: TimingConfig,
    pub rows: Vec<TimingRow>,
    pub ratios: Vec<TimingRatio>,
}

/// Times pCN chains (thinning 1) for both likelihood kinds at every `d`.
/// Runs sequentially so that timings do not compete for cores.
pub fn run_timing_study(cfg: &TimingConfig) -> Result<TimingReport> {
    if cfg.ds.is_empty() {
        return Err(Error::InvalidConfig("timing study needs at least one d".into()));
    }
    if let Some(&d) = cfg.ds.iter().find(|&&d| !is_prime(d)) {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for (i, &d) in cfg.ds.iter().enumerate() {
        let dim = d * d;
        let data = StudyData::simulate(
            d,
            cfg.lambda,
            cfg.shots_factor * dim as u64,
            derive_seed(cfg.seed, i as u64),
        )?;
        let prior = PriorConfig::new(cfg.alpha, dim)?;
        let mut pair = Vec::with_capacity(2);
        for kind in [LikelihoodKind::Pseudo, LikelihoodKind::Full] {
            let lik = data.likelihood(kind, cfg.sigma2)?;
            let sc = SamplerConfig {
                retained: cfg.retained,
                thin: 1,
                burn_in: cfg.burn_in,
                seed: derive_seed(cfg.seed ^ 0x7469_6d65, i as u64),
                record_timings: true,
                ..Default::default()
            };
            let run = pcn_chain(&prior, &lik, &sc)?;
            let (mean, std) = crate::inference::mean_std(&run.sample_seconds);
            log::info!("d = {d} {kind}: {mean:.3e} s/sample");
            let row = TimingRow {
                d,
                dim,
                likelihood: kind,
                mean_sample_seconds: mean,
                std_sample_seconds: std,
                samples: run.len(),
                density_evals: run.density_evals,
                sampling_evals: run.sampling_evals,
                evals_per_proposal: run.sampling_evals as f64 / (cfg.retained as f64),
                ops_per_eval: lik.ops_per_eval(),
                acceptance_rate: run.acceptance_rate,
            };
            pair.push(row.clone());
            rows.push(row);
        }
        ratios.push(TimingRatio {
            d,
            time_ratio: pair[1].mean_sample_seconds / pair[0].mean_sample_seconds,
            ops_ratio: pair[1].ops_per_eval as f64 / pair[0].ops_per_eval.max(1) as f64,
        });
    }
    Ok(TimingReport {
        config: cfg.clone(),
        rows,
        ratios,
    })
}

// ---------------------------------------------------------------------------
// Posterior summaries of a stored chain

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSummary {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorReport {
    pub sampler: SamplerKind,
    pub likelihood: LikelihoodKind,
    pub d: usize,
    pub dim: usize,
    pub acceptance_rate: f64,
    pub density_evals: u64,
    pub functionals: Vec<FunctionalSummary>,
}

/// Named functionals recorded in compact chain files and reported by `report`.
pub fn standard_functionals(rho: &DensityMatrix, target: &CVector) -> Vec<(&'static str, f64)> {
    vec![
        ("fidelity", fidelity(rho, target).unwrap_or(f64::NAN)),
        ("purity", purity(rho)),
    ]
}

impl PosteriorReport {
    pub fn from_chain_file(file: &ChainFile) -> Result<Self> {
        let meta = &file.config.meta;
        let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
        if file.is_compact() {
            columns.extend(file.functionals.iter().map(|(k, v)| (k.clone(), v.clone())));
        } else {
            let target = bell_state(meta.d);
            if target.len() != meta.dim {
                return Err(Error::DimensionMismatch {
                    expected: meta.dim,
                    actual: target.len(),
                });
            }
            for x in file.params()? {
                let rho = crate::states::rho_from_params(&x)?;
                for (i, (name, v)) in standard_functionals(&rho, &target).into_iter().enumerate() {
                    if columns.len() <= i {
                        columns.push((name.to_string(), Vec::new()));
                    }
                    columns[i].1.push(v);
                }
            }
        }
        if columns.is_empty() || columns.iter().any(|(_, v)| v.is_empty()) {
            return Err(Error::EmptyChain);
        }
        let functionals = columns
            .into_iter()
            .map(|(name, v)| {
                let (mean, std) = crate::inference::mean_std(&v);
                FunctionalSummary {
                    name,
                    mean,
                    std,
                    samples: v.len(),
                }
            })
            .collect();
        Ok(Self {
            sampler: file.config.sampler,
            likelihood: meta.likelihood,
            d: meta.d,
            dim: meta.dim,
            acceptance_rate: file.acceptance_rate,
            density_evals: file.density_evals,
            functionals,
        })
    }
}

// ---------------------------------------------------------------------------
// Emission

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidConfig(format!(
                "unknown report format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// A report that can be written as one or more CSV tables.
pub trait Report: Serialize {
    /// `(suffix, table)` pairs. The table with an empty suffix is written to
    /// the requested path; others go to `<stem>.<suffix>.csv` next to it.
    fn csv_tables(&self) -> Vec<(&'static str, String)>;
}

impl Report for ConvergenceReport {
    fn csv_tables(&self) -> Vec<(&'static str, String)> {
        let mut records = String::from(
            "thin,chain,seed,mean_fidelity,delta_fidelity,acceptance_rate,density_evals,sampling_evals,wall_seconds\n",
        );
        for r in &self.records {
            let _ = writeln!(
                records,
                "{},{},{},{},{},{},{},{},{}",
                r.thin,
                r.chain,
                r.seed,
                sci(r.mean_fidelity),
                sci(r.delta_fidelity),
                sci(r.acceptance_rate),
                r.density_evals,
                r.sampling_evals,
                sci(r.wall_seconds)
            );
        }
        let mut summary = String::from(
            "thin,chains,cost,statistic,n,min,lower_whisker,q1,median,q3,upper_whisker,max,outliers,mean,std\n",
        );
        for s in &self.summaries {
            for (name, b) in [
                ("mean_fidelity", &s.mean_fidelity),
                ("delta_fidelity", &s.delta_fidelity),
            ] {
                let _ = writeln!(
                    summary,
                    "{},{},{},{name},{},{},{},{},{},{},{},{},{},{},{}",
                    s.thin,
                    s.chains,
                    sci(s.cost),
                    b.n,
                    sci(b.min),
                    sci(b.lower_whisker),
                    sci(b.q1),
                    sci(b.median),
                    sci(b.q3),
                    sci(b.upper_whisker),
                    sci(b.max),
                    b.outliers,
                    sci(b.mean),
                    sci(b.std)
                );
            }
        }
        vec![("", records), ("summary", summary)]
    }
}

impl Report for TimingReport {
    fn csv_tables(&self) -> Vec<(&'static str, String)> {
        let mut rows = String::from(
            "d,dim,likelihood,mean_sample_seconds,std_sample_seconds,samples,density_evals,sampling_evals,evals_per_proposal,ops_per_eval,acceptance_rate\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                rows,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.d,
                r.dim,
                r.likelihood,
                sci(r.mean_sample_seconds),
                sci(r.std_sample_seconds),
                r.samples,
                r.density_evals,
                r.sampling_evals,
                sci(r.evals_per_proposal),
                r.ops_per_eval,
                sci(r.acceptance_rate)
            );
        }
        let mut ratios = String::from("d,time_ratio,ops_ratio\n");
        for r in &self.ratios {
            let _ = writeln!(ratios, "{},{},{}", r.d, sci(r.time_ratio), sci(r.ops_ratio));
        }
        vec![("", rows), ("ratios", ratios)]
    }
}

impl Report for PosteriorReport {
    fn csv_tables(&self) -> Vec<(&'static str, String)> {
        let mut t = String::from("functional,mean,std,samples,sampler,likelihood,d,acceptance_rate,density_evals\n");
        for f in &self.functionals {
            let _ = writeln!(
                t,
                "{},{},{},{},{},{},{},{},{}",
                f.name,
                sci(f.mean),
                sci(f.std),
                f.samples,
                self.sampler,
                self.likelihood,
                self.d,
                sci(self.acceptance_rate),
                self.density_evals
            );
        }
        vec![("", t)]
    }
}

/// Path of a secondary CSV table: `dir/stem.suffix.csv`.
pub fn companion_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Writes `report` atomically. CSV emission may produce companion tables (see
/// [`Report::csv_tables`]); the paths written are returned.
pub fn emit_report<R: Report>(report: &R, path: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    match format {
        ReportFormat::Json => {
            crate::io::write_json_atomic(path, report)?;
            Ok(vec![path.to_path_buf()])
        }
        ReportFormat::Csv => {
            let mut written = Vec::new();
            for (suffix, table) in report.csv_tables() {
                let target = if suffix.is_empty() {
                    path.to_path_buf()
                } else {
                    companion_path(path, suffix)
                };
                write_atomic(&target, table.as_bytes())?;
                written.push(target);
            }
            Ok(written)
        }
    }
}
