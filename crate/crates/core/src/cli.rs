//! The `pcn-qst` command line: `simulate`, `infer`, `report`,
//! `bench-convergence` and `bench-timing`.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 on a runtime error.

use crate::bench::{
    emit_report, run_chain, run_convergence_study, run_timing_study, standard_functionals, ConvergenceConfig,
    PosteriorReport, ReportFormat, TimingConfig,
};
use crate::inference::{
    ChainFile, ChainMeta, LikelihoodKind, LikelihoodSpec, PriorConfig, SamplerConfig, SamplerKind, Sigma2Rule,
};
use crate::measurements::{
    bell_state, ground_truth_state, simulate_counts, CountsFile, GroundTruth, MeasurementKind, MeasurementSet,
};
use crate::states::rho_from_params;
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Debug, Parser)]
#[command(
    name = "pcn-qst",
    version,
    about = "Bayesian quantum state tomography with a pCN sampler"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate measurement counts for a noisy two-qudit Bell state.
    Simulate(SimulateArgs),
    /// Sample the posterior for a counts file and write the chain.
    Infer(InferArgs),
    /// Summarize a chain file (fidelity and purity).
    Report(ReportArgs),
    /// Spread of fidelity estimates across independent chains versus thinning.
    BenchConvergence(ConvergenceArgs),
    /// Per-sample time of the full and pseudo likelihoods versus dimension.
    BenchTiming(TimingArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Single-qudit dimension (prime).
    #[arg(long)]
    pub d: usize,
    /// Bell-state weight of the ground truth, in [0, 1].
    #[arg(long)]
    pub lambda: f64,
    /// Shots per measurement setting.
    #[arg(long)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Measurement set: mub2 or xz2qubit.
    #[arg(long = "type", default_value = "mub2")]
    pub kind: MeasurementKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub counts: PathBuf,
    /// pseudo, full or unit.
    #[arg(long, default_value = "full")]
    pub likelihood: LikelihoodKind,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// pcn or slice.
    #[arg(long, default_value = "pcn")]
    pub sampler: SamplerKind,
    /// Retained samples.
    #[arg(long = "R", default_value_t = 1024)]
    pub retained: usize,
    /// Thinning factor T.
    #[arg(long, default_value_t = 64)]
    pub thin: usize,
    #[arg(long, default_value_t = 1024)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pseudo-likelihood variance: 1/N, 2/N or a positive number.
    #[arg(long, default_value = "1/N")]
    pub sigma2: Sigma2Rule,
    /// Store per-sample fidelity and purity instead of full parameter vectors.
    #[arg(long)]
    pub compact: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub chain: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0.95)]
    pub lambda: f64,
    #[arg(long, default_value_t = 400)]
    pub shots: u64,
    /// Seed of the simulated data set.
    #[arg(long, default_value_t = 42)]
    pub data_seed: u64,
    #[arg(long, default_value = "full")]
    pub likelihood: LikelihoodKind,
    #[arg(long, default_value = "1/N")]
    pub sigma2: Sigma2Rule,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value = "pcn")]
    pub sampler: SamplerKind,
    #[arg(long = "R", default_value_t = 1024)]
    pub retained: usize,
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
    /// Thinning grid is 2^0 .. 2^max-log2-thin.
    #[arg(long, default_value_t = 9)]
    pub max_log2_thin: u32,
    #[arg(long, default_value_t = 20)]
    pub chains: usize,
    /// Base seed; chain i uses seed ⊕ splitmix64(i).
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Comma-separated prime single-qudit dimensions.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
    pub ds: Vec<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub lambda: f64,
    /// Shots per setting are this factor times D.
    #[arg(long, default_value_t = 100)]
    pub shots_factor: u64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "R", default_value_t = 16384)]
    pub retained: usize,
    #[arg(long, default_value_t = 1024)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 11)]
    pub seed: u64,
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Infer(a) => infer(a),
        Command::Report(a) => report(a),
        Command::BenchConvergence(a) => bench_convergence(a),
        Command::BenchTiming(a) => bench_timing(a),
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let m = MeasurementSet::from_kind(a.kind, a.d)?;
    let truth = ground_truth_state(a.d, a.lambda)?;
    let data = simulate_counts(&truth, &m, a.shots, a.seed)?;
    CountsFile::new(&m, &data, Some(GroundTruth { lambda: a.lambda }))?.write(&a.out)?;
    log::info!("wrote {} settings to {}", m.num_settings(), a.out.display());
    Ok(())
}

fn infer(a: InferArgs) -> Result<()> {
    let (m, data) = CountsFile::read(&a.counts)?.into_data()?;
    let m = Arc::new(m);
    let lik = match a.likelihood {
        LikelihoodKind::Full => LikelihoodSpec::full(&data, m.clone())?,
        LikelihoodKind::Pseudo => LikelihoodSpec::pseudo(&data, &m, a.sigma2)?,
        LikelihoodKind::Unit => LikelihoodSpec::unit(m.dim()),
    };
    let prior = PriorConfig::new(a.alpha, m.dim())?;
    let cfg = SamplerConfig {
        retained: a.retained,
        thin: a.thin,
        burn_in: a.burn_in,
        seed: a.seed,
        ..Default::default()
    };
    let chain = run_chain(a.sampler, &prior, &lik, &cfg)?;
    log::info!(
        "{} samples, acceptance {:.3}, {} density evaluations",
        chain.len(),
        chain.acceptance_rate,
        chain.density_evals
    );
    let meta = ChainMeta {
        d: m.local_dim(),
        dim: m.dim(),
        measurement: m.kind(),
        likelihood: lik.kind(),
        sigma2: lik.sigma2(),
        grand_total: data.grand_total(),
    };
    let file = if a.compact {
        let target = bell_state(m.local_dim());
        let mut columns: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for x in &chain.samples {
            for (name, v) in standard_functionals(&rho_from_params(x)?, &target) {
                columns.entry(name.to_string()).or_default().push(v);
            }
        }
        ChainFile::compact(&chain, meta, columns)
    } else {
        ChainFile::full(&chain, meta)
    };
    file.write(&a.out)
}

fn report(a: ReportArgs) -> Result<()> {
    let file = ChainFile::read(&a.chain)?;
    let rep = PosteriorReport::from_chain_file(&file)?;
    match a.out {
        Some(path) => emit_report(&rep, &path, a.format).map(|_| ()),
        None => {
            let text = match a.format {
                ReportFormat::Json => serde_json::to_string_pretty(&rep)
                    .map_err(|e| Error::InvalidConfig(format!("cannot serialize report: {e}")))?,
                ReportFormat::Csv => crate::bench::Report::csv_tables(&rep).remove(0).1,
            };
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn bench_convergence(a: ConvergenceArgs) -> Result<()> {
    if a.max_log2_thin > 20 {
        return Err(Error::InvalidConfig(format!(
            "--max-log2-thin {} is too large (at most 20)",
            a.max_log2_thin
        )));
    }
    let cfg = ConvergenceConfig {
        d: a.d,
        lambda: a.lambda,
        shots_per_setting: a.shots,
        data_seed: a.data_seed,
        likelihood: a.likelihood,
        sigma2: a.sigma2,
        alpha: a.alpha,
        sampler: a.sampler,
        retained: a.retained,
        burn_in: a.burn_in,
        thins: (0..=a.max_log2_thin).map(|k| 1usize << k).collect(),
        chains: a.chains,
        seed: a.seed,
    };
    let rep = run_convergence_study(&cfg)?;
    for p in emit_report(&rep, &a.out, a.format)? {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

fn bench_timing(a: TimingArgs) -> Result<()> {
    let cfg = TimingConfig {
        ds: a.ds,
        lambda: a.lambda,
        shots_factor: a.shots_factor,
        alpha: a.alpha,
        retained: a.retained,
        burn_in: a.burn_in,
        seed: a.seed,
        ..Default::default()
    };
    let rep = run_timing_study(&cfg)?;
    for r in &rep.ratios {
        log::info!("d = {}: full/pseudo time ratio {:.2}", r.d, r.time_ratio);
    }
    for p in emit_report(&rep, &a.out, a.format)? {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}
