//! Per-sample cost of the full and pseudo likelihoods as the dimension grows.
//! A shortened run by default; pass `--full` for 2^14 samples at d = 2, 3, 5, 7.

use pcn_qst::bench::{run_timing_study, TimingConfig};

fn main() -> pcn_qst::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let cfg = if full {
        TimingConfig::default()
    } else {
        TimingConfig {
            ds: vec![2, 3, 5],
            retained: 1 << 10,
            burn_in: 1 << 8,
            ..Default::default()
        }
    };
    let report = run_timing_study(&cfg)?;
    for r in &report.rows {
        println!(
            "d = {}  {:6}  {:.3e} ± {:.1e} s/sample  {} ops/eval  acceptance {:.3}",
            r.d, r.likelihood, r.mean_sample_seconds, r.std_sample_seconds, r.ops_per_eval, r.acceptance_rate
        );
    }
    for r in &report.ratios {
        println!(
            "d = {}  full/pseudo time {:.2}  ops {:.1}",
            r.d, r.time_ratio, r.ops_ratio
        );
    }
    Ok(())
}
