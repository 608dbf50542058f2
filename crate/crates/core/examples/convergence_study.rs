//! Spread of fidelity estimates across independent chains as thinning grows.
//!
//! Pass an output path to also write the CSV tables.

use pcn_qst::bench::{emit_report, loglog_slope, run_convergence_study, ConvergenceConfig, ReportFormat};

fn main() -> pcn_qst::Result<()> {
    let cfg = ConvergenceConfig {
        thins: (0..7).map(|k| 1 << k).collect(),
        chains: 12,
        ..Default::default()
    };
    let report = run_convergence_study(&cfg)?;
    println!("true fidelity {:.4}", report.true_fidelity);
    println!(
        "{:>4} {:>9} {:>9} {:>9} {:>10} {:>10}",
        "T", "cost", "med F", "med dF", "sd(F)", "sd(dF)"
    );
    for s in &report.summaries {
        println!(
            "{:4} {:9.0} {:9.5} {:9.5} {:10.3e} {:10.3e}",
            s.thin, s.cost, s.mean_fidelity.median, s.delta_fidelity.median, s.mean_fidelity.std, s.delta_fidelity.std
        );
    }
    let spreads = report.spreads();
    let cost: Vec<f64> = spreads.iter().map(|s| s.0).collect();
    let sd_f: Vec<f64> = spreads.iter().map(|s| s.1).collect();
    let sd_df: Vec<f64> = spreads.iter().map(|s| s.2).collect();
    println!("log-log slope of sd(F) vs cost: {:.3}", loglog_slope(&cost, &sd_f)?);
    println!("log-log slope of sd(dF) vs cost: {:.3}", loglog_slope(&cost, &sd_df)?);

    if let Some(path) = std::env::args().nth(1) {
        for p in emit_report(&report, path.as_ref(), ReportFormat::Csv)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}
