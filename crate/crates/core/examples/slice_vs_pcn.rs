//! Density-evaluation cost of the slice baseline against pCN at equal (R, T).

use pcn_qst::inference::{pcn_chain, posterior_expectation, slice_chain, LikelihoodSpec, PriorConfig, SamplerConfig};
use pcn_qst::measurements::{bell_state, ground_truth_state, simulate_counts, two_qudit_mub_measurements};
use pcn_qst::states::fidelity;
use std::sync::Arc;

fn main() -> pcn_qst::Result<()> {
    let m = Arc::new(two_qudit_mub_measurements(2)?);
    let counts = simulate_counts(&ground_truth_state(2, 0.95)?, &m, 400, 42)?;
    let lik = LikelihoodSpec::full(&counts, m.clone())?;
    let prior = PriorConfig::new(1.0, m.dim())?;
    let psi = bell_state(2);
    let cfg = SamplerConfig {
        retained: 256,
        thin: 4,
        burn_in: 256,
        seed: 3,
        ..Default::default()
    };

    let pcn = pcn_chain(&prior, &lik, &cfg)?;
    let slice = slice_chain(&prior, &lik, &cfg)?;
    for (name, chain) in [("pcn", &pcn), ("slice", &slice)] {
        let (f, df) = posterior_expectation(chain, |rho| fidelity(rho, &psi).unwrap_or(f64::NAN))?;
        println!(
            "{name:5}  F = {f:.4} ± {df:.4}  evaluations {:8}  ({:.1} per iteration, {:.2} s)",
            chain.density_evals,
            chain.evals_per_iteration(),
            chain.sampling_seconds
        );
    }
    println!(
        "slice/pcn evaluation ratio {:.1}",
        slice.density_evals as f64 / pcn.density_evals as f64
    );
    Ok(())
}
