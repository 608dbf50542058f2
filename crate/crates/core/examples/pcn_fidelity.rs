//! Posterior fidelity of a noisy Bell state under the full and pseudo likelihoods.

use pcn_qst::inference::{pcn_chain, posterior_expectation, LikelihoodSpec, PriorConfig, SamplerConfig, Sigma2Rule};
use pcn_qst::measurements::{bell_state, ground_truth_state, simulate_counts, two_qudit_mub_measurements};
use pcn_qst::states::fidelity;
use std::sync::Arc;

fn main() -> pcn_qst::Result<()> {
    let (d, lambda) = (2, 0.95);
    let m = Arc::new(two_qudit_mub_measurements(d)?);
    let counts = simulate_counts(&ground_truth_state(d, lambda)?, &m, 400, 42)?;
    let psi = bell_state(d);
    let prior = PriorConfig::new(1.0, m.dim())?;
    let cfg = SamplerConfig {
        seed: 7,
        ..Default::default()
    };
    println!("true fidelity {:.4}", lambda + (1.0 - lambda) / m.dim() as f64);

    for lik in [
        LikelihoodSpec::full(&counts, m.clone())?,
        LikelihoodSpec::pseudo(&counts, &m, Sigma2Rule::InverseN)?,
    ] {
        let chain = pcn_chain(&prior, &lik, &cfg)?;
        let (f, df) = posterior_expectation(&chain, |rho| fidelity(rho, &psi).unwrap_or(f64::NAN))?;
        println!(
            "{:6}  F = {f:.4} ± {df:.4}  acceptance {:.3}  beta = ({:.3}, {:.3})",
            lik.kind(),
            chain.acceptance_rate,
            chain.final_steps.beta_y,
            chain.final_steps.beta_z
        );
    }
    Ok(())
}
