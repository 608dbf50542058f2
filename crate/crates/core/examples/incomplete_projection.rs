//! Two-qubit X/Z measurements observe only part of the Bloch vector. The
//! least-squares estimate recovers exactly the projection of the truth onto
//! the observed generator directions.

use pcn_qst::measurements::least_squares_estimate;
use pcn_qst::measurements::{ground_truth_state, outcome_probabilities, two_qubit_xz_measurements, CountData};
use pcn_qst::states::{project_observed, DensityMatrix};

fn main() -> pcn_qst::Result<()> {
    let m = two_qubit_xz_measurements()?;
    let truth = ground_truth_state(2, 0.8)?;
    let subspace = m.subspace();
    let labels: Vec<&str> = subspace.indices().iter().map(|&k| m.basis().label(k)).collect();
    println!("observed generators ({}): {}", labels.len(), labels.join(" "));

    // Exact frequencies scaled to large integer counts.
    let scale = 1e12;
    let counts = (0..m.num_settings())
        .map(|q| {
            Ok(outcome_probabilities(&truth, &m, q)?
                .iter()
                .map(|p| (p * scale).round() as u64)
                .collect())
        })
        .collect::<pcn_qst::Result<Vec<Vec<u64>>>>()?;
    let (rho_ls, _) = least_squares_estimate(&CountData::new(counts)?, &m)?;
    let projected = project_observed(truth.matrix(), subspace)?;
    println!("‖ρ_LS − P_M(ρ)‖_F = {:.3e}", (&rho_ls - &projected).norm());
    println!("‖ρ − P_M(ρ)‖_F    = {:.3e}", (truth.matrix() - &projected).norm());
    match DensityMatrix::new(rho_ls) {
        Ok(_) => println!("the estimate happens to be physical"),
        Err(e) => println!("the estimate is not a state: {e}"),
    }
    Ok(())
}
