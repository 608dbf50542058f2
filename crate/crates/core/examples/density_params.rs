//! Build density matrices from prior draws and check that they are physical.

use pcn_qst::inference::{sample_prior, PriorConfig};
use pcn_qst::rng::seeded;
use pcn_qst::states::{bloch_coeffs, generator_basis, purity, rho_from_params};

fn main() -> pcn_qst::Result<()> {
    let mut rng = seeded(2024);
    for dim in [2, 4, 9] {
        let basis = generator_basis(dim)?;
        for alpha in [0.2, 1.0, 5.0] {
            let prior = PriorConfig::new(alpha, dim)?;
            let mut worst_eig = f64::INFINITY;
            let mut mean_purity = 0.0;
            let n = 500;
            for _ in 0..n {
                let rho = rho_from_params(&sample_prior(&prior, &mut rng))?;
                worst_eig = worst_eig.min(rho.residuals().min_eigenvalue);
                mean_purity += purity(&rho) / n as f64;
            }
            println!("D = {dim:2}  alpha = {alpha:3.1}  mean purity {mean_purity:.4}  min eigenvalue {worst_eig:+.2e}");
        }
        let rho = rho_from_params(&sample_prior(&PriorConfig::new(1.0, dim)?, &mut rng))?;
        let c = bloch_coeffs(rho.matrix(), &basis)?;
        println!("D = {dim:2}  first Bloch coefficients {:?}", &c[..c.len().min(3)]);
    }
    Ok(())
}
