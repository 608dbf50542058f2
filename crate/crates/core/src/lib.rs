//! Bayesian quantum state tomography with a preconditioned Crank–Nicolson sampler.
//!
//! The crate is organized around the tomography workflow:
//!
//! - [`states`]: density matrices built from an over-parameterization
//!   `x = {y_1..y_D, z_1..z_D}`, the SU(D) generator (Bloch) decomposition and
//!   the projector onto the generator directions a measurement set observes.
//! - [`measurements`]: Weyl-operator mutually unbiased bases, POVM sets with a
//!   precomputed probability map, simulated count data and least-squares
//!   inversion.
//! - [`inference`]: Gamma/Gaussian prior, pseudo- and multinomial likelihoods,
//!   the pCN Metropolis–Hastings chain, a slice-sampling baseline and posterior
//!   expectations.
//! - [`bench`]: convergence and cost-scaling studies and their reports.
//! - [`cli`]: the `pcn-qst` command line front end.
//!
//! ```no_run
//! use pcn_qst::inference::{pcn_chain, posterior_expectation, LikelihoodSpec, PriorConfig, SamplerConfig};
//! use pcn_qst::measurements::{ground_truth_state, simulate_counts, two_qudit_mub_measurements, bell_state};
//! use pcn_qst::states::fidelity;
//! use std::sync::Arc;
//!
//! let m = Arc::new(two_qudit_mub_measurements(2).unwrap());
//! let truth = ground_truth_state(2, 0.95).unwrap();
//! let counts = simulate_counts(&truth, &m, 400, 42).unwrap();
//! let lik = LikelihoodSpec::full(&counts, m.clone()).unwrap();
//! let chain = pcn_chain(&PriorConfig::new(1.0, 4).unwrap(), &lik, &SamplerConfig::default()).unwrap();
//! let psi = bell_state(2);
//! let (mean, std) = posterior_expectation(&chain, |rho| fidelity(rho, &psi).unwrap()).unwrap();
//! println!("F = {mean:.4} ± {std:.4}");
//! ```

pub mod bench;
pub mod cli;
mod error;
pub mod inference;
pub mod io;
pub mod linalg;
pub mod measurements;
pub mod rng;
pub mod states;

pub use error::{Error, Result};
