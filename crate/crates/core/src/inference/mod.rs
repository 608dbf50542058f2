//! Posterior sampling over the density-matrix parameterization.
//!
//! The prior draws each weight `y_k` from `Gamma(α, 1)` and every component
//! of each direction `z_k` with independent standard-normal real and imaginary
//! parts, so that `π₀(x) ∝ Π_k y_k^(α−1) e^(−y_k) e^(−½ z_k†z_k)`. Normalized
//! weights are then `Dirichlet(α)` and the normalized directions are uniform
//! on the complex unit sphere.

mod chain;
mod likelihood;
mod pcn;
mod slice;

pub(crate) use chain::mean_std;
pub use chain::{
    functional_values, posterior_expectation, ChainFile, ChainMeta, PosteriorChain, SampleRecord, SamplerKind,
};
pub use likelihood::{
    log_full_likelihood, log_pseudo_likelihood, FullLikelihood, LikelihoodKind, LikelihoodSpec, PseudoLikelihood,
    Sigma2Rule,
};
pub use pcn::{
    adaptation_factor, log_acceptance, log_acceptance_from_values, pcn_chain, pcn_propose, SamplerConfig, StepSizes,
    BETA_MAX, BETA_MIN,
};
pub use slice::{slice_chain, SLICE_MAX_STEPS, SLICE_WIDTH};

use crate::linalg::CMatrix;
use crate::states::ParamVector;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

/// Shape `α` of the Gamma weights and the Hilbert dimension `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    pub alpha: f64,
    pub dim: usize,
}

impl PriorConfig {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        let cfg = Self { alpha, dim };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidConfig("prior dimension must be at least 1".into()));
        }
        Ok(())
    }
}

/// One complex normal with independent unit-variance real and imaginary parts.
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Draws `x` from the prior.
pub fn sample_prior<R: Rng + ?Sized>(cfg: &PriorConfig, rng: &mut R) -> ParamVector {
    let gamma = Gamma::new(cfg.alpha, 1.0).expect("alpha validated positive");
    let dim = cfg.dim;
    let y = (0..dim)
        .map(|_| loop {
            // Tiny shapes can underflow to exactly zero.
            let v: f64 = gamma.sample(rng);
            if v > 0.0 {
                break v;
            }
        })
        .collect();
    let z = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    ParamVector::from_parts_unchecked(y, z)
}

/// Unnormalized log prior density `Σ_k (α−1) ln y_k − y_k − ½|z_k|²`.
pub fn log_prior(x: &ParamVector, alpha: f64) -> f64 {
    let ys: f64 = x.y().iter().map(|&y| (alpha - 1.0) * y.ln() - y).sum();
    ys - 0.5 * x.z().norm_squared()
}
