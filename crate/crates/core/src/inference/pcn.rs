use super::chain::{PosteriorChain, SamplerKind};
use super::{complex_normal, log_prior, sample_prior, LikelihoodSpec, PriorConfig};
use crate::rng::seeded;
use crate::states::ParamVector;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Adapted step sizes never leave `[BETA_MIN, BETA_MAX]`.
pub const BETA_MIN: f64 = 1e-6;
pub const BETA_MAX: f64 = 0.999;
const INIT_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizes {
    pub beta_y: f64,
    pub beta_z: f64,
}

/// Run-length, thinning and step-size adaptation settings shared by both samplers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub beta_y: f64,
    pub beta_z: f64,
    /// Retained samples `R`.
    pub retained: usize,
    /// Thinning factor `T`: one sample kept per `T` iterations after burn-in.
    pub thin: usize,
    pub burn_in: usize,
    /// Proposals per adaptation window during burn-in.
    pub adapt_window: usize,
    pub adapt_factor: f64,
    /// Burn-in adaptation steers the window acceptance rate toward the centre of this band.
    pub acceptance_band: (f64, f64),
    pub seed: u64,
    /// Record the wall time spent producing each retained sample.
    #[serde(default)]
    pub record_timings: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            beta_y: 0.1,
            beta_z: 0.1,
            retained: 1 << 10,
            thin: 1 << 6,
            burn_in: 1 << 10,
            adapt_window: 100,
            adapt_factor: 1.1,
            acceptance_band: (0.1, 0.3),
            seed: 0,
            record_timings: false,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.beta_y) || !open_unit(self.beta_z) {
            return Err(Error::InvalidConfig(format!(
                "step sizes must lie in (0, 1), got beta_y = {}, beta_z = {}",
                self.beta_y, self.beta_z
            )));
        }
        if self.retained == 0 || self.thin == 0 {
            return Err(Error::InvalidConfig("R and T must be at least 1".into()));
        }
        if self.adapt_window == 0 {
            return Err(Error::InvalidConfig("adaptation window must be at least 1".into()));
        }
        if !(self.adapt_factor > 1.0 && self.adapt_factor.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "adapt_factor must exceed 1, got {}",
                self.adapt_factor
            )));
        }
        let (lo, hi) = self.acceptance_band;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidConfig(format!("invalid acceptance band ({lo}, {hi})")));
        }
        Ok(())
    }

    pub fn steps(&self) -> StepSizes {
        StepSizes {
            beta_y: self.beta_y,
            beta_z: self.beta_z,
        }
    }
}

/// pCN proposal: `y'_k = y_k e^(β_y η_k)` and `z'_k = √(1−β_z²) z_k + β_z ξ_k`.
pub fn pcn_propose<R: Rng + ?Sized>(x: &ParamVector, steps: StepSizes, rng: &mut R) -> ParamVector {
    let y = x
        .y()
        .iter()
        .map(|&y| {
            let eta: f64 = StandardNormal.sample(rng);
            y * (steps.beta_y * eta).exp()
        })
        .collect();
    let keep = (1.0 - steps.beta_z * steps.beta_z).sqrt();
    let mut z = x.z().scale(keep);
    for v in z.iter_mut() {
        *v += complex_normal(rng) * steps.beta_z;
    }
    ParamVector::from_parts_unchecked(y, z)
}

/// `min{0, ℓ(x') − ℓ(x) + Σ_k [α ln y'_k − y'_k − α ln y_k + y_k]}`.
///
/// The weight terms carry `α` rather than `α − 1` because the lognormal
/// proposal's Hastings ratio contributes `ln y'_k − ln y_k`. The direction
/// terms cancel exactly against the pCN proposal.
pub fn log_acceptance_from_values(
    prop: &ParamVector,
    cur: &ParamVector,
    ll_prop: f64,
    ll_cur: f64,
    alpha: f64,
) -> Result<f64> {
    if !ll_cur.is_finite() {
        return Err(Error::NumericalValidity(format!(
            "log-likelihood at the current point is {ll_cur}"
        )));
    }
    if prop.dim() != cur.dim() {
        return Err(Error::DimensionMismatch {
            expected: cur.dim(),
            actual: prop.dim(),
        });
    }
    if ll_prop.is_nan() || ll_prop == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let weights: f64 = prop
        .y()
        .iter()
        .zip(cur.y())
        .map(|(&yp, &yc)| alpha * (yp.ln() - yc.ln()) - (yp - yc))
        .sum();
    Ok((ll_prop - ll_cur + weights).min(0.0))
}

/// [`log_acceptance_from_values`] with the log-likelihood supplied as a function.
pub fn log_acceptance<F>(prop: &ParamVector, cur: &ParamVector, alpha: f64, mut loglik: F) -> Result<f64>
where
    F: FnMut(&ParamVector) -> Result<f64>,
{
    let ll_cur = loglik(cur)?;
    let ll_prop = loglik(prop)?;
    log_acceptance_from_values(prop, cur, ll_prop, ll_cur, alpha)
}

pub(crate) fn initial_point<R: Rng + ?Sized>(
    prior: &PriorConfig,
    lik: &LikelihoodSpec,
    rng: &mut R,
    evals: &mut u64,
) -> Result<(ParamVector, f64)> {
    for _ in 0..INIT_ATTEMPTS {
        let x = sample_prior(prior, rng);
        let ll = lik.log_likelihood(&x)?;
        *evals += 1;
        if ll.is_finite() {
            return Ok((x, ll));
        }
    }
    Err(Error::Initialization(INIT_ATTEMPTS))
}

pub(crate) fn check_inputs(prior: &PriorConfig, lik: &LikelihoodSpec, cfg: &SamplerConfig) -> Result<()> {
    prior.validate()?;
    cfg.validate()?;
    if prior.dim != lik.dim() {
        return Err(Error::DimensionMismatch {
            expected: lik.dim(),
            actual: prior.dim,
        });
    }
    Ok(())
}

/// Step-size multiplier after an adaptation window with acceptance rate `rate`:
/// `factor^(2(rate − c)/h)` for an acceptance band `c ± h`. The step sizes
/// grow by `factor²` at the upper band edge, shrink by `factor²` at the lower
/// edge and are pulled toward the band centre in between.
pub fn adaptation_factor(rate: f64, band: (f64, f64), factor: f64) -> f64 {
    let (lo, hi) = band;
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    factor.powf(2.0 * (rate - centre) / half)
}

/// Runs the pCN Metropolis–Hastings chain.
///
/// The chain starts from a prior draw. During burn-in, after every
/// `adapt_window` proposals the step sizes are rescaled in tandem by
/// [`adaptation_factor`]; adaptation stops when burn-in ends. Afterwards every `thin`-th state
/// is retained until `retained` samples exist. Each proposal costs exactly one
/// likelihood evaluation.
pub fn pcn_chain(prior: &PriorConfig, lik: &LikelihoodSpec, cfg: &SamplerConfig) -> Result<PosteriorChain> {
    check_inputs(prior, lik, cfg)?;
    let mut rng = seeded(cfg.seed);
    let mut evals = 0u64;
    let (mut x, mut ll) = initial_point(prior, lik, &mut rng, &mut evals)?;
    let mut steps = cfg.steps();

    let mut window_accepted = 0usize;
    let mut window_len = 0usize;
    let mut burn_accepted = 0usize;
    let mut accepted = 0usize;

    for _ in 0..cfg.burn_in {
        let prop = pcn_propose(&x, steps, &mut rng);
        let ll_prop = lik.log_likelihood(&prop)?;
        evals += 1;
        let la = log_acceptance_from_values(&prop, &x, ll_prop, ll, prior.alpha)?;
        if rng.random::<f64>() < la.exp() {
            x = prop;
            ll = ll_prop;
            window_accepted += 1;
            burn_accepted += 1;
        }
        window_len += 1;
        if window_len == cfg.adapt_window {
            let rate = window_accepted as f64 / window_len as f64;
            let factor = adaptation_factor(rate, cfg.acceptance_band, cfg.adapt_factor);
            steps.beta_y = (steps.beta_y * factor).clamp(BETA_MIN, BETA_MAX);
            steps.beta_z = (steps.beta_z * factor).clamp(BETA_MIN, BETA_MAX);
            window_accepted = 0;
            window_len = 0;
        }
    }

    let mut samples = Vec::with_capacity(cfg.retained);
    let mut log_posterior = Vec::with_capacity(cfg.retained);
    let mut sample_seconds = Vec::with_capacity(if cfg.record_timings { cfg.retained } else { 0 });
    let start = Instant::now();
    let mut last = start;
    for _ in 0..cfg.retained {
        for _ in 0..cfg.thin {
            let prop = pcn_propose(&x, steps, &mut rng);
            let ll_prop = lik.log_likelihood(&prop)?;
            evals += 1;
            let la = log_acceptance_from_values(&prop, &x, ll_prop, ll, prior.alpha)?;
            if rng.random::<f64>() < la.exp() {
                x = prop;
                ll = ll_prop;
                accepted += 1;
            }
        }
        if cfg.record_timings {
            let now = Instant::now();
            sample_seconds.push((now - last).as_secs_f64());
            last = now;
        }
        log_posterior.push(ll + log_prior(&x, prior.alpha));
        samples.push(x.clone());
    }
    let sampling_seconds = start.elapsed().as_secs_f64();

    let post = cfg.retained * cfg.thin;
    Ok(PosteriorChain {
        sampler: SamplerKind::Pcn,
        samples,
        log_posterior,
        acceptance_rate: accepted as f64 / post as f64,
        burn_in_acceptance_rate: if cfg.burn_in > 0 {
            burn_accepted as f64 / cfg.burn_in as f64
        } else {
            f64::NAN
        },
        density_evals: evals,
        sampling_evals: post as u64,
        final_steps: steps,
        alpha: prior.alpha,
        config: cfg.clone(),
        sample_seconds,
        sampling_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::rng::seeded;

    fn point(y: &[f64]) -> ParamVector {
        let dim = y.len();
        ParamVector::new(y.to_vec(), CMatrix::identity(dim, dim)).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::default().validate().is_ok());
        let bad = SamplerConfig {
            beta_y: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SamplerConfig {
            thin: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SamplerConfig {
            adapt_factor: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn adaptation_is_centred_on_the_band() {
        let band = (0.1, 0.3);
        assert!((adaptation_factor(0.2, band, 1.1) - 1.0).abs() < 1e-15);
        assert!((adaptation_factor(0.3, band, 1.1) - 1.21).abs() < 1e-12);
        assert!((adaptation_factor(0.1, band, 1.1) - 1.0 / 1.21).abs() < 1e-12);
        assert!(adaptation_factor(0.0, band, 1.1) < adaptation_factor(0.05, band, 1.1));
    }

    #[test]
    fn identical_point_always_accepted() {
        let x = point(&[0.3, 2.0]);
        assert_eq!(log_acceptance_from_values(&x, &x, -3.0, -3.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn direction_changes_do_not_enter_acceptance() {
        let x = point(&[0.3, 2.0]);
        let moved = ParamVector::new(
            x.y().to_vec(),
            CMatrix::from_element(2, 2, num_complex::Complex64::new(5.0, -1.0)),
        )
        .unwrap();
        assert_eq!(log_acceptance(&moved, &x, 0.7, |_| Ok(1.5)).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_current_likelihood_is_an_error() {
        let x = point(&[1.0]);
        assert!(log_acceptance_from_values(&x, &x, 0.0, f64::NEG_INFINITY, 1.0).is_err());
        assert_eq!(
            log_acceptance_from_values(&x, &x, f64::NEG_INFINITY, 0.0, 1.0).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn unit_beta_z_is_independence_proposal() {
        let x = point(&[1.0, 1.0]);
        let steps = StepSizes {
            beta_y: 0.5,
            beta_z: 1.0,
        };
        let mut a = seeded(5);
        let mut b = seeded(5);
        let p1 = pcn_propose(&x, steps, &mut a);
        let far = ParamVector::new(
            vec![1.0, 1.0],
            CMatrix::from_element(2, 2, num_complex::Complex64::new(100.0, 0.0)),
        )
        .unwrap();
        let p2 = pcn_propose(&far, steps, &mut b);
        assert_eq!(p1.z(), p2.z());
    }

    #[test]
    fn proposed_weights_stay_positive() {
        let x = point(&[1e-3, 5.0, 1.0]);
        let mut rng = seeded(8);
        let steps = StepSizes {
            beta_y: 0.99,
            beta_z: 0.5,
        };
        let mut cur = x;
        for _ in 0..100_000 {
            cur = pcn_propose(&cur, steps, &mut rng);
            assert!(cur.y().iter().all(|&y| y > 0.0));
            // Keep the walk from drifting to overflow.
            if cur.y().iter().any(|&y| !(1e-100..1e100).contains(&y)) {
                cur = point(&[1.0, 1.0, 1.0]);
            }
        }
    }

    #[test]
    fn chain_rejects_dimension_mismatch() {
        let prior = PriorConfig::new(1.0, 3).unwrap();
        let lik = LikelihoodSpec::unit(4);
        assert!(matches!(
            pcn_chain(&prior, &lik, &SamplerConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
