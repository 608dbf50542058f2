use super::pcn::{SamplerConfig, StepSizes};
use super::LikelihoodKind;
use crate::io::{read_json, write_json_atomic};
use crate::linalg::CMatrix;
use crate::measurements::MeasurementKind;
use crate::states::{rho_from_params, DensityMatrix, ParamVector};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Pcn,
    Slice,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pcn => "pcn",
            Self::Slice => "slice",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pcn" => Ok(Self::Pcn),
            "slice" => Ok(Self::Slice),
            other => Err(Error::InvalidConfig(format!(
                "unknown sampler '{other}' (expected pcn or slice)"
            ))),
        }
    }
}

/// Retained samples of one chain plus its bookkeeping.
#[derive(Debug, Clone)]
pub struct PosteriorChain {
    pub sampler: SamplerKind,
    pub samples: Vec<ParamVector>,
    /// Unnormalized log posterior at each retained sample.
    pub log_posterior: Vec<f64>,
    /// Fraction of accepted proposals after burn-in (always 1 for slice sampling).
    pub acceptance_rate: f64,
    pub burn_in_acceptance_rate: f64,
    /// Posterior density evaluations, including initialization and burn-in.
    pub density_evals: u64,
    /// Density evaluations after burn-in.
    pub sampling_evals: u64,
    /// Step sizes in force after burn-in.
    pub final_steps: StepSizes,
    pub alpha: f64,
    pub config: SamplerConfig,
    /// Wall time per retained sample; empty unless `record_timings` was set.
    pub sample_seconds: Vec<f64>,
    /// Wall time of the post-burn-in loop.
    pub sampling_seconds: f64,
}

impl PosteriorChain {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Density evaluations per post-burn-in iteration.
    pub fn evals_per_iteration(&self) -> f64 {
        self.density_evals as f64 / (self.config.burn_in + self.config.retained * self.config.thin) as f64
    }
}

/// `φ(ρ(x^(r)))` for every retained sample.
pub fn functional_values<F>(chain: &PosteriorChain, functional: F) -> Result<Vec<f64>>
where
    F: Fn(&DensityMatrix) -> f64,
{
    chain
        .samples
        .iter()
        .map(|x| Ok(functional(&rho_from_params(x)?)))
        .collect()
}

/// Sample mean and population standard deviation of `φ(ρ(x))` over the chain.
pub fn posterior_expectation<F>(chain: &PosteriorChain, functional: F) -> Result<(f64, f64)>
where
    F: Fn(&DensityMatrix) -> f64,
{
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    Ok(mean_std(&functional_values(chain, functional)?))
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let shift = values.first().copied().unwrap_or(0.0);
    let mean = shift + values.iter().map(|v| v - shift).sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Problem description stored alongside a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMeta {
    /// Single-qudit dimension.
    pub d: usize,
    /// Hilbert dimension `D`.
    pub dim: usize,
    pub measurement: MeasurementKind,
    pub likelihood: LikelihoodKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    pub grand_total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfigEcho {
    pub sampler: SamplerKind,
    pub alpha: f64,
    #[serde(flatten)]
    pub meta: ChainMeta,
    #[serde(flatten)]
    pub sampler_config: SamplerConfig,
    pub final_beta_y: f64,
    pub final_beta_z: f64,
}

/// Direction vectors stored per `k`: `z_re[k][i] = Re z_k[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub y: Vec<f64>,
    pub z_re: Vec<Vec<f64>>,
    pub z_im: Vec<Vec<f64>>,
}

impl SampleRecord {
    pub fn from_params(x: &ParamVector) -> Self {
        let d = x.dim();
        let col = |k: usize, f: fn(&Complex64) -> f64| (0..d).map(|i| f(&x.z()[(i, k)])).collect();
        Self {
            y: x.y().to_vec(),
            z_re: (0..d).map(|k| col(k, |c| c.re)).collect(),
            z_im: (0..d).map(|k| col(k, |c| c.im)).collect(),
        }
    }

    pub fn to_params(&self) -> Result<ParamVector> {
        let d = self.y.len();
        if self.z_re.len() != d || self.z_im.len() != d || self.z_re.iter().chain(&self.z_im).any(|v| v.len() != d) {
            return Err(Error::InvalidConfig(format!("sample direction arrays must be {d}×{d}")));
        }
        let z = CMatrix::from_fn(d, d, |i, k| Complex64::new(self.z_re[k][i], self.z_im[k][i]));
        ParamVector::new(self.y.clone(), z)
    }
}

/// On-disk chain. Full mode stores every retained parameter vector; compact
/// mode stores only named per-sample functional values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub format_version: u32,
    pub config: ChainConfigEcho,
    pub acceptance_rate: f64,
    pub density_evals: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleRecord>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functionals: BTreeMap<String, Vec<f64>>,
}

impl ChainFile {
    pub const FORMAT_VERSION: u32 = 1;

    fn header(chain: &PosteriorChain, meta: ChainMeta) -> Self {
        Self {
            format_version: Self::FORMAT_VERSION,
            config: ChainConfigEcho {
                sampler: chain.sampler,
                alpha: chain.alpha,
                meta,
                sampler_config: chain.config.clone(),
                final_beta_y: chain.final_steps.beta_y,
                final_beta_z: chain.final_steps.beta_z,
            },
            acceptance_rate: chain.acceptance_rate,
            density_evals: chain.density_evals,
            samples: Vec::new(),
            functionals: BTreeMap::new(),
        }
    }

    pub fn full(chain: &PosteriorChain, meta: ChainMeta) -> Self {
        let mut f = Self::header(chain, meta);
        f.samples = chain.samples.iter().map(SampleRecord::from_params).collect();
        f
    }

    pub fn compact(chain: &PosteriorChain, meta: ChainMeta, functionals: BTreeMap<String, Vec<f64>>) -> Self {
        let mut f = Self::header(chain, meta);
        f.functionals = functionals;
        f
    }

    pub fn is_compact(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn params(&self) -> Result<Vec<ParamVector>> {
        self.samples.iter().map(SampleRecord::to_params).collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let f: Self = read_json(path)?;
        if f.format_version != Self::FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "{}: unsupported chain format_version {}",
                path.display(),
                f.format_version
            )));
        }
        Ok(f)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json_atomic(path, self)
    }
}
