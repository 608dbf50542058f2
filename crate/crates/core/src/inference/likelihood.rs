use crate::linalg::{hermitian_to_real_coords, CMatrix, RMatrix, RVector};
use crate::measurements::{least_squares_estimate, CountData, MeasurementSet};
use crate::states::{rho_coords_into, ObservedSubspace, ParamVector};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Probabilities are clipped to this before taking logarithms.
pub const PROBABILITY_FLOOR: f64 = 1e-300;
/// Negative probabilities beyond this are a numerical error rather than rounding.
pub const NEGATIVE_PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LikelihoodKind {
    Pseudo,
    Full,
    /// Constant likelihood; the posterior is the prior.
    Unit,
}

impl fmt::Display for LikelihoodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pseudo => "pseudo",
            Self::Full => "full",
            Self::Unit => "unit",
        })
    }
}

impl FromStr for LikelihoodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pseudo" => Ok(Self::Pseudo),
            "full" => Ok(Self::Full),
            "unit" => Ok(Self::Unit),
            other => Err(Error::InvalidConfig(format!(
                "unknown likelihood '{other}' (expected pseudo, full or unit)"
            ))),
        }
    }
}

/// How the pseudo-likelihood variance `σ²` is chosen from the event total `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum Sigma2Rule {
    /// `σ² = 1/N`.
    #[default]
    InverseN,
    /// `σ² = 2/N`.
    TwoOverN,
    Explicit(f64),
}

impl Sigma2Rule {
    pub fn resolve(self, n_total: u64) -> f64 {
        match self {
            Self::InverseN => 1.0 / n_total as f64,
            Self::TwoOverN => 2.0 / n_total as f64,
            Self::Explicit(v) => v,
        }
    }
}

impl FromStr for Sigma2Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1/N" | "1/n" => Ok(Self::InverseN),
            "2/N" | "2/n" => Ok(Self::TwoOverN),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0 && v.is_finite())
                .map(Self::Explicit)
                .ok_or_else(|| {
                    Error::InvalidConfig(format!("sigma2 must be 1/N, 2/N or a positive number, got '{other}'"))
                }),
        }
    }
}

/// `log L = −‖P_M(ρ(x)) − ρ_LS‖²_F / (2σ²)`.
#[derive(Debug, Clone)]
pub struct PseudoLikelihood {
    rho_ls: CMatrix,
    target: RVector,
    subspace: ObservedSubspace,
    n_total: u64,
    sigma2: f64,
}

impl PseudoLikelihood {
    pub fn rho_ls(&self) -> &CMatrix {
        &self.rho_ls
    }

    pub fn subspace(&self) -> &ObservedSubspace {
        &self.subspace
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    fn eval_coords(&self, coords: &RVector) -> f64 {
        let projected = self.subspace.project_coords(coords);
        -(projected - &self.target).norm_squared() / (2.0 * self.sigma2)
    }
}

/// `log L = Σ_{q,s} N_s^(q) log Tr(ρ(x) Λ_s^(q))`, evaluated as `Nᵀ log(W ρ_vec)`
/// over the outcomes with nonzero counts.
#[derive(Debug, Clone)]
pub struct FullLikelihood {
    measurements: Arc<MeasurementSet>,
    w_observed: RMatrix,
    counts_observed: RVector,
    n_total: u64,
}

impl FullLikelihood {
    pub fn measurements(&self) -> &Arc<MeasurementSet> {
        &self.measurements
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    fn eval_coords(&self, coords: &RVector) -> Result<f64> {
        let probs = &self.w_observed * coords;
        let mut total = 0.0;
        for (&p, &n) in probs.iter().zip(self.counts_observed.iter()) {
            if p < -NEGATIVE_PROBABILITY_TOL {
                return Err(Error::NumericalValidity(format!(
                    "outcome probability {p:e} is negative"
                )));
            }
            if p <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            total += n * p.max(PROBABILITY_FLOOR).ln();
        }
        Ok(total)
    }
}

/// The data model entering the posterior. Immutable and shareable across chains.
#[derive(Debug, Clone)]
pub enum LikelihoodSpec {
    Unit { dim: usize },
    Pseudo(PseudoLikelihood),
    Full(FullLikelihood),
}

impl LikelihoodSpec {
    pub fn unit(dim: usize) -> Self {
        Self::Unit { dim }
    }

    /// Pseudo-likelihood around the least-squares estimate of `counts`.
    pub fn pseudo(counts: &CountData, m: &MeasurementSet, rule: Sigma2Rule) -> Result<Self> {
        let (rho_ls, subspace) = least_squares_estimate(counts, m)?;
        let n = counts.grand_total();
        Self::pseudo_from_estimate(rho_ls, subspace, n, rule.resolve(n.max(1)))
    }

    pub fn pseudo_from_estimate(
        rho_ls: CMatrix,
        subspace: ObservedSubspace,
        n_total: u64,
        sigma2: f64,
    ) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::InvalidConfig("pseudo-likelihood needs N ≥ 1".into()));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma2 must be positive, got {sigma2}")));
        }
        if rho_ls.nrows() != subspace.dim() || rho_ls.ncols() != subspace.dim() {
            return Err(Error::DimensionMismatch {
                expected: subspace.dim(),
                actual: rho_ls.nrows(),
            });
        }
        let target = hermitian_to_real_coords(&rho_ls);
        Ok(Self::Pseudo(PseudoLikelihood {
            rho_ls,
            target,
            subspace,
            n_total,
            sigma2,
        }))
    }

    pub fn full(counts: &CountData, m: Arc<MeasurementSet>) -> Result<Self> {
        counts.check_shape(&m)?;
        if counts.grand_total() == 0 {
            return Err(Error::InvalidCounts("no events".into()));
        }
        let flat = counts.flat();
        let rows: Vec<usize> = (0..flat.len()).filter(|&r| flat[r] > 0).collect();
        let w_observed = m.probability_map().select_rows(rows.iter());
        let counts_observed = RVector::from_iterator(rows.len(), rows.iter().map(|&r| flat[r] as f64));
        Ok(Self::Full(FullLikelihood {
            measurements: m,
            w_observed,
            counts_observed,
            n_total: counts.grand_total(),
        }))
    }

    pub fn kind(&self) -> LikelihoodKind {
        match self {
            Self::Unit { .. } => LikelihoodKind::Unit,
            Self::Pseudo(_) => LikelihoodKind::Pseudo,
            Self::Full(_) => LikelihoodKind::Full,
        }
    }

    /// Hilbert dimension `D` the likelihood expects.
    pub fn dim(&self) -> usize {
        match self {
            Self::Unit { dim } => *dim,
            Self::Pseudo(p) => p.subspace.dim(),
            Self::Full(f) => f.measurements.dim(),
        }
    }

    /// `σ²` for pseudo-likelihoods.
    pub fn sigma2(&self) -> Option<f64> {
        match self {
            Self::Pseudo(p) => Some(p.sigma2),
            _ => None,
        }
    }

    /// Multiply-adds spent on the likelihood term of one evaluation, not
    /// counting the `O(D³)` construction of ρ(x) that every kind shares.
    pub fn ops_per_eval(&self) -> u64 {
        let d2 = (self.dim() * self.dim()) as u64;
        match self {
            Self::Unit { .. } => 0,
            Self::Pseudo(p) if p.subspace.is_complete() => d2,
            Self::Pseudo(_) => d2 * d2 + d2,
            Self::Full(f) => f.w_observed.nrows() as u64 * d2,
        }
    }

    pub fn log_likelihood(&self, x: &ParamVector) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim(),
            });
        }
        match self {
            Self::Unit { .. } => Ok(0.0),
            Self::Pseudo(p) => Ok(p.eval_coords(&param_coords(x))),
            Self::Full(f) => f.eval_coords(&param_coords(x)),
        }
    }

    /// Log-likelihood of an explicit Hermitian matrix.
    pub fn log_likelihood_rho(&self, rho: &CMatrix) -> Result<f64> {
        if rho.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rho.nrows(),
            });
        }
        match self {
            Self::Unit { .. } => Ok(0.0),
            Self::Pseudo(p) => Ok(p.eval_coords(&hermitian_to_real_coords(rho))),
            Self::Full(f) => f.eval_coords(&hermitian_to_real_coords(rho)),
        }
    }
}

fn param_coords(x: &ParamVector) -> RVector {
    let dim = x.dim();
    let mut coords = RVector::zeros(dim * dim);
    rho_coords_into(x, coords.as_mut_slice());
    coords
}

pub fn log_pseudo_likelihood(x: &ParamVector, spec: &LikelihoodSpec) -> Result<f64> {
    match spec {
        LikelihoodSpec::Pseudo(_) => spec.log_likelihood(x),
        _ => Err(Error::WrongLikelihoodKind { expected: "pseudo" }),
    }
}

pub fn log_full_likelihood(x: &ParamVector, spec: &LikelihoodSpec) -> Result<f64> {
    match spec {
        LikelihoodSpec::Full(_) => spec.log_likelihood(x),
        _ => Err(Error::WrongLikelihoodKind { expected: "full" }),
    }
}
