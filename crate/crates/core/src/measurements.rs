//! Measurement sets, simulated count data and least-squares inversion.
//!
//! Two-qudit measurement sets are built from the `d + 1` mutually unbiased
//! bases of a prime-dimensional qudit: the eigenbases of the clock operator
//! `Z` and of `X Z^j` for `j = 0..d−1`, where `X` is the cyclic shift. Every
//! POVM in a set is turned into rows of a real probability map `W` acting on
//! the real coordinates of a density matrix (see [`crate::linalg`]), so that
//! `p = W · coords(ρ)` yields every outcome probability at once.

use crate::io::{read_json, write_json_atomic};
use crate::linalg::{
    hermitian_to_real_coords, hermiticity_residual, min_eigenvalue, numerical_rank, CMatrix, CVector, RMatrix, RVector,
};
use crate::rng::seeded_stream;
use crate::states::{observed_subspace, rho_from_bloch, DensityMatrix, GeneratorBasis, ObservedSubspace};
use crate::{Error, Result};
use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::Range;
use std::path::Path;

/// Design-matrix columns with norm at or below this are treated as unobserved.
pub const UNOBSERVED_COLUMN_TOL: f64 = 1e-10;

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p))
}

fn require_prime(d: usize) -> Result<()> {
    if is_prime(d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Shift `X|m⟩ = |m+1 mod d⟩` and clock `Z|m⟩ = ω^m|m⟩`, `ω = exp(2πi/d)`.
pub fn weyl_operators(d: usize) -> Result<(CMatrix, CMatrix)> {
    require_prime(d)?;
    let mut x = CMatrix::zeros(d, d);
    let mut z = CMatrix::zeros(d, d);
    for m in 0..d {
        x[((m + 1) % d, m)] = Complex64::new(1.0, 0.0);
        z[(m, m)] = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / d as f64);
    }
    Ok((x, z))
}

/// The `d + 1` mutually unbiased bases of a prime qudit, each returned as a
/// unitary whose columns are the basis vectors.
///
/// Basis 0 is the computational basis (eigenbasis of `Z`, ordered by `m`).
/// Basis `1 + j` is the eigenbasis of `X Z^j`; its `k`-th vector has
/// components `v_m = exp(−i m θ_k + iπ j m(m−1)/d) / √d` with
/// `θ_k = 2π(k + j(d−1)/2)/d`, so the first component is real and positive.
pub fn mub_bases(d: usize) -> Result<Vec<CMatrix>> {
    require_prime(d)?;
    let df = d as f64;
    let norm = 1.0 / df.sqrt();
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(CMatrix::identity(d, d));
    for j in 0..d {
        let jf = j as f64;
        let mut b = CMatrix::zeros(d, d);
        for k in 0..d {
            let theta = 2.0 * PI * (k as f64 + jf * (df - 1.0) / 2.0) / df;
            for m in 0..d {
                let mf = m as f64;
                let phase = -mf * theta + PI * jf * mf * (mf - 1.0) / df;
                b[(m, k)] = Complex64::from_polar(norm, phase);
            }
        }
        bases.push(b);
    }
    Ok(bases)
}

/// One measurement setting: PSD operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    label: String,
    operators: Vec<CMatrix>,
}

impl Povm {
    pub const TOL: f64 = 1e-10;

    pub fn new(label: impl Into<String>, operators: Vec<CMatrix>) -> Result<Self> {
        let label = label.into();
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidPovm(format!("{label}: no outcome operators")))?;
        let dim = first.nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for (s, op) in operators.iter().enumerate() {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::InvalidPovm(format!("{label}: operator {s} has wrong shape")));
            }
            if hermiticity_residual(op) > Self::TOL {
                return Err(Error::InvalidPovm(format!("{label}: operator {s} is not Hermitian")));
            }
            if min_eigenvalue(op) < -Self::TOL {
                return Err(Error::InvalidPovm(format!("{label}: operator {s} is not PSD")));
            }
            sum += op;
        }
        let resid = (sum - CMatrix::identity(dim, dim))
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if resid > Self::TOL {
            return Err(Error::InvalidPovm(format!(
                "{label}: operators sum to identity only within {resid:e}"
            )));
        }
        Ok(Self { label, operators })
    }

    /// Rank-one projectors onto the columns of a unitary.
    pub fn projective(label: impl Into<String>, basis: &CMatrix) -> Result<Self> {
        let ops = (0..basis.ncols())
            .map(|k| {
                let v = basis.column(k);
                v * v.adjoint()
            })
            .collect();
        Self::new(label, ops)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }
}

/// Named measurement families that can be regenerated from `(d, kind)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum MeasurementKind {
    /// All pairwise combinations of the `d + 1` MUBs on two qudits.
    #[default]
    #[serde(rename = "mub2")]
    Mub2,
    /// Two qubits measured in `{Z, X} ⊗ {Z, X}`.
    #[serde(rename = "xz2qubit")]
    Xz2Qubit,
    /// Anything else built with [`MeasurementSet::new`]; not serializable by kind.
    #[serde(rename = "custom")]
    Custom,
}

impl MeasurementKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Mub2 => "mub2",
            Self::Xz2Qubit => "xz2qubit",
            Self::Custom => "custom",
        }
    }
}

impl std::str::FromStr for MeasurementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mub2" => Ok(Self::Mub2),
            "xz2qubit" => Ok(Self::Xz2Qubit),
            other => Err(Error::InvalidConfig(format!(
                "unknown measurement type '{other}' (expected mub2 or xz2qubit)"
            ))),
        }
    }
}

/// Ordered POVMs with their probability map `W`, the Bloch design matrix and
/// the observed subspace they determine.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    kind: MeasurementKind,
    local_dim: usize,
    povms: Vec<Povm>,
    basis: GeneratorBasis,
    /// Row `r` holds the real coordinates of outcome operator `r`, so `W·coords(ρ)` are probabilities.
    w: RMatrix,
    /// `Tr(Λ)/D` per row: the probability contributed by the identity component.
    offsets: RVector,
    /// `A[r, k] = ½ Tr(Λ_r λ_k)`.
    design: RMatrix,
    row_starts: Vec<usize>,
    subspace: ObservedSubspace,
    aligned: bool,
}

impl MeasurementSet {
    /// Assembles a measurement set and detects its observed generator indices
    /// from the design-matrix column norms.
    pub fn new(kind: MeasurementKind, local_dim: usize, povms: Vec<Povm>, basis: GeneratorBasis) -> Result<Self> {
        let dim = basis.dim();
        if povms.is_empty() {
            return Err(Error::InvalidPovm("measurement set has no settings".into()));
        }
        let mut row_starts = Vec::with_capacity(povms.len() + 1);
        let mut rows = 0;
        for p in &povms {
            if p.operators()[0].nrows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.operators()[0].nrows(),
                });
            }
            row_starts.push(rows);
            rows += p.len();
        }
        row_starts.push(rows);

        let mut w = RMatrix::zeros(rows, dim * dim);
        let mut r = 0;
        for p in &povms {
            for op in p.operators() {
                w.set_row(r, &hermitian_to_real_coords(op).transpose());
                r += 1;
            }
        }
        let mut identity = RVector::zeros(dim * dim);
        for i in 0..dim {
            identity[i] = 1.0 / dim as f64;
        }
        let offsets = &w * identity;
        let design = &w * basis.coords() * 0.5;

        let observed: Vec<usize> = (0..basis.len())
            .filter(|&k| design.column(k).norm() > UNOBSERVED_COLUMN_TOL)
            .collect();
        let reduced = design.select_columns(observed.iter());
        let rank = numerical_rank(&reduced, 1e-10);
        let aligned = rank == observed.len();
        if !aligned {
            log::warn!(
                "measurement set is not aligned with the {:?} generator basis: {} observed columns but rank {}; \
                 the least-squares estimate uses the minimum-norm solution",
                basis.kind(),
                observed.len(),
                rank
            );
        }
        let subspace = observed_subspace(&observed, &basis)?;
        Ok(Self {
            kind,
            local_dim,
            povms,
            basis,
            w,
            offsets,
            design,
            row_starts,
            subspace,
            aligned,
        })
    }

    /// Regenerates a named family.
    pub fn from_kind(kind: MeasurementKind, d: usize) -> Result<Self> {
        match kind {
            MeasurementKind::Mub2 => two_qudit_mub_measurements(d),
            MeasurementKind::Xz2Qubit if d == 2 => two_qubit_xz_measurements(),
            MeasurementKind::Xz2Qubit => Err(Error::InvalidConfig(format!("xz2qubit requires d = 2, got {d}"))),
            MeasurementKind::Custom => Err(Error::InvalidConfig(
                "custom measurement sets cannot be regenerated".into(),
            )),
        }
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    /// Single-qudit dimension `d`.
    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Hilbert dimension `D`.
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn num_settings(&self) -> usize {
        self.povms.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.w.nrows()
    }

    /// Rows of `W` belonging to setting `q`.
    pub fn setting_rows(&self, q: usize) -> Range<usize> {
        self.row_starts[q]..self.row_starts[q + 1]
    }

    pub fn setting_id(&self, q: usize) -> &str {
        self.povms[q].label()
    }

    pub fn probability_map(&self) -> &RMatrix {
        &self.w
    }

    pub fn design_matrix(&self) -> &RMatrix {
        &self.design
    }

    pub fn identity_offsets(&self) -> &RVector {
        &self.offsets
    }

    pub fn basis(&self) -> &GeneratorBasis {
        &self.basis
    }

    pub fn subspace(&self) -> &ObservedSubspace {
        &self.subspace
    }

    /// Whether the observed columns of the design matrix are linearly independent.
    pub fn is_aligned(&self) -> bool {
        self.aligned
    }

    fn check_setting(&self, q: usize) -> Result<()> {
        if q >= self.num_settings() {
            return Err(Error::IndexOutOfRange {
                index: q,
                limit: self.num_settings(),
            });
        }
        Ok(())
    }
}

/// `(d+1)²` settings, one per pair of single-qudit MUBs, each with `d²`
/// product projectors ordered `i·d + j`.
pub fn two_qudit_mub_measurements(d: usize) -> Result<MeasurementSet> {
    let bases = mub_bases(d)?;
    let mut povms = Vec::with_capacity((d + 1) * (d + 1));
    for (q1, b1) in bases.iter().enumerate() {
        for (q2, b2) in bases.iter().enumerate() {
            povms.push(Povm::projective(format!("{q1}-{q2}"), &b1.kronecker(b2))?);
        }
    }
    MeasurementSet::new(MeasurementKind::Mub2, d, povms, GeneratorBasis::gell_mann(d * d)?)
}

/// Settings `Z-Z, Z-X, X-Z, X-X` on two qubits, expressed in the Pauli-product basis.
pub fn two_qubit_xz_measurements() -> Result<MeasurementSet> {
    let bases = mub_bases(2)?;
    let named = [("Z", &bases[0]), ("X", &bases[1])];
    let mut povms = Vec::with_capacity(4);
    for (n1, b1) in named {
        for (n2, b2) in named {
            povms.push(Povm::projective(format!("{n1}-{n2}"), &b1.kronecker(b2))?);
        }
    }
    MeasurementSet::new(MeasurementKind::Xz2Qubit, 2, povms, GeneratorBasis::pauli_products(2)?)
}

/// `(1/√d) Σ_k |k⟩|k⟩`.
pub fn bell_state(d: usize) -> CVector {
    let mut psi = CVector::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        psi[k * d + k] = Complex64::new(a, 0.0);
    }
    psi
}

/// `λ|Ψ⟩⟨Ψ| + (1−λ) I/D` with the normalized two-qudit Bell state `|Ψ⟩`.
pub fn ground_truth_state(d: usize, lambda: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Domain(format!("qudit dimension must be at least 2, got {d}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    if lambda == 0.0 || lambda == 1.0 {
        log::warn!(
            "lambda = {lambda} is an endpoint: the ground truth is {}",
            if lambda == 0.0 { "maximally mixed" } else { "pure" }
        );
    }
    let dim = d * d;
    let psi = bell_state(d);
    let m = (&psi * psi.adjoint()).scale(lambda) + CMatrix::identity(dim, dim).scale((1.0 - lambda) / dim as f64);
    DensityMatrix::new(m)
}

fn clip_probabilities(raw: impl Iterator<Item = f64>) -> Result<Vec<f64>> {
    raw.map(|p| {
        if p < -1e-12 {
            Err(Error::InvalidProbability(format!("negative outcome probability {p:e}")))
        } else {
            Ok(p.max(0.0))
        }
    })
    .collect()
}

/// Outcome probabilities `Tr(ρ Λ_s)` of setting `q`.
pub fn outcome_probabilities(rho: &DensityMatrix, m: &MeasurementSet, q: usize) -> Result<Vec<f64>> {
    m.check_setting(q)?;
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            actual: rho.dim(),
        });
    }
    let coords = rho.real_coords();
    let rows = m.setting_rows(q);
    clip_probabilities(rows.map(|r| m.w.row(r).dot(&coords.transpose())))
}

/// Outcome counts `N_s^(q)` for every setting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountData {
    counts: Vec<Vec<u64>>,
    per_setting_totals: Vec<u64>,
    grand_total: u64,
}

impl CountData {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidCounts("no settings".into()));
        }
        let per_setting_totals: Vec<u64> = counts.iter().map(|c| c.iter().sum()).collect();
        let grand_total = per_setting_totals.iter().sum();
        Ok(Self {
            counts,
            per_setting_totals,
            grand_total,
        })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// `N^(q)`.
    pub fn setting_totals(&self) -> &[u64] {
        &self.per_setting_totals
    }

    /// `N = Σ_q N^(q)`.
    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    /// Counts concatenated in measurement-set row order.
    pub fn flat(&self) -> Vec<u64> {
        self.counts.iter().flatten().copied().collect()
    }

    /// Checks the shape against a measurement set.
    pub fn check_shape(&self, m: &MeasurementSet) -> Result<()> {
        if self.counts.len() != m.num_settings() {
            return Err(Error::InvalidCounts(format!(
                "{} settings in data but {} in the measurement set",
                self.counts.len(),
                m.num_settings()
            )));
        }
        for (q, c) in self.counts.iter().enumerate() {
            if c.len() != m.setting_rows(q).len() {
                return Err(Error::InvalidCounts(format!(
                    "setting {q} has {} outcomes, expected {}",
                    c.len(),
                    m.setting_rows(q).len()
                )));
            }
        }
        Ok(())
    }
}

/// Draws `shots_per_setting` outcomes per setting from the multinomial with
/// the state's outcome probabilities, by sequential binomial conditioning.
/// Setting `q` uses RNG stream `q` of `seed`.
pub fn simulate_counts(
    rho: &DensityMatrix,
    m: &MeasurementSet,
    shots_per_setting: u64,
    seed: u64,
) -> Result<CountData> {
    if shots_per_setting == 0 {
        return Err(Error::InvalidConfig("shots per setting must be at least 1".into()));
    }
    let mut all = Vec::with_capacity(m.num_settings());
    for q in 0..m.num_settings() {
        let probs = outcome_probabilities(rho, m, q)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidProbability(format!(
                "setting {q} probabilities sum to {total}"
            )));
        }
        let mut rng = seeded_stream(seed, q as u64);
        let mut remaining = shots_per_setting;
        let mut mass = 1.0;
        let mut counts = vec![0u64; probs.len()];
        for (s, &p) in probs.iter().enumerate() {
            if s + 1 == probs.len() {
                counts[s] = remaining;
                break;
            }
            if remaining == 0 {
                break;
            }
            let cond = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
            let k = Binomial::new(remaining, cond)
                .map_err(|e| Error::InvalidProbability(e.to_string()))?
                .sample(&mut rng);
            counts[s] = k;
            remaining -= k;
            mass -= p;
        }
        all.push(counts);
    }
    CountData::new(all)
}

/// Least-squares estimate of the state from outcome frequencies.
///
/// Solves `A_K c_K ≈ f − Tr(Λ)/D` over the observed generator columns with a
/// rank-revealing SVD (minimum-norm solution), sets unobserved coefficients to
/// zero and returns `ρ_LS = I/D + ½ Σ c_k λ_k` with the observed subspace. The
/// estimate is Hermitian with unit trace but may have negative eigenvalues.
pub fn least_squares_estimate(counts: &CountData, m: &MeasurementSet) -> Result<(CMatrix, ObservedSubspace)> {
    counts.check_shape(m)?;
    if let Some(q) = counts.setting_totals().iter().position(|&n| n == 0) {
        return Err(Error::InvalidCounts(format!(
            "setting {q} ({}) has zero shots",
            m.setting_id(q)
        )));
    }
    let freqs: Vec<Vec<f64>> = counts
        .counts()
        .iter()
        .zip(counts.setting_totals())
        .map(|(row, &n)| row.iter().map(|&c| c as f64 / n as f64).collect())
        .collect();
    least_squares_from_frequencies(&freqs, m)
}

/// [`least_squares_estimate`] on per-setting outcome frequencies.
pub fn least_squares_from_frequencies(freqs: &[Vec<f64>], m: &MeasurementSet) -> Result<(CMatrix, ObservedSubspace)> {
    if freqs.len() != m.num_settings() {
        return Err(Error::DimensionMismatch {
            expected: m.num_settings(),
            actual: freqs.len(),
        });
    }
    let mut rhs = RVector::zeros(m.num_outcomes());
    for (q, row) in freqs.iter().enumerate() {
        let rows = m.setting_rows(q);
        if row.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                actual: row.len(),
            });
        }
        if row.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidCounts(format!("setting {q} has non-finite frequencies")));
        }
        for (f, r) in row.iter().zip(rows) {
            rhs[r] = f - m.offsets[r];
        }
    }
    let subspace = m.subspace().clone();
    let observed = subspace.indices();
    let mut coeffs = vec![0.0; m.basis().len()];
    if !observed.is_empty() {
        let a = m.design.select_columns(observed.iter());
        let solution = min_norm_least_squares(a, &rhs)?;
        for (&k, &v) in observed.iter().zip(solution.iter()) {
            coeffs[k] = v;
        }
    }
    Ok((rho_from_bloch(&coeffs, m.basis())?, subspace))
}

fn min_norm_least_squares(a: RMatrix, b: &RVector) -> Result<RVector> {
    let svd = crate::linalg::to_faer(&a)
        .thin_svd()
        .map_err(|e| Error::NumericalValidity(format!("least-squares SVD failed: {e:?}")))?;
    let (u, sv, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let smax = (0..sv.nrows()).map(|i| sv[i]).fold(0.0, f64::max);
    let mut x = RVector::zeros(a.ncols());
    for k in 0..sv.nrows() {
        let s = sv[k];
        if s <= 1e-10 * smax {
            continue;
        }
        let coef = (0..a.nrows()).map(|i| u[(i, k)] * b[i]).sum::<f64>() / s;
        for j in 0..a.ncols() {
            x[j] += coef * v[(j, k)];
        }
    }
    Ok(x)
}

/// On-disk layout of a count data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsFile {
    pub d: usize,
    pub n_parties: usize,
    pub format_version: u32,
    #[serde(default)]
    pub measurement: MeasurementKind,
    pub settings: Vec<SettingRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingRecord {
    pub id: String,
    pub shots: u64,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub lambda: f64,
}

impl CountsFile {
    pub const FORMAT_VERSION: u32 = 1;

    pub fn new(m: &MeasurementSet, data: &CountData, ground_truth: Option<GroundTruth>) -> Result<Self> {
        data.check_shape(m)?;
        let settings = (0..m.num_settings())
            .map(|q| SettingRecord {
                id: m.setting_id(q).to_string(),
                shots: data.setting_totals()[q],
                counts: data.counts()[q].clone(),
            })
            .collect();
        Ok(Self {
            d: m.local_dim(),
            n_parties: 2,
            format_version: Self::FORMAT_VERSION,
            measurement: m.kind(),
            settings,
            ground_truth,
        })
    }

    /// Regenerates the measurement set and validates the counts against it.
    pub fn into_data(self) -> Result<(MeasurementSet, CountData)> {
        if self.format_version != Self::FORMAT_VERSION {
            return Err(Error::InvalidCounts(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        if self.n_parties != 2 {
            return Err(Error::InvalidCounts(format!(
                "only two-party data is supported, got {}",
                self.n_parties
            )));
        }
        let m = MeasurementSet::from_kind(self.measurement, self.d)?;
        if self.settings.len() != m.num_settings() {
            return Err(Error::InvalidCounts(format!(
                "{} settings in file, {} expected for {} at d = {}",
                self.settings.len(),
                m.num_settings(),
                self.measurement.name(),
                self.d
            )));
        }
        let mut counts = Vec::with_capacity(self.settings.len());
        for (q, rec) in self.settings.into_iter().enumerate() {
            if rec.id != m.setting_id(q) {
                return Err(Error::InvalidCounts(format!(
                    "setting {q} has id '{}', expected '{}'",
                    rec.id,
                    m.setting_id(q)
                )));
            }
            let sum: u64 = rec.counts.iter().sum();
            if sum != rec.shots {
                return Err(Error::InvalidCounts(format!(
                    "setting '{}' counts sum to {sum}, shots says {}",
                    rec.id, rec.shots
                )));
            }
            counts.push(rec.counts);
        }
        let data = CountData::new(counts)?;
        data.check_shape(&m)?;
        Ok((m, data))
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json_atomic(path, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::outer;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qubit_weyl_operators_are_paulis() {
        let (x, z) = weyl_operators(2).unwrap();
        let ex = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let ez = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        assert!((x - ex).norm() < 1e-15);
        assert!((z - ez).norm() < 1e-15);
    }

    #[test]
    fn weyl_order_and_unitarity() {
        let (x, z) = weyl_operators(3).unwrap();
        let id = CMatrix::identity(3, 3);
        assert!((&x * &x * &x - &id).norm() < 1e-12);
        assert!((&z * &z * &z - &id).norm() < 1e-12);
        assert!((&x * x.adjoint() - &id).norm() < 1e-12);
        assert!((&z * z.adjoint() - &id).norm() < 1e-12);
        assert!(matches!(weyl_operators(4), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn non_prime_mub_rejected() {
        assert!(mub_bases(4).is_err());
        assert!(two_qudit_mub_measurements(6).is_err());
        assert!(mub_bases(1).is_err());
    }

    #[test]
    fn setting_counts() {
        let m = two_qudit_mub_measurements(2).unwrap();
        assert_eq!(m.num_settings(), 9);
        assert!((0..9).all(|q| m.setting_rows(q).len() == 4));
        assert!(m.subspace().is_complete());
        let m3 = two_qudit_mub_measurements(3).unwrap();
        assert_eq!(m3.num_settings(), 16);
        assert!((0..16).all(|q| m3.setting_rows(q).len() == 9));
    }

    #[test]
    fn xz_set_observes_eight_pauli_directions() {
        let m = two_qubit_xz_measurements().unwrap();
        assert_eq!(m.num_settings(), 4);
        assert_eq!(m.subspace().indices().len(), 8);
        assert!(m.is_aligned());
        assert!(!m.subspace().is_complete());
        let labels: Vec<&str> = m.subspace().indices().iter().map(|&k| m.basis().label(k)).collect();
        assert_eq!(labels, ["IX", "IZ", "XI", "XX", "XZ", "ZI", "ZX", "ZZ"]);
        assert!(labels.iter().all(|l| !l.contains('Y')));
    }

    #[test]
    fn ground_truth_cases() {
        let bell = ground_truth_state(2, 1.0).unwrap();
        assert!((crate::states::purity(&bell) - 1.0).abs() < 1e-14);
        let mixed = ground_truth_state(3, 0.0).unwrap();
        assert!((mixed.matrix() - CMatrix::identity(9, 9).scale(1.0 / 9.0)).norm() < 1e-15);
        let rho = ground_truth_state(2, 0.95).unwrap();
        let f = crate::states::fidelity(&rho, &bell_state(2)).unwrap();
        assert!((f - 0.9625).abs() < 1e-14);
        assert!(ground_truth_state(2, 1.2).is_err());
        assert!(ground_truth_state(2, -0.1).is_err());
    }

    #[test]
    fn probabilities_uniform_and_schmidt() {
        let m = two_qudit_mub_measurements(3).unwrap();
        let mixed = DensityMatrix::maximally_mixed(9);
        for q in [0, 5, 15] {
            let p = outcome_probabilities(&mixed, &m, q).unwrap();
            assert!(p.iter().all(|v| (v - 1.0 / 9.0).abs() < 1e-14));
        }
        let bell = ground_truth_state(3, 1.0).unwrap();
        let p = outcome_probabilities(&bell, &m, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((p[i * 3 + j] - expect).abs() < 1e-14);
            }
        }
        assert!(matches!(
            outcome_probabilities(&bell, &m, 16),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn probability_map_matches_direct_trace() {
        let m = two_qudit_mub_measurements(2).unwrap();
        let psi = CVector::from_vec(vec![c(0.5, 0.1), c(-0.3, 0.4), c(0.2, -0.2), c(0.1, 0.6)]);
        let psi = psi.unscale(psi.norm());
        let rho = DensityMatrix::new(outer(&psi, &psi).scale(0.7) + CMatrix::identity(4, 4).scale(0.3 / 4.0)).unwrap();
        for q in 0..m.num_settings() {
            let p = outcome_probabilities(&rho, &m, q).unwrap();
            for (s, op) in m.povms()[q].operators().iter().enumerate() {
                let direct = crate::linalg::trace(&(rho.matrix() * op)).re;
                assert!((p[s] - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simulated_counts_sum_to_shots() {
        let m = two_qudit_mub_measurements(2).unwrap();
        let rho = ground_truth_state(2, 0.95).unwrap();
        let data = simulate_counts(&rho, &m, 400, 42).unwrap();
        assert!(data.setting_totals().iter().all(|&n| n == 400));
        assert_eq!(data.grand_total(), 3600);
        assert_eq!(data, simulate_counts(&rho, &m, 400, 42).unwrap());
        assert_ne!(data, simulate_counts(&rho, &m, 400, 43).unwrap());
        assert!(simulate_counts(&rho, &m, 0, 42).is_err());
    }

    #[test]
    fn least_squares_errors() {
        let m = two_qudit_mub_measurements(2).unwrap();
        let mut counts = vec![vec![100, 0, 0, 100]; 9];
        counts[3] = vec![0, 0, 0, 0];
        let data = CountData::new(counts).unwrap();
        assert!(matches!(
            least_squares_estimate(&data, &m),
            Err(Error::InvalidCounts(_))
        ));
        assert!(CountData::new(vec![]).is_err());
        let short = CountData::new(vec![vec![1, 2, 3, 4]; 4]).unwrap();
        assert!(least_squares_estimate(&short, &m).is_err());
    }

    #[test]
    fn counts_file_rejects_inconsistent_shots() {
        let m = two_qubit_xz_measurements().unwrap();
        let data = CountData::new(vec![vec![1, 2, 3, 4]; 4]).unwrap();
        let mut file = CountsFile::new(&m, &data, None).unwrap();
        assert_eq!(file.measurement, MeasurementKind::Xz2Qubit);
        file.settings[1].shots = 11;
        assert!(file.into_data().is_err());
    }
}
