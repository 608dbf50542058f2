//! Density matrices, their over-parameterization, the generator (Bloch)
//! decomposition and the projector onto observed generator directions.

use crate::linalg::{
    hermitian_to_real_coords, hermiticity_residual, min_eigenvalue, real_coords_to_hermitian, trace, write_real_coords,
    CMatrix, CVector, RMatrix, RVector,
};
use crate::{Error, Result};
use num_complex::Complex64;

/// Squared norms below this make a direction vector `z_k` unusable.
pub const MIN_DIRECTION_NORM_SQR: f64 = 1e-300;

/// Over-parameterization `x = {y_1..y_D, z_1..z_D}` of a `D×D` density matrix.
///
/// `y` holds positive weights and the columns of `z` are the complex direction
/// vectors `z_k`. The matrix is
/// `ρ(x) = Σ_k (y_k / Σ_l y_l) · z_k z_k† / |z_k|²`, which is a valid density
/// matrix for every point of the parameter domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    y: Vec<f64>,
    z: CMatrix,
}

impl ParamVector {
    /// Builds a parameter vector, rejecting non-positive weights and
    /// (numerically) zero directions.
    pub fn new(y: Vec<f64>, z: CMatrix) -> Result<Self> {
        let dim = y.len();
        if dim == 0 {
            return Err(Error::Domain("parameter dimension must be at least 1".into()));
        }
        if z.nrows() != dim || z.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: if z.nrows() != dim { z.nrows() } else { z.ncols() },
            });
        }
        let x = Self { y, z };
        x.check_domain()?;
        Ok(x)
    }

    /// Builds from weights and one direction vector per weight.
    pub fn from_columns(y: Vec<f64>, z: &[CVector]) -> Result<Self> {
        let dim = y.len();
        if z.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: z.len(),
            });
        }
        if let Some(bad) = z.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        Self::new(y, CMatrix::from_columns(z))
    }

    pub(crate) fn from_parts_unchecked(y: Vec<f64>, z: CMatrix) -> Self {
        Self { y, z }
    }

    fn check_domain(&self) -> Result<()> {
        for (k, &yk) in self.y.iter().enumerate() {
            if !(yk > 0.0 && yk.is_finite()) {
                return Err(Error::DegenerateParameter(format!(
                    "weight y_{k} = {yk} is not positive"
                )));
            }
        }
        for k in 0..self.dim() {
            let n2 = self.z.column(k).norm_squared();
            if !(n2 >= MIN_DIRECTION_NORM_SQR && n2.is_finite()) {
                return Err(Error::DegenerateParameter(format!(
                    "direction z_{k} has squared norm {n2:e}"
                )));
            }
        }
        Ok(())
    }

    /// Hilbert-space dimension `D`.
    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Directions as the columns of a `D×D` matrix.
    pub fn z(&self) -> &CMatrix {
        &self.z
    }

    /// Real degrees of freedom, `2D² + D`.
    pub fn real_dof(&self) -> usize {
        let d = self.dim();
        2 * d * d + d
    }
}

/// `D×D` Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

/// How far a matrix is from satisfying each density-matrix condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityResiduals {
    /// `max |ρ − ρ†|`
    pub hermiticity: f64,
    /// `|Tr ρ − 1|`
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl PhysicalityResiduals {
    pub fn of(m: &CMatrix) -> Self {
        let tr = trace(m);
        Self {
            hermiticity: hermiticity_residual(m),
            trace: (tr - Complex64::new(1.0, 0.0)).norm(),
            min_eigenvalue: min_eigenvalue(m),
        }
    }

    pub fn is_physical(&self) -> bool {
        self.hermiticity <= DensityMatrix::HERMITICITY_TOL
            && self.trace <= DensityMatrix::TRACE_TOL
            && self.min_eigenvalue >= DensityMatrix::PSD_TOL
    }
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    /// Lower bound accepted for the smallest eigenvalue.
    pub const PSD_TOL: f64 = -1e-10;

    /// Validates all three conditions (this costs an eigendecomposition).
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        let r = PhysicalityResiduals::of(&m);
        if r.hermiticity > Self::HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermiticity residual {:e}",
                r.hermiticity
            )));
        }
        if r.trace > Self::TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace residual {:e}", r.trace)));
        }
        if r.min_eigenvalue < Self::PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "minimum eigenvalue {:e}",
                r.min_eigenvalue
            )));
        }
        Ok(Self { m })
    }

    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        Self { m }
    }

    /// `I_D / D`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn pure(psi: &CVector) -> Result<Self> {
        check_unit(psi)?;
        Ok(Self { m: psi * psi.adjoint() })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn residuals(&self) -> PhysicalityResiduals {
        PhysicalityResiduals::of(&self.m)
    }

    /// Real coordinates (see [`crate::linalg`]).
    pub fn real_coords(&self) -> RVector {
        hermitian_to_real_coords(&self.m)
    }
}

/// `ρ(x) = Σ_k (y_k/Σ_l y_l) z_k z_k† / |z_k|²`, in `O(D³)`.
pub fn rho_from_params(x: &ParamVector) -> Result<DensityMatrix> {
    x.check_domain()?;
    Ok(DensityMatrix::new_unchecked(rho_matrix_unchecked(x)))
}

/// Builds ρ(x) without re-validating the domain. Used on hot sampler paths
/// where `x` came from a validated point or a positivity-preserving proposal.
pub(crate) fn rho_matrix_unchecked(x: &ParamVector) -> CMatrix {
    let dim = x.dim();
    let total: f64 = x.y.iter().sum();
    let mut b = x.z.clone();
    for k in 0..dim {
        let scale = (x.y[k] / total / x.z.column(k).norm_squared()).sqrt();
        b.column_mut(k).scale_mut(scale);
    }
    let rho = &b * b.adjoint();
    // Exact Hermiticity; the product is only Hermitian to rounding.
    let mut out = rho.clone();
    for i in 0..dim {
        out[(i, i)] = Complex64::new(rho[(i, i)].re, 0.0);
        for j in (i + 1)..dim {
            let v = (rho[(i, j)] + rho[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

/// Writes the real coordinates of ρ(x) into `out` (length `D²`).
pub(crate) fn rho_coords_into(x: &ParamVector, out: &mut [f64]) -> CMatrix {
    let rho = rho_matrix_unchecked(x);
    write_real_coords(&rho, out);
    rho
}

/// Which family a [`GeneratorBasis`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Generalized Gell-Mann matrices.
    GellMann,
    /// Tensor products of Pauli matrices scaled by `√(2/D)`.
    PauliProduct,
}

/// `D² − 1` traceless Hermitian generators of SU(D) with `Tr(λ_k λ_l) = 2δ_kl`.
///
/// Gell-Mann ordering: for each pair `j < k` in lexicographic order the
/// symmetric matrix `|j⟩⟨k| + |k⟩⟨j|` followed by the antisymmetric
/// `−i|j⟩⟨k| + i|k⟩⟨j|`, then the diagonal matrices for `l = 1..D−1`. For
/// `D = 2` this is `(σx, σy, σz)`.
///
/// Pauli-product ordering: strings over `{I, X, Y, Z}` in lexicographic order
/// with the first qubit most significant, skipping the identity string.
///
/// These orderings are part of the file-format contract and must not change.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    dim: usize,
    kind: BasisKind,
    lambdas: Vec<CMatrix>,
    labels: Vec<String>,
    /// Column k holds the real coordinates of λ_k.
    coords: RMatrix,
}

/// Generalized Gell-Mann basis for dimension `dim ≥ 2`.
pub fn generator_basis(dim: usize) -> Result<GeneratorBasis> {
    GeneratorBasis::gell_mann(dim)
}

impl GeneratorBasis {
    pub fn gell_mann(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("generator basis needs D ≥ 2, got {dim}")));
        }
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let mut lambdas = Vec::with_capacity(dim * dim - 1);
        let mut labels = Vec::with_capacity(dim * dim - 1);
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut s = CMatrix::zeros(dim, dim);
                s[(j, k)] = one;
                s[(k, j)] = one;
                lambdas.push(s);
                labels.push(format!("S{j}{k}"));
                let mut a = CMatrix::zeros(dim, dim);
                a[(j, k)] = -i;
                a[(k, j)] = i;
                lambdas.push(a);
                labels.push(format!("A{j}{k}"));
            }
        }
        for l in 1..dim {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut d = CMatrix::zeros(dim, dim);
            for m in 0..l {
                d[(m, m)] = Complex64::new(norm, 0.0);
            }
            d[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            lambdas.push(d);
            labels.push(format!("D{l}"));
        }
        Ok(Self::from_parts(dim, BasisKind::GellMann, lambdas, labels))
    }

    /// Pauli-product basis on `n_qubits ≥ 1` qubits (`D = 2^n`).
    pub fn pauli_products(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 6 {
            return Err(Error::Domain(format!(
                "Pauli-product basis supports 1..=6 qubits, got {n_qubits}"
            )));
        }
        let dim = 1usize << n_qubits;
        let paulis = single_qubit_paulis();
        let names = ['I', 'X', 'Y', 'Z'];
        let scale = (2.0 / dim as f64).sqrt();
        let mut lambdas = Vec::with_capacity(dim * dim - 1);
        let mut labels = Vec::with_capacity(dim * dim - 1);
        for code in 1..4usize.pow(n_qubits as u32) {
            let mut digits = Vec::with_capacity(n_qubits);
            let mut c = code;
            for _ in 0..n_qubits {
                digits.push(c % 4);
                c /= 4;
            }
            digits.reverse();
            let mut m = CMatrix::identity(1, 1);
            for &p in &digits {
                m = m.kronecker(&paulis[p]);
            }
            lambdas.push(m.scale(scale));
            labels.push(digits.iter().map(|&p| names[p]).collect());
        }
        Ok(Self::from_parts(dim, BasisKind::PauliProduct, lambdas, labels))
    }

    fn from_parts(dim: usize, kind: BasisKind, lambdas: Vec<CMatrix>, labels: Vec<String>) -> Self {
        let mut coords = RMatrix::zeros(dim * dim, lambdas.len());
        for (k, l) in lambdas.iter().enumerate() {
            coords.set_column(k, &hermitian_to_real_coords(l));
        }
        Self {
            dim,
            kind,
            lambdas,
            labels,
            coords,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of generators, `D² − 1`.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[CMatrix] {
        &self.lambdas
    }

    pub fn label(&self, k: usize) -> &str {
        &self.labels[k]
    }

    /// Index of the generator with the given label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `D² × (D² − 1)` matrix whose columns are the real coordinates of the generators.
    pub fn coords(&self) -> &RMatrix {
        &self.coords
    }
}

pub(crate) fn single_qubit_paulis() -> [CMatrix; 4] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

fn check_square(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: if m.nrows() != dim { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let r = hermiticity_residual(m);
    if r > DensityMatrix::HERMITICITY_TOL {
        return Err(Error::NotHermitian(r));
    }
    Ok(())
}

/// Bloch coefficients `c_k = Tr(ρ λ_k)` of a Hermitian matrix.
pub fn bloch_coeffs(rho: &CMatrix, basis: &GeneratorBasis) -> Result<Vec<f64>> {
    check_square(rho, basis.dim)?;
    check_hermitian(rho)?;
    let r = hermitian_to_real_coords(rho);
    Ok((basis.coords.transpose() * r).iter().copied().collect())
}

/// `ρ = I/D + ½ Σ_k c_k λ_k`. Hermitian and unit-trace, but positive only if
/// the coefficients describe a physical state.
pub fn rho_from_bloch(c: &[f64], basis: &GeneratorBasis) -> Result<CMatrix> {
    if c.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            actual: c.len(),
        });
    }
    let coords = identity_coords(basis.dim) + basis.coords.clone() * RVector::from_column_slice(c) * 0.5;
    Ok(real_coords_to_hermitian(coords.as_slice(), basis.dim))
}

fn identity_coords(dim: usize) -> RVector {
    let mut v = RVector::zeros(dim * dim);
    for i in 0..dim {
        v[i] = 1.0 / dim as f64;
    }
    v
}

/// The generator directions `K_M` a measurement set constrains, with the
/// precomputed linear map `V` acting on real coordinates so that
/// `coords(P_M(ρ)) = V · coords(ρ)`.
///
/// Indices are zero-based positions in the [`GeneratorBasis`] ordering.
#[derive(Debug, Clone)]
pub struct ObservedSubspace {
    dim: usize,
    indices: Vec<usize>,
    projector: RMatrix,
    complete: bool,
}

/// Projector onto the identity component plus the generators in `indices`.
pub fn observed_subspace(indices: &[usize], basis: &GeneratorBasis) -> Result<ObservedSubspace> {
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if let Some(&bad) = idx.iter().find(|&&k| k >= basis.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            limit: basis.len(),
        });
    }
    let dim = basis.dim;
    let complete = idx.len() == basis.len();
    let projector = if complete {
        RMatrix::identity(dim * dim, dim * dim)
    } else {
        let e = identity_coords(dim) * (dim as f64).sqrt();
        let observed = basis.coords.select_columns(idx.iter());
        &e * e.transpose() + &observed * observed.transpose() * 0.5
    };
    Ok(ObservedSubspace {
        dim,
        complete,
        indices: idx,
        projector,
    })
}

impl ObservedSubspace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `V`, a `D² × D²` real symmetric idempotent matrix.
    pub fn projector(&self) -> &RMatrix {
        &self.projector
    }

    /// True when every generator is observed, in which case `P_M` is the identity.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Applies `V` to real coordinates; skipped entirely for complete sets.
    pub fn project_coords(&self, coords: &RVector) -> RVector {
        if self.complete {
            coords.clone()
        } else {
            &self.projector * coords
        }
    }
}

/// `P_M(ρ) = I/D + ½ Σ_{k∈K_M} Tr(ρλ_k) λ_k` for a unit-trace Hermitian `ρ`.
pub fn project_observed(rho: &CMatrix, subspace: &ObservedSubspace) -> Result<CMatrix> {
    check_square(rho, subspace.dim)?;
    check_hermitian(rho)?;
    let projected = subspace.project_coords(&hermitian_to_real_coords(rho));
    Ok(real_coords_to_hermitian(projected.as_slice(), subspace.dim))
}

fn check_unit(psi: &CVector) -> Result<()> {
    let n = psi.norm();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// `⟨ψ|ρ|ψ⟩` for a unit vector `ψ`, clipped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, psi: &CVector) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: psi.len(),
        });
    }
    check_unit(psi)?;
    let v = (psi.adjoint() * rho.matrix() * psi)[(0, 0)];
    Ok(v.re.clamp(0.0, 1.0))
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|v| v.norm_sqr()).sum()
}
