//! Small dense complex linear-algebra helpers shared by the tomography modules.
//!
//! Hermitian `D×D` matrices are frequently handled through their *real
//! coordinates*: a length-`D²` real vector
//!
//! ```text
//! [ m_00, m_11, ..., m_(D-1)(D-1),  √2·Re m_01, √2·Im m_01,  √2·Re m_02, √2·Im m_02, ... ]
//! ```
//!
//! with the off-diagonal pairs `(i, j), i < j` in row-major order. The `√2`
//! scaling makes the Euclidean inner product of two coordinate vectors equal
//! to the Hilbert–Schmidt product `Tr(A B)`, so Frobenius norms, Bloch
//! coefficients and outcome probabilities are all plain dot products.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

/// Number of real coordinates of a Hermitian `dim × dim` matrix (`dim²`).
pub fn real_coord_len(dim: usize) -> usize {
    dim * dim
}

/// Real coordinates of the Hermitian part of `m`; only the upper triangle is read.
pub fn hermitian_to_real_coords(m: &CMatrix) -> RVector {
    let dim = m.nrows();
    let mut out = RVector::zeros(real_coord_len(dim));
    write_real_coords(m, out.as_mut_slice());
    out
}

pub(crate) fn write_real_coords(m: &CMatrix, out: &mut [f64]) {
    let dim = m.nrows();
    debug_assert_eq!(out.len(), dim * dim);
    let s = std::f64::consts::SQRT_2;
    for i in 0..dim {
        out[i] = m[(i, i)].re;
    }
    let mut p = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = m[(i, j)];
            out[p] = s * v.re;
            out[p + 1] = s * v.im;
            p += 2;
        }
    }
}

/// Inverse of [`hermitian_to_real_coords`].
pub fn real_coords_to_hermitian(coords: &[f64], dim: usize) -> CMatrix {
    assert_eq!(coords.len(), dim * dim, "coordinate length must be dim²");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(coords[i], 0.0);
    }
    let mut p = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = Complex64::new(s * coords[p], s * coords[p + 1]);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
            p += 2;
        }
    }
    m
}

/// `max |m − m†|` over all entries.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let dim = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in i..dim {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let h = faer::Mat::<Complex64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    match h.self_adjoint_eigenvalues(faer::Side::Lower) {
        Ok(ev) => ev.into_iter().fold(f64::INFINITY, f64::min),
        Err(_) => f64::NAN,
    }
}

pub(crate) fn to_faer(m: &RMatrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Outer product `u v†`.
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Numerical rank from singular values, relative threshold `rel_tol·σ_max`.
pub fn numerical_rank(m: &RMatrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = match to_faer(m).singular_values() {
        Ok(sv) => sv,
        Err(_) => return 0,
    };
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}
