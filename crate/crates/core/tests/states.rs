use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use pcn_qst::inference::{sample_prior, PriorConfig};
use pcn_qst::linalg::{hermiticity_residual, min_eigenvalue, trace, CMatrix, CVector};
use pcn_qst::measurements::{bell_state, ground_truth_state};
use pcn_qst::rng::seeded;
use pcn_qst::states::{
    bloch_coeffs, fidelity, generator_basis, observed_subspace, project_observed, purity, rho_from_bloch,
    rho_from_params, DensityMatrix, GeneratorBasis, ParamVector,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state(dim: usize, seed: u64) -> CMatrix {
    let prior = PriorConfig::new(1.0, dim).unwrap();
    rho_from_params(&sample_prior(&prior, &mut seeded(seed)))
        .unwrap()
        .into_matrix()
}

#[test]
fn prior_draws_are_physical() {
    for dim in [2, 3, 4, 9] {
        let prior = PriorConfig::new(1.0, dim).unwrap();
        let mut rng = seeded(dim as u64);
        for _ in 0..1000 {
            let rho = rho_from_params(&sample_prior(&prior, &mut rng)).unwrap();
            let m = rho.matrix();
            assert!(hermiticity_residual(m) <= 1e-12);
            assert!((trace(m) - c(1.0, 0.0)).norm() <= 1e-12);
            assert!(min_eigenvalue(m) >= -1e-10);
        }
    }
}

#[test]
fn scaling_weights_and_directions_leaves_state_unchanged() {
    let prior = PriorConfig::new(0.7, 4).unwrap();
    let mut rng = seeded(3);
    for _ in 0..50 {
        let x = sample_prior(&prior, &mut rng);
        let rho = rho_from_params(&x).unwrap();
        let y: Vec<f64> = x.y().iter().map(|v| v * 37.5).collect();
        let mut z = x.z().clone();
        z.column_mut(1).scale_mut(-2.5);
        let phase = c(0.3, -1.7);
        for i in 0..4 {
            z[(i, 2)] *= phase;
        }
        let scaled = rho_from_params(&ParamVector::new(y, z).unwrap()).unwrap();
        assert!((scaled.matrix() - rho.matrix()).norm() < 1e-12);
    }
}

#[test]
fn pauli_generators_for_one_qubit() {
    let b = generator_basis(2).unwrap();
    let sx = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    let sy = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
    let sz = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
    assert_eq!(b.len(), 3);
    for (g, want) in b.lambdas().iter().zip([sx, sy, sz]) {
        assert!((g - want).norm() < 1e-15);
    }
}

#[test]
fn gell_mann_counts_and_orthogonality() {
    assert_eq!(generator_basis(4).unwrap().len(), 15);
    assert!(generator_basis(1).is_err());
    let b = generator_basis(3).unwrap();
    assert_eq!(b.len(), 8);
    for (k, a) in b.lambdas().iter().enumerate() {
        assert!(hermiticity_residual(a) < 1e-15);
        assert!(trace(a).norm() < 1e-15);
        for (l, g) in b.lambdas().iter().enumerate() {
            let want = if k == l { 2.0 } else { 0.0 };
            assert!((trace(&(a * g)) - c(want, 0.0)).norm() < 1e-14);
        }
    }
}

#[test]
fn bloch_examples() {
    let b = generator_basis(2).unwrap();
    let mixed = CMatrix::identity(2, 2).scale(0.5);
    assert!(bloch_coeffs(&mixed, &b).unwrap().iter().all(|v| v.abs() < 1e-15));
    let up = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
    let cz = bloch_coeffs(&up, &b).unwrap();
    assert!((cz[0]).abs() < 1e-15 && cz[1].abs() < 1e-15 && (cz[2] - 1.0).abs() < 1e-15);
    assert!((rho_from_bloch(&[0.0; 3], &b).unwrap() - &mixed).norm() < 1e-15);
    assert!((rho_from_bloch(&[0.0, 0.0, 1.0], &b).unwrap() - &up).norm() < 1e-15);
    let outside = rho_from_bloch(&[0.0, 0.0, 2.0], &b).unwrap();
    assert!(hermiticity_residual(&outside) < 1e-15);
    assert!((trace(&outside) - c(1.0, 0.0)).norm() < 1e-15);
    assert!(min_eigenvalue(&outside) < 0.0);
    assert!(rho_from_bloch(&[0.0; 2], &b).is_err());
}

#[test]
fn two_qubit_pauli_products_span_the_same_space() {
    let b = GeneratorBasis::pauli_products(2).unwrap();
    assert_eq!(b.len(), 15);
    let rho = random_state(4, 8);
    let back = rho_from_bloch(&bloch_coeffs(&rho, &b).unwrap(), &b).unwrap();
    assert!((back - rho).norm() < 1e-12);
}

#[test]
fn full_subspace_is_identity_and_empty_subspace_is_mixed() {
    let b = generator_basis(3).unwrap();
    let all: Vec<usize> = (0..b.len()).collect();
    let full = observed_subspace(&all, &b).unwrap();
    let none = observed_subspace(&[], &b).unwrap();
    for seed in 0..5 {
        let rho = random_state(3, seed);
        assert!((project_observed(&rho, &full).unwrap() - &rho).norm() < 1e-14);
        assert!((project_observed(&rho, &none).unwrap() - CMatrix::identity(3, 3).scale(1.0 / 3.0)).norm() < 1e-14);
    }
    assert!(observed_subspace(&[8], &b).is_err());
}

#[test]
fn xz_pauli_subspace_has_rank_eight() {
    let b = GeneratorBasis::pauli_products(2).unwrap();
    let idx: Vec<usize> = (0..b.len())
        .filter(|&k| !b.label(k).contains('Y') && b.label(k) != "II")
        .collect();
    assert_eq!(idx.len(), 8);
    let sub = observed_subspace(&idx, &b).unwrap();
    let v = sub.projector();
    // One extra direction carries the identity component.
    let sv = v.clone().svd(false, false).singular_values;
    assert_eq!(sv.iter().filter(|&&s| s > 1e-10).count(), 9);
}

#[test]
fn z_only_projection_of_plus_state() {
    let b = generator_basis(2).unwrap();
    let sub = observed_subspace(&[2], &b).unwrap();
    let plus = CMatrix::from_element(2, 2, c(0.5, 0.0));
    let p = project_observed(&plus, &sub).unwrap();
    assert!((p - CMatrix::identity(2, 2).scale(0.5)).norm() < 1e-15);
}

// Sum form written out independently of the coordinate map.
fn projection_by_sum(rho: &CMatrix, b: &GeneratorBasis, idx: &[usize]) -> CMatrix {
    let dim = rho.nrows();
    let mut out = CMatrix::identity(dim, dim).scale(1.0 / dim as f64);
    for &k in idx {
        let g = &b.lambdas()[k];
        let ck = trace(&(rho * g)).re;
        out += g.scale(0.5 * ck);
    }
    out
}

#[test]
fn matrix_path_matches_sum_form() {
    for dim in [3, 4] {
        let b = generator_basis(dim).unwrap();
        let idx: Vec<usize> = (0..b.len()).filter(|k| k % 3 != 1).collect();
        let sub = observed_subspace(&idx, &b).unwrap();
        for seed in 0..10 {
            let rho = random_state(dim, 100 + seed);
            let fast = project_observed(&rho, &sub).unwrap();
            assert!((fast - projection_by_sum(&rho, &b, &idx)).norm() < 1e-12);
        }
    }
}

#[test]
fn fidelity_and_purity_examples() {
    let psi = bell_state(2);
    let pure = DensityMatrix::pure(&psi).unwrap();
    assert!((fidelity(&pure, &psi).unwrap() - 1.0).abs() < 1e-15);
    assert!((purity(&pure) - 1.0).abs() < 1e-15);
    let mixed = DensityMatrix::maximally_mixed(4);
    assert!((fidelity(&mixed, &psi).unwrap() - 0.25).abs() < 1e-15);
    assert!((purity(&mixed) - 0.25).abs() < 1e-15);
    let rho = ground_truth_state(2, 0.95).unwrap();
    assert!((fidelity(&rho, &psi).unwrap() - 0.9625).abs() < 1e-14);
    assert!((purity(&rho) - 0.926875).abs() < 1e-14);
    let unnormalized = CVector::from_element(4, c(1.0, 0.0));
    assert!(fidelity(&rho, &unnormalized).is_err());
}

#[test]
fn equal_and_unequal_weight_examples() {
    let z = CMatrix::identity(2, 2);
    let half = rho_from_params(&ParamVector::new(vec![1.0, 1.0], z.clone()).unwrap()).unwrap();
    assert!((half.matrix() - CMatrix::identity(2, 2).scale(0.5)).norm() < 1e-15);
    let skew = rho_from_params(&ParamVector::new(vec![3.0, 1.0], z).unwrap()).unwrap();
    let want = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.75, 0.0), c(0.25, 0.0)]));
    assert!((skew.matrix() - want).norm() < 1e-15);
}

fn arb_hermitian(dim: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim * dim).prop_map(move |v| {
        let a = DMatrix::from_fn(dim, dim, |i, j| c(v[i * dim + j], v[dim * dim + i * dim + j]));
        let h = (&a + a.adjoint()).scale(0.5);
        let tr = trace(&h).re;
        h - CMatrix::identity(dim, dim).scale((tr - 1.0) / dim as f64)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bloch_round_trip_on_unit_trace_hermitian(h in arb_hermitian(3)) {
        let b = generator_basis(3).unwrap();
        let coeffs = bloch_coeffs(&h, &b).unwrap();
        let back = rho_from_bloch(&coeffs, &b).unwrap();
        prop_assert!((back - &h).norm() < 1e-12);
        let again = bloch_coeffs(&rho_from_bloch(&coeffs, &b).unwrap(), &b).unwrap();
        for (x, y) in coeffs.iter().zip(&again) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_is_idempotent_and_linear(
        h1 in arb_hermitian(4),
        h2 in arb_hermitian(4),
        mask in prop::collection::vec(any::<bool>(), 15),
        t in 0.0f64..1.0,
    ) {
        let b = generator_basis(4).unwrap();
        let idx: Vec<usize> = (0..15).filter(|&k| mask[k]).collect();
        let sub = observed_subspace(&idx, &b).unwrap();
        let p1 = project_observed(&h1, &sub).unwrap();
        prop_assert!((project_observed(&p1, &sub).unwrap() - &p1).norm() < 1e-12);
        prop_assert!((trace(&p1) - c(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(hermiticity_residual(&p1) < 1e-12);
        let mix = h1.scale(t) + h2.scale(1.0 - t);
        let lhs = project_observed(&mix, &sub).unwrap();
        let rhs = p1.scale(t) + project_observed(&h2, &sub).unwrap().scale(1.0 - t);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn rho_from_params_is_physical(seed in any::<u64>(), dim in 2usize..6, alpha in 0.2f64..3.0) {
        let prior = PriorConfig::new(alpha, dim).unwrap();
        let rho = rho_from_params(&sample_prior(&prior, &mut seeded(seed))).unwrap();
        prop_assert!(rho.residuals().is_physical());
        prop_assert!(min_eigenvalue(rho.matrix()) >= -1e-10);
    }
}
