mod common;

use common::*;
use fockweyl::dynamics::{
    coherent_wick_limit, hamiltonian, hartree_flow_with_tol, hartree_gradient, hepp_error, q2_symbol, Propagator,
};
use fockweyl::ladder::gauge_apply;
use fockweyl::operator::expm_hermitian;
use fockweyl::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn two_mode_model(eps: f64, n_max: u32, seed: u64) -> ModelSpec {
    let mut r = rng(seed);
    let a = rand_hermitian(&mut r, 2, 1.0);
    let q = rand_hermitian(&mut r, 3, 0.3);
    ModelSpec::new(a, q, eps, n_max).unwrap()
}

#[test]
fn model_validation() {
    let a = DMatrix::from_fn(2, 2, |i, j| c64(i as f64, j as f64));
    let q = DMatrix::identity(3, 3);
    assert!(ModelSpec::new(a, q.clone(), 0.1, 5).is_err());
    assert!(ModelSpec::new(DMatrix::identity(2, 2), DMatrix::identity(2, 2), 0.1, 5).is_err());
    let m = ModelSpec::scalar(1.0, 0.5, 0.1, 1);
    assert!(hamiltonian(&m.space().unwrap(), &m).is_err());
    assert!((m.v_norm - 1.0).abs() < 1e-15);
}

#[test]
fn scalar_propagation_is_diagonal() {
    let (a, q0, eps, t) = (0.7, 0.2, 0.1, 1.3);
    let m = ModelSpec::scalar(a, q0, eps, 40);
    let s = m.space().unwrap();
    let e = coherent_state(&s, &[c64(0.5, 0.3)]).unwrap();
    let u = propagate(&s, &m, &e, t).unwrap();
    for n in 0..=40usize {
        let nf = n as f64;
        let energy = eps * nf * a + eps * eps * nf * (nf - 1.0) * q0;
        let want = e.coeffs[n] * C64::from_polar(1.0, -t * energy / eps);
        assert!((u.coeffs[n] - want).norm() < 1e-13);
    }
}

#[test]
fn propagator_matches_dense_exponential() {
    let eps = 0.2;
    let m = two_mode_model(eps, 8, 41);
    let s = m.space().unwrap();
    let h = hamiltonian(&s, &m).unwrap().to_dense();
    let t = 0.8;
    let u = expm_hermitian(&(h.mat / C64::new(eps, 0.0)), t).unwrap();
    let mut r = rng(42);
    let v = FockVector::from_coeffs(&s, DVector::from_fn(s.dim(), |_, _| rand_c(&mut r, 1.0))).unwrap();
    let got = propagate(&s, &m, &v, t).unwrap();
    assert!((&got.coeffs - &u * &v.coeffs).norm() < 1e-11);
}

#[test]
fn propagation_is_a_unitary_group() {
    let m = two_mode_model(0.1, 20, 43);
    let s = m.space().unwrap();
    let p = Propagator::for_model(&s, &m).unwrap();
    let e = coherent_state(&s, &[c64(0.3, 0.1), c64(-0.2, 0.25)]).unwrap();
    let a = p.apply(&p.apply(&e, 0.4), 0.7);
    let b = p.apply(&e, 1.1);
    assert!((&a.coeffs - &b.coeffs).norm() < 1e-12);
    assert!((b.norm() - e.norm()).abs() < 1e-13);
    assert!((&p.apply(&b, -1.1).coeffs - &e.coeffs).norm() < 1e-12);
    assert!((&p.apply(&e, 0.0).coeffs - &e.coeffs).norm() < 1e-15);
}

#[test]
fn propagation_commutes_with_gauge() {
    let m = two_mode_model(0.1, 20, 44);
    let s = m.space().unwrap();
    let e = coherent_state(&s, &[c64(0.3, 0.1), c64(-0.2, 0.25)]).unwrap();
    let th = 1.7;
    let a = propagate(&s, &m, &gauge_apply(&e, th), 0.9).unwrap();
    let b = gauge_apply(&propagate(&s, &m, &e, 0.9).unwrap(), th);
    assert!((&a.coeffs - &b.coeffs).norm() < 1e-12);
}

#[test]
fn free_dynamics_moves_coherent_states() {
    let mut r = rng(45);
    let eps = 0.1;
    let a = rand_hermitian(&mut r, 2, 1.0);
    let m = ModelSpec::new(a.clone(), DMatrix::zeros(3, 3), eps, 40).unwrap();
    let s = m.space().unwrap();
    let z0 = [c64(0.3, 0.2), c64(-0.1, 0.4)];
    let t = 1.4;
    let u = expm_hermitian(&a, t).unwrap();
    let zt: Vec<C64> = (0..2).map(|i| u[(i, 0)] * z0[0] + u[(i, 1)] * z0[1]).collect();
    let got = propagate(&s, &m, &coherent_state(&s, &z0).unwrap(), t).unwrap();
    let want = coherent_state(&s, &zt).unwrap();
    assert!((&got.coeffs - &want.coeffs).norm() < 1e-12);
    let tr = hartree_flow(&m, &z0, t, 0.01).unwrap();
    for i in 0..2 {
        assert!((tr.final_z()[i] - zt[i]).norm() < 1e-10);
    }
    assert_eq!(tr.final_omega(), 0.0);
}

#[test]
fn hartree_gradient_matches_finite_differences() {
    let m = two_mode_model(0.1, 4, 46);
    let q = m.q_symbol();
    let z = [c64(0.4, -0.3), c64(0.2, 0.6)];
    let g = hartree_gradient(&m, &z);
    let h = 1e-5;
    for j in 0..2 {
        let shift = |dz: C64| {
            let mut w = z.to_vec();
            w[j] += dz;
            q.evaluate(&w)
        };
        // ∂_z̄ = (∂_x + i ∂_y)/2
        let dx = (shift(c64(h, 0.0)) - shift(c64(-h, 0.0))) / (2.0 * h);
        let dy = (shift(c64(0.0, h)) - shift(c64(0.0, -h))) / (2.0 * h);
        let fd = (dx + C64::i() * dy) * 0.5;
        assert!((fd - g[j]).norm() < 1e-8, "{fd} vs {}", g[j]);
    }
}

#[test]
fn hartree_conserves_norm_and_energy() {
    let m = two_mode_model(0.1, 4, 47);
    let z0 = [c64(0.5, 0.1), c64(-0.3, 0.4)];
    let tr = hartree_flow(&m, &z0, 3.0, 0.005).unwrap();
    assert!(tr.norm_drift < 1e-9);
    assert!(tr.energy_drift < 1e-9);
    assert!(tr.richardson_gap < 1e-7);
    assert!(hartree_flow_with_tol(&m, &z0, 3.0, 0.5, 1e-12).is_err());
    assert!(hartree_flow(&m, &[c64(1.0, 0.0)], 1.0, 0.1).is_err());
}

#[test]
fn quadratic_part_matches_polynomial_interpolation() {
    let m = two_mode_model(0.1, 4, 48);
    let q = m.q_symbol();
    let zt = [c64(0.3, 0.5), c64(-0.6, 0.1)];
    let q2 = q2_symbol(&m, &zt);
    assert_eq!(q2.homogeneity(), None);
    assert!(q2.bidegrees().iter().all(|&(p, q)| p + q == 2));
    let mut r = rng(49);
    for _ in 0..3 {
        let z = rand_vec(&mut r, 2, 1.0);
        // λ ↦ Q(zt + λz) has degree 4; λ² coefficient by interpolation at λ = ±1, ±2
        let f = |l: f64| {
            let w: Vec<C64> = zt.iter().zip(&z).map(|(a, b)| a + b * l).collect();
            q.evaluate(&w)
        };
        let c2 = (f(1.0) + f(-1.0)) * (4.0 / 6.0) - (f(2.0) + f(-2.0)) / 24.0 - f(0.0) * (5.0 / 4.0);
        assert!((q2.evaluate(&z) - c2).norm() < 1e-12);
    }
}

#[test]
fn hepp_is_exact_without_interaction() {
    let mut r = rng(50);
    let eps = 0.1;
    let m = ModelSpec::new(rand_hermitian(&mut r, 2, 1.0), DMatrix::zeros(3, 3), eps, 40).unwrap();
    let s = m.space().unwrap();
    let err = hepp_error(&s, &m, &[c64(0.3, 0.2), c64(-0.1, 0.4)], 1.0, 20).unwrap();
    assert!(err < 1e-9, "{err}");
}

#[test]
fn hepp_error_shrinks_with_epsilon() {
    let z0 = [c64(0.6, 0.8)];
    let mut errs = Vec::new();
    for &eps in &[0.05, 0.0125] {
        let n_max = (2.0 / eps) as u32 + 60;
        let m = ModelSpec::scalar(0.7, 0.2, eps, n_max);
        let s = m.space().unwrap();
        errs.push(hepp_error(&s, &m, &z0, 0.5, 200).unwrap());
    }
    // √ε scaling: a factor 4 in ε halves the error
    let ratio = errs[0] / errs[1];
    assert!(ratio > 1.6 && ratio < 2.5, "{errs:?}");
}

#[test]
fn hepp_state_has_the_right_phase_and_mean() {
    let eps = 0.02;
    let m = ModelSpec::scalar(0.7, 0.2, eps, 200);
    let s = m.space().unwrap();
    let z0 = [c64(0.6, 0.8)];
    let (psi, diag) = hepp_approximation(&s, &m, &z0, 0.5, 200).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-9);
    assert!(diag.norm_drift < 1e-9);
    assert!((diag.omega - 0.5 * 0.2).abs() < 1e-10);
    let exact_z = z0[0] * C64::from_polar(1.0, -0.5 * (0.7 + 0.4));
    assert!((diag.z_t[0] - exact_z).norm() < 1e-9);
}

#[test]
fn coherent_wick_limit_for_conserved_and_free_observables() {
    let m = ModelSpec::scalar(0.7, 0.2, 0.1, 10);
    let z0 = [c64(0.6, 0.8)];
    let rule = |eps: f64| (1.0 / eps) as u32 + 60;
    let rep = coherent_wick_limit(&m, &z0, &PolySymbol::norm_sqr(1), 0.5, &[0.1, 0.05], rule).unwrap();
    assert!(rep.residuals.iter().all(|&r| r < 1e-9));
    let b = PolySymbol::annihilator(&[c64(1.0, 0.0)]);
    let rep = coherent_wick_limit(&m, &z0, &b, 0.0, &[0.1, 0.05], rule).unwrap();
    assert!(rep.residuals.iter().all(|&r| r < 1e-9));
    let rep = coherent_wick_limit(&m, &z0, &b, 0.5, &[0.1, 0.05, 0.025], rule).unwrap();
    assert_eq!(rep.inversions, 0);
    assert!(rep.residuals[2] < rep.residuals[0] / 3.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn prop_propagation_preserves_block_weights(seed in 0u64..10_000, t in -2.0f64..2.0) {
        let m = two_mode_model(0.2, 8, seed);
        let s = m.space().unwrap();
        let mut r = rng(seed + 1);
        let v = FockVector::from_coeffs(&s, DVector::from_fn(s.dim(), |_, _| rand_c(&mut r, 1.0))).unwrap();
        let u = propagate(&s, &m, &v, t).unwrap();
        for (a, b) in v.block_weights().iter().zip(u.block_weights()) {
            prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn prop_hartree_norm(seed in 0u64..10_000) {
        let m = two_mode_model(0.1, 4, seed);
        let mut r = rng(seed + 7);
        let z0 = rand_vec(&mut r, 2, 0.6);
        let tr = hartree_flow(&m, &z0, 1.0, 0.005).unwrap();
        prop_assert!(tr.norm_drift < 1e-9);
    }
}
