mod common;

use common::*;
use fockweyl::combinatorics::{binomial, factorial};
use fockweyl::dyson::{dyson_hierarchy, dyson_step, dyson_tail_bound, falling_factorial_alphas, free_evolved, DysonMode};
use fockweyl::wick::{guarded_columns, wick_quantize_dense};
use fockweyl::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn two_mode_model(eps: f64, n_max: u32, seed: u64, q_scale: f64) -> ModelSpec {
    let mut r = rng(seed);
    let a = DMatrix::from_row_slice(2, 2, &[c64(0.5, 0.0), c64(0.3, -0.2), c64(0.3, 0.2), c64(-0.4, 0.0)]);
    let q = rand_hermitian(&mut r, 3, q_scale);
    ModelSpec::new(a, q, eps, n_max).unwrap()
}

#[test]
fn hierarchy_is_a_multicommutator() {
    let eps = 0.3;
    let m = two_mode_model(eps, 6, 61, 0.5);
    let s = m.space().unwrap();
    let mut r = rng(62);
    let b = rand_homogeneous(&mut r, 2, 2, 1, 1.0);
    let t = 0.4;
    let times = [0.1, 0.35, 0.2];
    let h = dyson_hierarchy(&m, &b, &times, t);
    let mut nested = wick_quantize_dense(&s, &free_evolved(&m, &b, t)).unwrap();
    for (n, &tn) in times.iter().enumerate() {
        let qn = wick_quantize_dense(&s, &m.q_at(tn)).unwrap();
        nested = qn.commutator(&nested).scale(c64(1.0 / eps, 0.0));
        let level = &h[n + 1];
        assert_eq!(level.len(), n + 2);
        let mut sum = PolySymbol::zero(2);
        for (rr, c) in level.iter().enumerate() {
            sum = sum.add(&c.scale(c64(eps.powi(rr as i32), 0.0)));
        }
        let w = wick_quantize_dense(&s, &sum).unwrap();
        let diff = guarded_columns(&w, 5) - guarded_columns(&nested, 5);
        assert!(max_abs(&diff) < 1e-12, "n={} diff {}", n + 1, max_abs(&diff));
    }
}

#[test]
fn hierarchy_degrees() {
    let m = two_mode_model(0.1, 4, 63, 0.5);
    let mut r = rng(64);
    for &(p, q) in &[(1u32, 0u32), (2, 1), (1, 1)] {
        let b = rand_homogeneous(&mut r, 2, p, q, 1.0);
        let h = dyson_hierarchy(&m, &b, &[0.1, 0.2, 0.3], 0.5);
        for (n, level) in h.iter().enumerate() {
            for (rr, c) in level.iter().enumerate() {
                if c.max_coefficient() < 1e-14 {
                    continue;
                }
                let want = (p + n as u32 - rr as u32, q + n as u32 - rr as u32);
                assert_eq!(c.clone().pruned(1e-14).homogeneity(), Some(want), "n={n} r={rr}");
            }
        }
    }
}

#[test]
fn dyson_symbol_orders_times() {
    let m = two_mode_model(0.1, 4, 65, 0.5);
    let b = PolySymbol::annihilator(&[c64(1.0, 0.0), c64(0.0, 1.0)]);
    let ds = dyson_symbol(&m, &b, &[0.3, 0.1], 0.5, 1).unwrap();
    assert_eq!(ds.times, vec![0.3, 0.1, 0.5]);
    let manual = dyson_step(&m.q_at(0.3), &dyson_step(&m.q_at(0.1), &[free_evolved(&m, &b, 0.5)]));
    assert!(ds.value.sub(&manual[1]).max_coefficient() < 1e-15);
    assert!(dyson_symbol(&m, &b, &[0.3], 0.5, 2).is_err());
}

#[test]
fn coefficient_norm_growth_bound() {
    let m = two_mode_model(0.1, 4, 66, 0.5);
    let v = m.v_norm;
    let mut r = rng(67);
    for &(p, q) in &[(1u32, 0u32), (1, 1), (2, 1)] {
        let b = rand_homogeneous(&mut r, 2, p, q, 1.0);
        let bn = b.tensor_norm().unwrap();
        let big_p = p.max(q);
        let h = dyson_hierarchy(&m, &b, &[0.2, 0.7, 0.1, 0.4], 0.3);
        for (n, level) in h.iter().enumerate() {
            let n = n as u32;
            for (rr, c) in level.iter().enumerate() {
                let rr = rr as u32;
                let l = big_p + n - rr;
                let bound = 2f64.powi((n - rr) as i32)
                    * binomial(n as u64, rr as u64) as f64
                    * (l as f64).powi(2 * rr as i32)
                    * factorial(l - 1)
                    / factorial(big_p - 1)
                    * v.powi(n as i32)
                    * bn;
                let nrm = c.tensor_norm().unwrap();
                assert!(nrm <= bound * (1.0 + 1e-10), "({p},{q}) n={n} r={rr}: {nrm} > {bound}");
            }
        }
    }
}

#[test]
fn falling_factorial_identity() {
    for p in 1..=3u32 {
        for n in 0..=4u32 {
            for r in 0..=n {
                let l = p + n - r;
                for &(k, eps) in &[(10u32, 0.1), (25, 0.04), (7, 0.5)] {
                    let kappa = k as f64 * eps;
                    let a = falling_factorial_alphas(p, n, r, kappa).unwrap();
                    assert_eq!(a.len(), l as usize);
                    let s: f64 = a.iter().enumerate().map(|(j, c)| c * eps.powi(j as i32)).sum();
                    let want = if l > k { 0.0 } else { factorial(k) / factorial(k - l) * eps.powi(l as i32) };
                    assert!((s - want).abs() < 1e-12 * want.abs().max(1e-3), "p={p} n={n} r={r} k={k}");
                }
            }
        }
    }
    assert!(falling_factorial_alphas(1, 1, 2, 0.5).is_err());
}

#[test]
fn full_sum_reproduces_exact_matrix_element() {
    let (eps, k, t) = (0.2, 5u32, 0.3);
    let m = ModelSpec::scalar(0.7, 0.2, eps, 40);
    let s = m.space().unwrap();
    let z = [c64(0.6, 0.8)];
    let b = PolySymbol::annihilator(&[c64(1.0, 0.0)]);
    let exact = dyson_matrix_element(&s, &m, &b, &z, k, 1, t).unwrap();
    let ex = dyson_expansion(&m, &b, &z, k, eps, t, 40, 39, 4).unwrap();
    assert_eq!(ex.mode, DysonMode::Series);
    assert!((ex.partial_sum - exact).norm() < 1e-12, "{} vs {exact}", ex.partial_sum);
    assert!(ex.tail_bound < 1e-10);
}

#[test]
fn non_autonomous_sum_matches_exact() {
    let (eps, k, t) = (0.25, 3u32, 0.2);
    let m = two_mode_model(eps, 14, 68, 0.3);
    assert!(4.0 * t * m.v_norm < 1.0);
    let s = m.space().unwrap();
    let z = [c64(0.6, 0.0), c64(0.0, 0.8)];
    let b = PolySymbol::annihilator(&[c64(1.0, 0.0), c64(0.5, -0.5)]);
    let exact = dyson_matrix_element(&s, &m, &b, &z, k, 1, t).unwrap();
    let ex = dyson_expansion(&m, &b, &z, k, eps, t, 4, 3, 3).unwrap();
    assert!(ex.quad_gap < 1e-10);
    let err = (ex.partial_sum - exact).norm();
    assert!(err <= ex.tail_bound + ex.quad_gap + 1e-10, "{err} vs tail {}", ex.tail_bound);
}

#[test]
fn number_observable_gives_epsilon_k() {
    let m = ModelSpec::scalar(0.7, 0.2, 0.1, 10);
    for k in 1..=6u32 {
        let eps = 0.1;
        let ex = dyson_expansion(&m, &PolySymbol::norm_sqr(1), &[c64(0.6, 0.8)], k, eps, 0.5, 3, 6, 4).unwrap();
        assert!((ex.partial_sum - eps * k as f64).norm() < 1e-13);
    }
}

#[test]
fn zero_time_gives_the_hermite_element() {
    let mut r = rng(69);
    let eps = 0.2;
    let m = two_mode_model(eps, 12, 70, 0.3);
    let z = [c64(0.6, 0.0), c64(0.0, 0.8)];
    for &(p, q) in &[(1u32, 0u32), (2, 1), (2, 0), (1, 1)] {
        let b = rand_homogeneous(&mut r, 2, p, q, 1.0);
        let k = 4;
        let ex = dyson_expansion(&m, &b, &z, k, eps, 0.0, 2, 3, 4).unwrap();
        let s = m.space().unwrap();
        let exact = dyson_matrix_element(&s, &m, &b, &z, k, p - q, 0.0).unwrap();
        assert!((ex.partial_sum - exact).norm() < 1e-12, "({p},{q})");
    }
}

#[test]
fn strong_coupling_falls_back_to_the_limit() {
    let m = ModelSpec::scalar(0.7, 2.0, 0.1, 10);
    let b = PolySymbol::annihilator(&[c64(1.0, 0.0)]);
    let ex = dyson_expansion(&m, &b, &[c64(0.6, 0.8)], 5, 0.1, 0.5, 3, 6, 4).unwrap();
    assert_eq!(ex.mode, DysonMode::LimitOnly);
    assert_eq!(ex.partial_sum, ex.b_zt);
    assert!(ex.tail_bound.is_infinite());
}

#[test]
fn tail_bound_decreases_with_cutoff() {
    let m = ModelSpec::scalar(0.7, 0.2, 0.1, 10);
    let b = PolySymbol::annihilator(&[c64(1.0, 0.0)]);
    let z = [c64(0.6, 0.8)];
    let mut prev = f64::INFINITY;
    for n_cut in [2u32, 4, 8, 16] {
        let tb = dyson_tail_bound(&m, &b, &z, 40, 1, 0.025, 0.5, 3, n_cut).unwrap();
        assert!(tb < prev);
        prev = tb;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn prop_step_lengths_and_zero_bracket(seed in 0u64..10_000) {
        let m = two_mode_model(0.1, 4, seed, 0.5);
        // gauge-invariant Q commutes with |z|²
        let h = dyson_hierarchy(&m, &PolySymbol::norm_sqr(2), &[0.1, 0.2], 0.3);
        prop_assert_eq!(h.len(), 3);
        for level in &h[1..] {
            for c in level {
                prop_assert!(c.max_coefficient() < 1e-13);
            }
        }
    }

    #[test]
    fn prop_alphas_identity(p in 1u32..4, n in 0u32..4, k in 10u32..40, eps in 0.01f64..0.2) {
        let r = 0;
        let l = p + n - r;
        let a = falling_factorial_alphas(p, n, r, k as f64 * eps).unwrap();
        let s: f64 = a.iter().enumerate().map(|(j, c)| c * eps.powi(j as i32)).sum();
        let want = factorial(k) / factorial(k - l) * eps.powi(l as i32);
        prop_assert!((s - want).abs() < 1e-11 * want.max(1e-3));
    }
}
