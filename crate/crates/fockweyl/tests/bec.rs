mod common;

use std::f64::consts::PI;

use common::*;
use fockweyl::bec::*;
use fockweyl::special::zeta;
use proptest::prelude::*;

#[test]
fn zeta_matches_bracketed_partial_sums() {
    let k_max = 1_000_000u64;
    let s: f64 = (1..=k_max).rev().map(|k| (k as f64).powf(-1.5)).sum();
    let lo = s + 2.0 / ((k_max + 1) as f64).sqrt();
    let hi = s + 2.0 / (k_max as f64).sqrt();
    let z = zeta(1.5).unwrap();
    assert!(z.value >= lo - 1e-12 && z.value <= hi + 1e-12, "{} not in [{lo}, {hi}]", z.value);
    assert!(z.error_bound < 1e-12);
    assert!((zeta(2.0).unwrap().value - PI * PI / 6.0).abs() < 1e-13);
    assert!((zeta(4.0).unwrap().value - PI.powi(4) / 90.0).abs() < 1e-13);
    assert!(zeta(1.0).is_err());
}

#[test]
fn critical_density_value() {
    let nc = nu_crit(3, 1.0).unwrap();
    let want = zeta(1.5).unwrap().value * (4.0 * PI).powf(-1.5);
    assert!((nc.value - want).abs() < 1e-16);
    assert!((nc.value - 0.058_643_621_347_644_42).abs() < 1e-15);
    assert!(nu_crit(2, 1.0).is_err());
    assert!(nu_crit(1, 1.0).is_err());
}

#[test]
fn nu_zero_closed_form_in_two_dimensions() {
    for &z in &[0.1, 0.5, 0.9, 0.999] {
        let v = nu_zero(2, 0.7, z).unwrap();
        let want = -(1.0f64 - z).ln() / (4.0 * PI * 0.7);
        assert!((v.value - want).abs() < 1e-13 * want.max(1.0));
    }
    assert!(nu_zero(3, 1.0, 1.2).is_err());
    assert_eq!(nu_zero(3, 1.0, 1.0).unwrap().value, nu_crit(3, 1.0).unwrap().value);
}

#[test]
fn nu_zero_is_monotone_and_approaches_the_threshold() {
    let mut prev = 0.0;
    for &z in &[0.1, 0.5, 0.9, 0.99, 0.9999] {
        let v = nu_zero(3, 1.0, z).unwrap().value;
        assert!(v > prev);
        prev = v;
    }
    let nc = nu_crit(3, 1.0).unwrap().value;
    assert!(prev < nc && nc - prev < 2e-3);
}

/// Brute-force ε Σ_{n ≠ 0, |n|_∞ ≤ r} over the lattice.
fn brute_nu_eps(d: u32, beta: f64, eps: f64, z: f64, r: i64) -> f64 {
    let c = beta * eps.powf(2.0 / d as f64) * 4.0 * PI * PI;
    let mut s = 0.0;
    let mut idx = vec![-r; d as usize];
    loop {
        let m: i64 = idx.iter().map(|x| x * x).sum();
        if m != 0 {
            let e = (-c * m as f64).exp();
            s += z * e / (1.0 - z * e);
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return eps * s;
            }
            idx[j] += 1;
            if idx[j] <= r {
                break;
            }
            idx[j] = -r;
            j += 1;
        }
    }
}

#[test]
fn lattice_density_matches_brute_force() {
    for &(d, eps, z) in &[(1u32, 0.05, 0.7), (2, 0.02, 0.95), (3, 0.01, 0.99), (3, 0.1, 0.5)] {
        let p = BecParams::new(d, 1.0, 0.1, eps);
        let got = nu_eps(&p, z).unwrap();
        let want = brute_nu_eps(d, 1.0, eps, z, 40);
        assert!((got.value - want).abs() <= got.error_bound + 1e-13, "d={d}");
        assert!(got.error_bound <= LATTICE_TAIL_TOL);
    }
}

#[test]
fn lattice_density_is_monotone_and_converges() {
    let p = BecParams::new(3, 1.0, 0.1, 1e-3);
    let mut prev = 0.0;
    for &z in &[0.1, 0.5, 0.9, 0.99] {
        let v = nu_eps(&p, z).unwrap().value;
        assert!(v > prev);
        prev = v;
    }
    let z = 0.8;
    let target = nu_zero(3, 1.0, z).unwrap().value;
    let mut errs = Vec::new();
    for &eps in &[1e-2, 1e-3, 1e-4, 1e-5] {
        errs.push((nu_eps(&BecParams::new(3, 1.0, 0.1, eps), z).unwrap().value - target).abs());
    }
    for w in errs.windows(2) {
        assert!(w[1] < w[0] / 3.0, "{errs:?}");
    }
}

#[test]
fn fixed_cutoff_reports_insufficient_truncation() {
    let mut p = BecParams::new(3, 1.0, 0.1, 1e-4);
    p.lattice_cutoff = 2;
    assert!(nu_eps(&p, 0.5).is_err());
    p.lattice_cutoff = 0;
    assert!(nu_eps(&p, 0.5).is_ok());
    assert!(nu_eps(&p, 1.0).is_err());
    assert!(nu_eps(&BecParams::new(3, -1.0, 0.1, 1e-3), 0.5).is_err());
}

#[test]
fn fugacity_below_threshold() {
    let nu = 0.03;
    // z₀ with ν₀(z₀) = ν
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if nu_zero(3, 1.0, mid).unwrap().value < nu {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z0 = 0.5 * (lo + hi);
    let mut errs = Vec::new();
    for &eps in &[1e-2, 1e-3, 1e-4] {
        let p = BecParams::new(3, 1.0, nu, eps);
        let f = solve_fugacity(&p).unwrap();
        assert!(f.constraint_residual <= CONSTRAINT_TOL + f.tail_bound);
        errs.push((f.z - z0).abs());
        assert!(f.zero_mode < 10.0 * eps);
    }
    assert!(errs[2] < errs[0]);
}

#[test]
fn fugacity_above_threshold_builds_a_condensate() {
    let nu = 0.1;
    let nc = nu_crit(3, 1.0).unwrap().value;
    let mut prev_gap = f64::INFINITY;
    for &eps in &[1e-3, 1e-4, 1e-5] {
        let p = BecParams::new(3, 1.0, nu, eps);
        let f = solve_fugacity(&p).unwrap();
        assert!(f.constraint_residual <= CONSTRAINT_TOL + f.tail_bound);
        assert!((f.w - (1.0 - f.z)).abs() < 1e-15);
        let gap = (f.zero_mode - (nu - nc)).abs();
        assert!(gap < prev_gap);
        prev_gap = gap;
    }
    assert!((condensate_fraction(3, 1.0, nu).unwrap() - (1.0 - nc / nu)).abs() < 1e-15);
    assert_eq!(condensate_fraction(3, 1.0, 0.03).unwrap(), 0.0);
}

#[test]
fn characteristic_function_properties() {
    let p = BecParams::new(3, 1.0, 0.1, 1e-3);
    let (g0, _) = bec_char(&p, &[]).unwrap();
    assert_eq!(g0, c64(1.0, 0.0));
    let f1: Vec<Mode> = vec![(vec![0, 0, 0], c64(0.3, 0.0))];
    let f2: Vec<Mode> = vec![(vec![0, 0, 0], c64(0.5, 0.0)), (vec![1, 0, 0], c64(0.2, 0.1))];
    let (g1, fug) = bec_char(&p, &f1).unwrap();
    let (g2, _) = bec_char(&p, &f2).unwrap();
    assert!(g1.re < 1.0 && g2.re < g1.re && g2.re > 0.0);
    assert!(g1.im == 0.0);
    // closed form at the solved fugacity
    let want = (-p.epsilon * PI * PI * 0.09 * (1.0 + fug.z / (1.0 - fug.z))).exp();
    assert!((g1.re - want).abs() < 1e-12);
    assert!(bec_char(&p, &[(vec![0, 0], c64(1.0, 0.0))]).is_err());
}

#[test]
fn limit_characteristic_function() {
    let f: Vec<Mode> = vec![(vec![0, 0, 0], c64(0.4, 0.0)), (vec![0, 1, 0], c64(1.0, 0.0))];
    assert_eq!(bec_limit_char(&f, 3, 1.0, 0.03).unwrap(), c64(1.0, 0.0));
    let nc = nu_crit(3, 1.0).unwrap().value;
    let g = bec_limit_char(&f, 3, 1.0, 0.1).unwrap();
    assert!((g.re - (-PI * PI * (0.1 - nc) * 0.16).exp()).abs() < 1e-15);
}

#[test]
fn characteristic_function_converges_above_threshold() {
    let nu = 0.1;
    let f: Vec<Mode> = vec![(vec![0, 0, 0], c64(0.5, 0.0)), (vec![1, 0, 0], c64(0.3, 0.0))];
    let lim = bec_limit_char(&f, 3, 1.0, nu).unwrap();
    let mut prev = f64::INFINITY;
    for &eps in &[1e-2, 1e-3, 1e-4, 1e-5] {
        let (g, _) = bec_char(&BecParams::new(3, 1.0, nu, eps), &f).unwrap();
        let r = (g - lim).norm();
        assert!(r < prev);
        prev = r;
    }
    assert!(prev < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prop_constraint_is_solved(nu in 0.01f64..0.3, log_eps in -4.0f64..-1.0, beta in 0.5f64..2.0) {
        let p = BecParams::new(3, beta, nu, 10f64.powf(log_eps));
        let f = solve_fugacity(&p).unwrap();
        prop_assert!(f.z > 0.0 && f.z < 1.0);
        prop_assert!(f.constraint_residual <= CONSTRAINT_TOL + f.tail_bound);
        let direct = p.epsilon * f.z / f.w + nu_eps_w(&p, f.w).unwrap().value;
        prop_assert!((direct - nu).abs() <= 1e-11);
    }

    #[test]
    fn prop_char_in_unit_interval(re in -1.0f64..1.0, im in -1.0f64..1.0, n1 in -3i64..3) {
        let p = BecParams::new(3, 1.0, 0.1, 1e-3);
        let f: Vec<Mode> = vec![(vec![n1, 0, 1], c64(re, im))];
        let (g, _) = bec_char(&p, &f).unwrap();
        prop_assert!(g.re > 0.0 && g.re <= 1.0 && g.im == 0.0);
    }
}
