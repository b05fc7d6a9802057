#![allow(dead_code)]

use fockweyl::combinatorics::compositions;
use fockweyl::operator::DenseOperator;
use fockweyl::{FockSpace, PolySymbol, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rand_c(r: &mut ChaCha8Rng, scale: f64) -> C64 {
    c64(r.random_range(-scale..scale), r.random_range(-scale..scale))
}

pub fn rand_vec(r: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<C64> {
    (0..d).map(|_| rand_c(r, scale)).collect()
}

pub fn unit_vec(r: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    let v = rand_vec(r, d, 1.0);
    let n: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|c| c / n).collect()
}

pub fn rand_hermitian(r: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<C64> {
    let m = DMatrix::from_fn(d, d, |_, _| rand_c(r, scale));
    (&m + m.adjoint()) * c64(0.5, 0.0)
}

/// Random element of P_{p,q}: every monomial z̄^β z^γ with |γ| = p, |β| = q.
pub fn rand_homogeneous(r: &mut ChaCha8Rng, d: usize, p: u32, q: u32, scale: f64) -> PolySymbol {
    let mut b = PolySymbol::zero(d);
    for beta in compositions(d, q) {
        for gamma in compositions(d, p) {
            b.add_term(beta.clone(), gamma.clone(), rand_c(r, scale));
        }
    }
    b
}

/// Sum of random homogeneous parts with p, q ≤ max_deg.
pub fn rand_symbol(r: &mut ChaCha8Rng, d: usize, max_deg: u32, scale: f64) -> PolySymbol {
    let mut b = PolySymbol::zero(d);
    for p in 0..=max_deg {
        for q in 0..=max_deg {
            if r.random_bool(0.5) {
                b = b.add(&rand_homogeneous(r, d, p, q, scale));
            }
        }
    }
    b
}

/// Σ c (a*)^β a^γ assembled from products of the truncated ladder matrices.
pub fn ladder_product(space: &FockSpace, b: &PolySymbol) -> DenseOperator {
    let d = space.d();
    let a: Vec<DMatrix<C64>> =
        (0..d).map(|j| fockweyl::ladder::annihilation_j(space, j).to_dense().mat).collect();
    let ad: Vec<DMatrix<C64>> = a.iter().map(|m| m.adjoint()).collect();
    let dim = space.dim();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for ((beta, gamma), c) in b.terms() {
        let mut m = DMatrix::<C64>::identity(dim, dim);
        for j in 0..d {
            for _ in 0..beta[j] {
                m = &m * &ad[j];
            }
        }
        for j in 0..d {
            for _ in 0..gamma[j] {
                m = &m * &a[j];
            }
        }
        out += m * *c;
    }
    DenseOperator { space: space.clone(), mat: out }
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    fockweyl::operator::max_abs(m)
}
