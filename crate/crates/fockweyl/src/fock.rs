//! Truncated symmetric Fock space over C^d with ε-scaled CCR.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use nalgebra::DVector;

use crate::combinatorics::{self, ln_factorial, MultiIndex};
use crate::error::{Error, Result};
use crate::C64;

/// Default limit on the total dimension of a space with materialized tables.
pub const DEFAULT_DIM_CAP: u128 = 4_000_000;

/// Default accepted truncation tail for coherent states.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

#[derive(Debug)]
struct SpaceInner {
    d: usize,
    n_max: u32,
    epsilon: f64,
    offsets: Vec<usize>,
    sizes: Vec<usize>,
    dim: usize,
    basis: OnceLock<Vec<MultiIndex>>,
}

/// Occupation-number basis of Γ_s(C^d) restricted to |α| ≤ n_max,
/// ordered by block and then by [`combinatorics::compositions`].
#[derive(Debug, Clone)]
pub struct FockSpace {
    inner: Arc<SpaceInner>,
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        self.d() == other.d() && self.n_max() == other.n_max() && self.epsilon() == other.epsilon()
    }
}

pub fn make_space(d: usize, n_max: u32, epsilon: f64) -> Result<FockSpace> {
    FockSpace::with_cap(d, n_max, epsilon, DEFAULT_DIM_CAP)
}

impl FockSpace {
    pub fn new(d: usize, n_max: u32, epsilon: f64) -> Result<Self> {
        make_space(d, n_max, epsilon)
    }

    pub fn with_cap(d: usize, n_max: u32, epsilon: f64, cap: u128) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("d must be positive".into()));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        let total = combinatorics::binomial(n_max as u64 + d as u64, d as u64);
        if total > cap {
            return Err(Error::TruncationTooLarge { dim: total, cap });
        }
        let sizes: Vec<usize> =
            (0..=n_max).map(|n| combinatorics::block_size(d, n) as usize).collect();
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        for s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        offsets.push(acc);
        Ok(FockSpace {
            inner: Arc::new(SpaceInner {
                d,
                n_max,
                epsilon,
                offsets,
                sizes,
                dim: acc,
                basis: OnceLock::new(),
            }),
        })
    }

    pub fn d(&self) -> usize {
        self.inner.d
    }
    pub fn n_max(&self) -> u32 {
        self.inner.n_max
    }
    pub fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }
    pub fn dim(&self) -> usize {
        self.inner.dim
    }
    pub fn block_size(&self, n: u32) -> usize {
        self.inner.sizes.get(n as usize).copied().unwrap_or(0)
    }
    pub fn block_offset(&self, n: u32) -> usize {
        self.inner.offsets[n as usize]
    }
    pub fn block_range(&self, n: u32) -> std::ops::Range<usize> {
        self.inner.offsets[n as usize]..self.inner.offsets[n as usize + 1]
    }
    /// Number of basis elements in blocks 0..=n.
    pub fn dim_upto(&self, n: u32) -> usize {
        self.inner.offsets[(n.min(self.n_max()) + 1) as usize]
    }

    pub fn basis(&self) -> &[MultiIndex] {
        self.inner
            .basis
            .get_or_init(|| combinatorics::graded_basis(self.d(), self.n_max()))
    }

    pub fn block_basis(&self, n: u32) -> &[MultiIndex] {
        &self.basis()[self.block_range(n)]
    }

    /// Index of α in the basis, `None` if outside the truncation.
    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        debug_assert_eq!(alpha.len(), self.d());
        let n: u32 = alpha.iter().sum();
        if n > self.n_max() {
            return None;
        }
        Some(self.block_offset(n) + combinatorics::rank_in_block(alpha))
    }

    /// Block number of a basis index.
    pub fn block_of(&self, idx: usize) -> u32 {
        match self.inner.offsets.binary_search(&idx) {
            Ok(b) => b as u32,
            Err(b) => (b - 1) as u32,
        }
    }

    pub fn same_as(&self, other: &FockSpace) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self == other
    }

    pub(crate) fn check_dim(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: f.len() });
        }
        Ok(())
    }
}

/// State vector on a truncated space.
#[derive(Debug, Clone)]
pub struct FockVector {
    pub space: FockSpace,
    pub coeffs: DVector<C64>,
    /// L² mass of the analytic state lying beyond the truncation.
    pub tail_mass: f64,
}

impl FockVector {
    pub fn zeros(space: &FockSpace) -> Self {
        FockVector { space: space.clone(), coeffs: DVector::zeros(space.dim()), tail_mass: 0.0 }
    }

    pub fn from_coeffs(space: &FockSpace, coeffs: DVector<C64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: coeffs.len() });
        }
        Ok(FockVector { space: space.clone(), coeffs, tail_mass: 0.0 })
    }

    pub fn basis_vector(space: &FockSpace, alpha: &[u32]) -> Result<Self> {
        let idx = space
            .index_of(alpha)
            .ok_or_else(|| Error::InvalidArgument(format!("{alpha:?} outside truncation")))?;
        let mut v = Self::zeros(space);
        v.coeffs[idx] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn get(&self, alpha: &[u32]) -> C64 {
        self.space.index_of(alpha).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self, other⟩, antilinear in `self`.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.coeffs.dotc(&other.coeffs)
    }

    pub fn scale(mut self, c: C64) -> Self {
        self.coeffs *= c;
        self
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        FockVector {
            space: self.space.clone(),
            coeffs: &self.coeffs + &other.coeffs,
            tail_mass: self.tail_mass + other.tail_mass,
        }
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.coeffs /= C64::new(n, 0.0);
        }
        self
    }

    /// Squared norm carried by each block.
    pub fn block_weights(&self) -> Vec<f64> {
        (0..=self.space.n_max())
            .map(|n| self.coeffs.rows(self.space.block_range(n).start, self.space.block_size(n)).norm_squared())
            .collect()
    }

    /// Mass carried by blocks strictly above `n`.
    pub fn mass_above(&self, n: u32) -> f64 {
        if n >= self.space.n_max() {
            return 0.0;
        }
        let start = self.space.block_offset(n + 1);
        self.coeffs.rows(start, self.space.dim() - start).norm_squared()
    }
}

fn check_z(space: &FockSpace, z: &[C64]) -> Result<()> {
    space.check_dim(z)
}

/// ln|z^α| and arg z^α, `None` when the monomial vanishes.
fn monomial_polar(z: &[C64], alpha: &[u32]) -> Option<(f64, f64)> {
    let mut ln_mod = 0.0;
    let mut arg = 0.0;
    for (zj, &a) in z.iter().zip(alpha) {
        if a == 0 {
            continue;
        }
        let r = zj.norm();
        if r == 0.0 {
            return None;
        }
        ln_mod += a as f64 * r.ln();
        arg += a as f64 * zj.arg();
    }
    Some((ln_mod, arg))
}

/// z^{⊗k}: coefficient √(k!/α!) z^α on block k.
pub fn hermite_state(space: &FockSpace, z: &[C64], k: u32) -> Result<FockVector> {
    check_z(space, z)?;
    if k > space.n_max() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n_max = {}", space.n_max())));
    }
    let mut v = FockVector::zeros(space);
    let lk = ln_factorial(k);
    for (i, alpha) in space.block_basis(k).iter().enumerate() {
        if let Some((lm, arg)) = monomial_polar(z, alpha) {
            let la: f64 = alpha.iter().map(|&a| ln_factorial(a)).sum();
            v.coeffs[space.block_offset(k) + i] = C64::from_polar((0.5 * (lk - la) + lm).exp(), arg);
        }
    }
    Ok(v)
}

/// P(X > n) for X ~ Poisson(λ), summed directly so that small tails keep full relative accuracy.
pub fn poisson_tail(lambda: f64, n: u32) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let ln_pmf = |m: u32| -lambda + m as f64 * lambda.ln() - ln_factorial(m);
    let mut total = 0.0;
    let mut m = n + 1;
    loop {
        let t = ln_pmf(m).exp();
        total += t;
        if (m as f64) > lambda && t < 1e-18 * total.max(1e-300) {
            break;
        }
        if t == 0.0 && (m as f64) > lambda {
            break;
        }
        m += 1;
    }
    total
}

pub fn coherent_state(space: &FockSpace, z: &[C64]) -> Result<FockVector> {
    coherent_state_with_tol(space, z, DEFAULT_TAIL_TOL)
}

/// E(z) = e^{-|z|²/2ε} Σ_n ε^{-n/2} z^{⊗n}/√n!, truncated at n_max.
pub fn coherent_state_with_tol(space: &FockSpace, z: &[C64], tol: f64) -> Result<FockVector> {
    check_z(space, z)?;
    let eps = space.epsilon();
    let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let lambda = r2 / eps;
    let tail = poisson_tail(lambda, space.n_max());
    if tail > tol {
        return Err(Error::TruncationInsufficient(format!(
            "coherent tail {tail:.3e} beyond n_max = {} exceeds {tol:.1e}",
            space.n_max()
        )));
    }
    let scaled: Vec<C64> = z.iter().map(|c| c / eps.sqrt()).collect();
    let mut v = FockVector::zeros(space);
    for (i, alpha) in space.basis().iter().enumerate() {
        if let Some((lm, arg)) = monomial_polar(&scaled, alpha) {
            let la: f64 = alpha.iter().map(|&a| ln_factorial(a)).sum();
            v.coeffs[i] = C64::from_polar((-0.5 * lambda + lm - 0.5 * la).exp(), arg);
        }
    }
    v.tail_mass = tail;
    Ok(v)
}

/// State on a space too large for materialized tables, stored by support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    pub d: usize,
    pub n_max: u32,
    pub epsilon: f64,
    pub coeffs: BTreeMap<MultiIndex, C64>,
    pub tail_mass: f64,
}

impl SparseState {
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &SparseState) -> C64 {
        self.coeffs
            .iter()
            .filter_map(|(a, c)| other.coeffs.get(a).map(|o| c.conj() * o))
            .sum()
    }

    /// Coherent state supported on the coordinates where z is nonzero.
    pub fn coherent(d: usize, n_max: u32, epsilon: f64, z: &[C64], tol: f64) -> Result<Self> {
        if z.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: z.len() });
        }
        let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let lambda = r2 / epsilon;
        let tail = poisson_tail(lambda, n_max);
        if tail > tol {
            return Err(Error::TruncationInsufficient(format!(
                "coherent tail {tail:.3e} exceeds {tol:.1e}"
            )));
        }
        let support: Vec<usize> = (0..d).filter(|&j| z[j] != C64::default()).collect();
        let scaled: Vec<C64> = z.iter().map(|c| c / epsilon.sqrt()).collect();
        let mut coeffs = BTreeMap::new();
        if support.is_empty() {
            coeffs.insert(vec![0; d], C64::new(1.0, 0.0));
        } else {
            for sub in combinatorics::graded_basis(support.len(), n_max) {
                let mut alpha = vec![0u32; d];
                for (s, &j) in sub.iter().zip(&support) {
                    alpha[j] = *s;
                }
                let (lm, arg) = monomial_polar(&scaled, &alpha).expect("support is nonzero");
                let la: f64 = alpha.iter().map(|&a| ln_factorial(a)).sum();
                coeffs.insert(alpha, C64::from_polar((-0.5 * lambda + lm - 0.5 * la).exp(), arg));
            }
        }
        Ok(SparseState { d, n_max, epsilon, coeffs, tail_mass: tail })
    }

    /// ⟨ψ, N ψ⟩ with N = dΓ(I).
    pub fn number_expectation(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(a, c)| self.epsilon * combinatorics::degree(a) as f64 * c.norm_sqr())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dims() {
        assert_eq!(make_space(1, 5, 0.5).unwrap().dim(), 6);
        assert_eq!(make_space(2, 3, 1.0).unwrap().dim(), 10);
        let s = make_space(3, 2, 0.1).unwrap();
        assert_eq!((0..=2).map(|n| s.block_size(n)).collect::<Vec<_>>(), vec![1, 3, 6]);
    }

    #[test]
    fn cap_rejects() {
        assert!(matches!(make_space(16, 30, 0.1), Err(Error::TruncationTooLarge { .. })));
    }

    #[test]
    fn index_roundtrip() {
        let s = make_space(3, 5, 1.0).unwrap();
        for (i, a) in s.basis().iter().enumerate() {
            assert_eq!(s.index_of(a), Some(i));
            assert_eq!(s.block_of(i), combinatorics::degree(a));
        }
    }

    #[test]
    fn hermite_simple() {
        let s = make_space(1, 5, 0.3).unwrap();
        let v = hermite_state(&s, &[c64(1.0, 0.0)], 3).unwrap();
        assert_eq!(v.get(&[3]), c64(1.0, 0.0));
        let s2 = make_space(2, 3, 1.0).unwrap();
        let v = hermite_state(&s2, &[c64(1.0, 0.0), c64(0.0, 0.0)], 2).unwrap();
        assert!((v.get(&[2, 0]) - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_vacuum() {
        let s = make_space(2, 4, 0.5).unwrap();
        let e = coherent_state(&s, &[c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert_eq!(e.tail_mass, 0.0);
        assert_eq!(e.get(&[0, 0]), c64(1.0, 0.0));
        assert!((e.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_guard() {
        let s = make_space(1, 5, 0.1).unwrap();
        assert!(matches!(
            coherent_state(&s, &[c64(1.0, 0.0)]),
            Err(Error::TruncationInsufficient(_))
        ));
    }
}
