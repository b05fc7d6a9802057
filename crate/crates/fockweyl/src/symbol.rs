//! Polynomial symbols b(z) = Σ c_{βγ} z̄^β z^γ on C^d.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::combinatorics::{self, compositions, MultiIndex};
use crate::error::{Error, Result};
use crate::C64;

/// Monomial key: (β, γ) for z̄^β z^γ.
pub type Key = (MultiIndex, MultiIndex);

#[derive(Debug, Clone, PartialEq)]
pub struct PolySymbol {
    d: usize,
    terms: BTreeMap<Key, C64>,
}

impl PolySymbol {
    pub fn zero(d: usize) -> Self {
        PolySymbol { d, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: C64) -> Self {
        let mut s = Self::zero(d);
        s.add_term(vec![0; d], vec![0; d], c);
        s
    }

    pub fn monomial(beta: MultiIndex, gamma: MultiIndex, c: C64) -> Self {
        let mut s = Self::zero(beta.len());
        s.add_term(beta, gamma, c);
        s
    }

    /// |z|².
    pub fn norm_sqr(d: usize) -> Self {
        let mut s = Self::zero(d);
        for j in 0..d {
            let e = combinatorics::unit(d, j);
            s.add_term(e.clone(), e, C64::new(1.0, 0.0));
        }
        s
    }

    /// ⟨ξ, z⟩ = Σ ξ̄_j z_j, the symbol of a(ξ).
    pub fn annihilator(xi: &[C64]) -> Self {
        let d = xi.len();
        let mut s = Self::zero(d);
        for j in 0..d {
            s.add_term(vec![0; d], combinatorics::unit(d, j), xi[j].conj());
        }
        s
    }

    /// ⟨z, ξ⟩ = Σ z̄_j ξ_j, the symbol of a*(ξ).
    pub fn creator(xi: &[C64]) -> Self {
        Self::annihilator(xi).conj()
    }

    /// S(ξ, z) = Re⟨ξ, z⟩.
    pub fn real_pairing(xi: &[C64]) -> Self {
        Self::annihilator(xi).add(&Self::creator(xi)).scale(C64::new(0.5, 0.0))
    }

    /// ⟨z, A z⟩ = Σ A_{jk} z̄_j z_k.
    pub fn quadratic_form(a: &DMatrix<C64>) -> Self {
        let d = a.nrows();
        let mut s = Self::zero(d);
        for j in 0..d {
            for k in 0..d {
                s.add_term(combinatorics::unit(d, j), combinatorics::unit(d, k), a[(j, k)]);
            }
        }
        s
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Key, C64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, beta: &[u32], gamma: &[u32]) -> C64 {
        self.terms.get(&(beta.to_vec(), gamma.to_vec())).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, beta: MultiIndex, gamma: MultiIndex, c: C64) {
        assert_eq!(beta.len(), self.d);
        assert_eq!(gamma.len(), self.d);
        if c == C64::default() {
            return;
        }
        let key = (beta, gamma);
        let v = self.terms.get(&key).copied().unwrap_or_default() + c;
        if v == C64::default() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    /// Drops coefficients with modulus ≤ tol.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|_, c| c.norm() > tol);
        self
    }

    pub fn evaluate(&self, z: &[C64]) -> C64 {
        let mut acc = C64::default();
        for ((beta, gamma), c) in &self.terms {
            let mut m = *c;
            for j in 0..self.d {
                if beta[j] > 0 {
                    m *= z[j].conj().powu(beta[j]);
                }
                if gamma[j] > 0 {
                    m *= z[j].powu(gamma[j]);
                }
            }
            acc += m;
        }
        acc
    }

    /// Complex conjugate symbol: c z̄^β z^γ ↦ c̄ z̄^γ z^β.
    pub fn conj(&self) -> Self {
        PolySymbol {
            d: self.d,
            terms: self.terms.iter().map(|((b, g), c)| ((g.clone(), b.clone()), c.conj())).collect(),
        }
    }

    pub fn add(&self, other: &PolySymbol) -> Self {
        let mut out = self.clone();
        for ((b, g), c) in &other.terms {
            out.add_term(b.clone(), g.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &PolySymbol) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == C64::default() {
            return Self::zero(self.d);
        }
        PolySymbol { d: self.d, terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect() }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &PolySymbol) -> Self {
        let mut out = Self::zero(self.d);
        for ((b1, g1), c1) in &self.terms {
            for ((b2, g2), c2) in &other.terms {
                out.add_term(combinatorics::add(b1, b2), combinatorics::add(g1, g2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.d, C64::new(1.0, 0.0));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// ∂_z^μ.
    pub fn d_z(&self, mu: &[u32]) -> Self {
        let mut out = Self::zero(self.d);
        for ((b, g), c) in &self.terms {
            if combinatorics::componentwise_le(mu, g) {
                let f: f64 = g.iter().zip(mu).map(|(&gj, &mj)| combinatorics::falling(gj, mj)).product();
                out.add_term(b.clone(), combinatorics::sub(g, mu), c * f);
            }
        }
        out
    }

    /// ∂_z̄^μ.
    pub fn d_zbar(&self, mu: &[u32]) -> Self {
        let mut out = Self::zero(self.d);
        for ((b, g), c) in &self.terms {
            if combinatorics::componentwise_le(mu, b) {
                let f: f64 = b.iter().zip(mu).map(|(&bj, &mj)| combinatorics::falling(bj, mj)).product();
                out.add_term(combinatorics::sub(b, mu), g.clone(), c * f);
            }
        }
        out
    }

    /// (p, q) = (|γ|, |β|) when every term shares it.
    pub fn homogeneity(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(|(b, g)| (combinatorics::degree(g), combinatorics::degree(b)));
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }

    /// Verifies a declared (p, q) tag.
    pub fn check_homogeneous(&self, p: u32, q: u32) -> Result<()> {
        for (b, g) in self.terms.keys() {
            if combinatorics::degree(g) != p || combinatorics::degree(b) != q {
                return Err(Error::InvalidArgument(format!(
                    "term z̄^{b:?} z^{g:?} violates homogeneity ({p},{q})"
                )));
            }
        }
        Ok(())
    }

    /// Component of bidegree (p, q).
    pub fn part(&self, p: u32, q: u32) -> Self {
        PolySymbol {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|((b, g), _)| combinatorics::degree(g) == p && combinatorics::degree(b) == q)
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    /// Distinct bidegrees (p, q) present.
    pub fn bidegrees(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> =
            self.terms.keys().map(|(b, g)| (combinatorics::degree(g), combinatorics::degree(b))).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Sum of all parts with total degree p + q = m.
    pub fn total_degree_part(&self, m: u32) -> Self {
        PolySymbol {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|((b, g), _)| combinatorics::degree(g) + combinatorics::degree(b) == m)
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms.keys().map(|(b, g)| combinatorics::degree(g) + combinatorics::degree(b)).max().unwrap_or(0)
    }

    /// Largest creation degree |β| and annihilation degree |γ|.
    pub fn max_degrees(&self) -> (u32, u32) {
        let p = self.terms.keys().map(|(_, g)| combinatorics::degree(g)).max().unwrap_or(0);
        let q = self.terms.keys().map(|(b, _)| combinatorics::degree(b)).max().unwrap_or(0);
        (p, q)
    }

    /// b̃ ∈ L(∨^p, ∨^q) in normalized occupation bases; rows are β, columns γ.
    pub fn to_tensor(&self, p: u32, q: u32) -> Result<DMatrix<C64>> {
        self.check_homogeneous(p, q)?;
        let rows = compositions(self.d, q);
        let cols = compositions(self.d, p);
        let (pf, qf) = (combinatorics::factorial(p), combinatorics::factorial(q));
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (i, beta) in rows.iter().enumerate() {
            for (j, gamma) in cols.iter().enumerate() {
                let c = self.coefficient(beta, gamma);
                if c != C64::default() {
                    let w = (qf * pf / (combinatorics::multi_factorial(beta) * combinatorics::multi_factorial(gamma))).sqrt();
                    m[(i, j)] = c / w;
                }
            }
        }
        Ok(m)
    }

    pub fn from_tensor(d: usize, p: u32, q: u32, m: &DMatrix<C64>) -> Result<Self> {
        let rows = compositions(d, q);
        let cols = compositions(d, p);
        if m.nrows() != rows.len() || m.ncols() != cols.len() {
            return Err(Error::DimensionMismatch { expected: rows.len() * cols.len(), got: m.len() });
        }
        let (pf, qf) = (combinatorics::factorial(p), combinatorics::factorial(q));
        let mut s = Self::zero(d);
        for (i, beta) in rows.iter().enumerate() {
            for (j, gamma) in cols.iter().enumerate() {
                let w = (qf * pf / (combinatorics::multi_factorial(beta) * combinatorics::multi_factorial(gamma))).sqrt();
                s.add_term(beta.clone(), gamma.clone(), m[(i, j)] * w);
            }
        }
        Ok(s)
    }

    /// ‖b̃‖ for a homogeneous symbol.
    pub fn tensor_norm(&self) -> Result<f64> {
        match self.homogeneity() {
            None if self.is_zero() => Ok(0.0),
            None => Err(Error::InvalidArgument("tensor norm needs a homogeneous symbol".into())),
            Some((p, q)) => Ok(crate::operator::spectral_norm(&self.to_tensor(p, q)?)),
        }
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Symbol with an explicit expansion in powers of ε: Σ_r ε^r b_r.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSymbol {
    pub d: usize,
    pub grades: BTreeMap<u32, PolySymbol>,
}

impl GradedSymbol {
    pub fn zero(d: usize) -> Self {
        GradedSymbol { d, grades: BTreeMap::new() }
    }

    pub fn from_poly(b: PolySymbol) -> Self {
        let mut g = Self::zero(b.d());
        g.add_at(0, &b);
        g
    }

    pub fn add_at(&mut self, r: u32, b: &PolySymbol) {
        if b.is_zero() {
            return;
        }
        let e = self.grades.entry(r).or_insert_with(|| PolySymbol::zero(b.d()));
        *e = e.add(b);
        if e.is_zero() {
            self.grades.remove(&r);
        }
    }

    pub fn grade(&self, r: u32) -> PolySymbol {
        self.grades.get(&r).cloned().unwrap_or_else(|| PolySymbol::zero(self.d))
    }

    /// Collapses the grading at a given ε.
    pub fn at_epsilon(&self, eps: f64) -> PolySymbol {
        let mut out = PolySymbol::zero(self.d);
        for (r, b) in &self.grades {
            out = out.add(&b.scale(C64::new(eps.powi(*r as i32), 0.0)));
        }
        out
    }

    pub fn max_grade(&self) -> u32 {
        self.grades.keys().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn norm_sqr_eval() {
        let b = PolySymbol::norm_sqr(2);
        assert!((b.evaluate(&[c(1.0, 0.0), c(0.0, 1.0)]) - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn creator_is_antilinear_left() {
        // ⟨z, ξ⟩ with ξ = (2,0), z = (3,0)
        let b = PolySymbol::creator(&[c(2.0, 0.0), c(0.0, 0.0)]);
        assert!((b.evaluate(&[c(3.0, 0.0), c(0.0, 0.0)]) - c(6.0, 0.0)).norm() < 1e-15);
        let z = [c(0.0, 3.0), c(0.0, 0.0)];
        assert!((b.evaluate(&z) - c(0.0, -6.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_tensor() {
        let m = DMatrix::<C64>::identity(3, 3);
        let b = PolySymbol::from_tensor(2, 2, 2, &m).unwrap();
        assert!((b.evaluate(&[c(1.0, 0.0), c(0.0, 0.0)]) - c(1.0, 0.0)).norm() < 1e-15);
        // ⟨z^⊗2, z^⊗2⟩ = |z|⁴
        let z = [c(0.3, 0.1), c(-0.5, 0.7)];
        let r2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
        assert!((b.evaluate(&z) - c(r2 * r2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn derivatives() {
        // z̄ z² : ∂_z → 2 z̄ z ; ∂_z̄ → z²
        let b = PolySymbol::monomial(vec![1], vec![2], c(1.0, 0.0));
        assert_eq!(b.d_z(&[1]).coefficient(&[1], &[1]), c(2.0, 0.0));
        assert_eq!(b.d_zbar(&[1]).coefficient(&[0], &[2]), c(1.0, 0.0));
        assert!(b.d_z(&[3]).is_zero());
    }
}
