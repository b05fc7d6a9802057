//! Wick quantization and the symbolic calculus of Wick operators.

use nalgebra::DMatrix;

use crate::combinatorics::{self, compositions, MultiIndex};
use crate::error::{Error, Result};
use crate::fock::{coherent_state, FockSpace};
use crate::ladder::block_from_fn;
use crate::operator::{BlockOperator, DenseOperator, SparseOperator};
use crate::symbol::{GradedSymbol, PolySymbol};
use crate::C64;

/// c (a*)^β a^γ |α⟩ for one monomial, `None` when it vanishes or leaves the truncation.
fn monomial_action(
    eps: f64,
    n_max: u32,
    beta: &[u32],
    gamma: &[u32],
    alpha: &[u32],
) -> Option<(MultiIndex, f64)> {
    if !combinatorics::componentwise_le(gamma, alpha) {
        return None;
    }
    let mid = combinatorics::sub(alpha, gamma);
    let out = combinatorics::add(&mid, beta);
    if combinatorics::degree(&out) > n_max {
        return None;
    }
    let mut w = 1.0;
    for j in 0..alpha.len() {
        w *= combinatorics::falling(alpha[j], gamma[j]) * combinatorics::falling(out[j], beta[j]);
    }
    let deg = combinatorics::degree(beta) + combinatorics::degree(gamma);
    Some((out, w.sqrt() * eps.powf(deg as f64 / 2.0)))
}

fn check_fits(space: &FockSpace, b: &PolySymbol) -> Result<()> {
    if b.d() != space.d() {
        return Err(Error::DimensionMismatch { expected: space.d(), got: b.d() });
    }
    let (p, q) = b.max_degrees();
    if p > space.n_max() || q > space.n_max() {
        return Err(Error::Guard(format!(
            "symbol degree ({p},{q}) exceeds truncation window n_max = {}",
            space.n_max()
        )));
    }
    Ok(())
}

/// b^Wick for a symbol whose terms share the offset q − p.
pub fn wick_quantize(space: &FockSpace, b: &PolySymbol) -> Result<BlockOperator> {
    check_fits(space, b)?;
    let offsets: Vec<i64> = b.bidegrees().iter().map(|&(p, q)| q as i64 - p as i64).collect();
    let offset = offsets.first().copied().unwrap_or(0);
    if offsets.iter().any(|&o| o != offset) {
        return Err(Error::InvalidArgument(
            "symbol mixes number offsets; use wick_quantize_sparse".into(),
        ));
    }
    let eps = space.epsilon();
    let n_max = space.n_max();
    Ok(block_from_fn(space, offset, |alpha| {
        b.terms()
            .iter()
            .filter_map(|((beta, gamma), c)| {
                monomial_action(eps, n_max, beta, gamma, alpha).map(|(out, w)| (out, c * w))
            })
            .collect()
    }))
}

/// b^Wick for an arbitrary (inhomogeneous) symbol.
pub fn wick_quantize_sparse(space: &FockSpace, b: &PolySymbol) -> Result<SparseOperator> {
    check_fits(space, b)?;
    Ok(wick_quantize_unchecked(space, b))
}

/// Terms whose degrees exceed the window act as zero on the truncated space and are dropped.
pub(crate) fn wick_quantize_unchecked(space: &FockSpace, b: &PolySymbol) -> SparseOperator {
    let eps = space.epsilon();
    let n_max = space.n_max();
    let mut t = Vec::new();
    for (col, alpha) in space.basis().iter().enumerate() {
        for ((beta, gamma), c) in b.terms() {
            if let Some((out, w)) = monomial_action(eps, n_max, beta, gamma, alpha) {
                t.push((space.index_of(&out).unwrap(), col, c * w));
            }
        }
    }
    SparseOperator::from_triplets(space, &t)
}

pub fn wick_quantize_dense(space: &FockSpace, b: &PolySymbol) -> Result<DenseOperator> {
    Ok(wick_quantize_sparse(space, b)?.to_dense())
}

/// Σ_r ε^r (b_r)^Wick.
pub fn wick_quantize_graded(space: &FockSpace, g: &GradedSymbol) -> Result<DenseOperator> {
    wick_quantize_dense(space, &g.at_epsilon(space.epsilon()))
}

/// Wick operator applied to a sparse state on a space without tables.
pub fn wick_apply_sparse_state(b: &PolySymbol, psi: &crate::fock::SparseState) -> crate::fock::SparseState {
    let mut out = crate::fock::SparseState {
        d: psi.d,
        n_max: psi.n_max,
        epsilon: psi.epsilon,
        coeffs: Default::default(),
        tail_mass: 0.0,
    };
    for (alpha, a) in &psi.coeffs {
        for ((beta, gamma), c) in b.terms() {
            if let Some((o, w)) = monomial_action(psi.epsilon, psi.n_max, beta, gamma, alpha) {
                *out.coeffs.entry(o).or_default() += a * c * w;
            }
        }
    }
    out
}

/// ∂_z^k b1 · ∂_z̄^k b2 = k! Σ_{|μ|=k} (1/μ!) ∂_z^μ b1 ∂_z̄^μ b2.
pub fn derivative_pairing(b1: &PolySymbol, b2: &PolySymbol, k: u32) -> PolySymbol {
    let d = b1.d();
    let kf = combinatorics::factorial(k);
    let mut out = PolySymbol::zero(d);
    for mu in compositions(d, k) {
        let l = b1.d_z(&mu);
        if l.is_zero() {
            continue;
        }
        let r = b2.d_zbar(&mu);
        if r.is_zero() {
            continue;
        }
        let w = kf / combinatorics::multi_factorial(&mu);
        out = out.add(&l.mul(&r).scale(C64::new(w, 0.0)));
    }
    out
}

/// Largest k for which the k-th pairing can be nonzero.
fn max_pairing_order(b1: &PolySymbol, b2: &PolySymbol) -> u32 {
    b1.max_degrees().0.min(b2.max_degrees().1)
}

/// b1^Wick b2^Wick = (Σ_k ε^k/k! ∂_z^k b1 · ∂_z̄^k b2)^Wick, graded by the power of ε.
pub fn wick_product(b1: &GradedSymbol, b2: &GradedSymbol) -> GradedSymbol {
    let mut out = GradedSymbol::zero(b1.d);
    for (r1, s1) in &b1.grades {
        for (r2, s2) in &b2.grades {
            for k in 0..=max_pairing_order(s1, s2) {
                let t = derivative_pairing(s1, s2, k).scale(C64::new(1.0 / combinatorics::factorial(k), 0.0));
                out.add_at(r1 + r2 + k, &t);
            }
        }
    }
    out
}

/// {b1, b2}^{(k)} = ∂_z^k b1 · ∂_z̄^k b2 − ∂_z^k b2 · ∂_z̄^k b1.
pub fn poisson_bracket_k(b1: &PolySymbol, b2: &PolySymbol, k: u32) -> PolySymbol {
    derivative_pairing(b1, b2, k).sub(&derivative_pairing(b2, b1, k))
}

/// [b1^Wick, b2^Wick] = (Σ_{k≥1} ε^k/k! {b1,b2}^{(k)})^Wick, graded by the power of ε.
pub fn wick_commutator(b1: &PolySymbol, b2: &PolySymbol) -> GradedSymbol {
    let mut out = GradedSymbol::zero(b1.d());
    let kmax = max_pairing_order(b1, b2).max(max_pairing_order(b2, b1));
    for k in 1..=kmax {
        let t = poisson_bracket_k(b1, b2, k).scale(C64::new(1.0 / combinatorics::factorial(k), 0.0));
        out.add_at(k, &t);
    }
    out
}

#[derive(Debug, Clone)]
pub enum Substitution {
    /// z ↦ z + z0
    Translate(Vec<C64>),
    /// z ↦ B z
    Linear(DMatrix<C64>),
    /// z ↦ B z + B₂ z̄
    RealLinear(DMatrix<C64>, DMatrix<C64>),
}

/// Exact polynomial substitution b ↦ b ∘ T.
pub fn substitute(b: &PolySymbol, mode: &Substitution) -> PolySymbol {
    let d = b.d();
    let zj = |j: usize| PolySymbol::monomial(vec![0; d], combinatorics::unit(d, j), C64::new(1.0, 0.0));
    let zbj = |j: usize| PolySymbol::monomial(combinatorics::unit(d, j), vec![0; d], C64::new(1.0, 0.0));
    let w: Vec<PolySymbol> = (0..d)
        .map(|j| match mode {
            Substitution::Translate(z0) => zj(j).add(&PolySymbol::constant(d, z0[j])),
            Substitution::Linear(m) => {
                (0..d).fold(PolySymbol::zero(d), |acc, k| acc.add(&zj(k).scale(m[(j, k)])))
            }
            Substitution::RealLinear(m, m2) => (0..d).fold(PolySymbol::zero(d), |acc, k| {
                acc.add(&zj(k).scale(m[(j, k)])).add(&zbj(k).scale(m2[(j, k)]))
            }),
        })
        .collect();
    let wb: Vec<PolySymbol> = w.iter().map(|p| p.conj()).collect();
    let mut cache_w: Vec<Vec<PolySymbol>> = w.iter().map(|p| vec![PolySymbol::constant(d, C64::new(1.0, 0.0)), p.clone()]).collect();
    let mut cache_wb: Vec<Vec<PolySymbol>> = wb.iter().map(|p| vec![PolySymbol::constant(d, C64::new(1.0, 0.0)), p.clone()]).collect();
    fn power(cache: &mut [Vec<PolySymbol>], j: usize, e: u32) -> PolySymbol {
        while cache[j].len() <= e as usize {
            let next = cache[j].last().unwrap().mul(&cache[j][1]);
            cache[j].push(next);
        }
        cache[j][e as usize].clone()
    }
    let mut out = PolySymbol::zero(d);
    for ((beta, gamma), c) in b.terms() {
        let mut term = PolySymbol::constant(d, *c);
        for j in 0..d {
            if beta[j] > 0 {
                term = term.mul(&power(&mut cache_wb, j, beta[j]));
            }
            if gamma[j] > 0 {
                term = term.mul(&power(&mut cache_w, j, gamma[j]));
            }
        }
        out = out.add(&term);
    }
    out
}

/// ⟨E(z), T E(z)⟩ for each probe z.
pub fn wick_symbol_of(space: &FockSpace, t: &DenseOperator, probes: &[Vec<C64>]) -> Result<Vec<C64>> {
    probes
        .iter()
        .map(|z| {
            let e = coherent_state(space, z)?;
            Ok(t.matrix_element(&e, &e))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct NumberEstimateReport {
    /// (k, ‖b^Wick‖_{k→j}, bound) for every stored block.
    pub blocks: Vec<(u32, f64, f64)>,
    pub max_ratio: f64,
}

/// Checks ‖b^Wick‖_{L(∨^k, ∨^j)} ≤ (jε)^{q/2}(kε)^{p/2}‖b̃‖ on all blocks.
pub fn number_estimate_check(space: &FockSpace, b: &PolySymbol) -> Result<NumberEstimateReport> {
    let (p, q) = b
        .homogeneity()
        .ok_or_else(|| Error::InvalidArgument("number estimate needs a homogeneous symbol".into()))?;
    let op = wick_quantize(space, b)?;
    let bn = b.tensor_norm()?;
    let eps = space.epsilon();
    let mut blocks = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for k in 0..=space.n_max() {
        let Some(j) = op.target_block(k) else { continue };
        let nrm = op.block_norm(k);
        let bound = if k >= p {
            (j as f64 * eps).powf(q as f64 / 2.0) * (k as f64 * eps).powf(p as f64 / 2.0) * bn
        } else {
            0.0
        };
        let ratio = if bound > 0.0 {
            nrm / bound
        } else if nrm == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        max_ratio = max_ratio.max(ratio);
        blocks.push((k, nrm, bound));
    }
    Ok(NumberEstimateReport { blocks, max_ratio })
}

/// Sum of ε^r (C_r)^Wick restricted to input blocks ≤ `n_in`.
pub fn guarded_columns(op: &DenseOperator, n_in: u32) -> DMatrix<C64> {
    op.columns_upto(n_in)
}
