//! Ladder, field, Weyl and second-quantized operators.

use nalgebra::{DMatrix, DVector};

use crate::combinatorics::{self, MultiIndex};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector};
use crate::operator::{expm_hermitian, BlockOperator, DenseOperator, SparseOperator};
use crate::C64;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Builds a block operator of fixed offset from its action on basis vectors.
pub fn block_from_fn<F>(space: &FockSpace, offset: i64, f: F) -> BlockOperator
where
    F: Fn(&[u32]) -> Vec<(MultiIndex, C64)>,
{
    let mut op = BlockOperator::zeros(space, offset);
    for n in 0..=space.n_max() {
        let Some(t) = op.target_block(n) else { continue };
        let t_off = space.block_offset(t);
        for (c, alpha) in space.block_basis(n).iter().enumerate() {
            for (beta, v) in f(alpha) {
                debug_assert_eq!(combinatorics::degree(&beta), t);
                let r = space.index_of(&beta).expect("target inside truncation") - t_off;
                op.blocks[n as usize][(r, c)] += v;
            }
        }
    }
    op
}

/// a_j as a sparse matrix.
pub fn annihilation_j(space: &FockSpace, j: usize) -> SparseOperator {
    let eps = space.epsilon();
    let mut t = Vec::new();
    for (c, alpha) in space.basis().iter().enumerate() {
        if alpha[j] > 0 {
            let mut beta = alpha.clone();
            beta[j] -= 1;
            let r = space.index_of(&beta).unwrap();
            t.push((r, c, C64::new((eps * alpha[j] as f64).sqrt(), 0.0)));
        }
    }
    SparseOperator::from_triplets(space, &t)
}

/// a(f) = Σ f̄_j a_j as a sparse matrix.
pub fn annihilation_sparse(space: &FockSpace, f: &[C64]) -> Result<SparseOperator> {
    space.check_dim(f)?;
    let eps = space.epsilon();
    let mut t = Vec::new();
    for (c, alpha) in space.basis().iter().enumerate() {
        for j in 0..space.d() {
            if alpha[j] > 0 && f[j] != C64::default() {
                let mut beta = alpha.clone();
                beta[j] -= 1;
                let r = space.index_of(&beta).unwrap();
                t.push((r, c, f[j].conj() * (eps * alpha[j] as f64).sqrt()));
            }
        }
    }
    Ok(SparseOperator::from_triplets(space, &t))
}

/// Φ(f) = (a*(f) + a(f))/√2 as a sparse matrix; creation out of block n_max is dropped.
pub fn field_sparse(space: &FockSpace, f: &[C64]) -> Result<SparseOperator> {
    let a = annihilation_sparse(space, f)?;
    let ad = a.adjoint();
    let s = C64::new(1.0 / SQRT_2, 0.0);
    Ok(SparseOperator::linear_combination(space, &[(s, &a), (s, &ad)]))
}

pub struct Ladder {
    pub a: BlockOperator,
    pub a_dag: BlockOperator,
    pub phi: DenseOperator,
    pub pi: DenseOperator,
}

/// a(f), a*(f), Φ(f) and Π(f) = Φ(if).
pub fn ladder_operators(space: &FockSpace, f: &[C64]) -> Result<Ladder> {
    space.check_dim(f)?;
    let eps = space.epsilon();
    let a = block_from_fn(space, -1, |alpha| {
        (0..alpha.len())
            .filter(|&j| alpha[j] > 0)
            .map(|j| {
                let mut b = alpha.to_vec();
                b[j] -= 1;
                (b, f[j].conj() * (eps * alpha[j] as f64).sqrt())
            })
            .collect()
    });
    let a_dag = a.adjoint();
    let phi = field_sparse(space, f)?.to_dense();
    let i_f: Vec<C64> = f.iter().map(|c| c * C64::i()).collect();
    let pi = field_sparse(space, &i_f)?.to_dense();
    Ok(Ladder { a, a_dag, phi, pi })
}

/// W(f) = exp(iΦ(f)) of the truncated generator.
pub fn weyl_operator(space: &FockSpace, f: &[C64]) -> Result<DenseOperator> {
    let phi = field_sparse(space, f)?.to_dense();
    Ok(DenseOperator { space: space.clone(), mat: expm_hermitian(&phi.mat, -1.0)? })
}

/// W(f)ψ without materializing W.
pub fn weyl_apply(space: &FockSpace, f: &[C64], v: &FockVector) -> Result<FockVector> {
    if f.iter().all(|c| *c == C64::default()) {
        return Ok(FockVector { space: space.clone(), coeffs: v.coeffs.clone(), tail_mass: 0.0 });
    }
    let phi = field_sparse(space, f)?;
    Ok(FockVector {
        space: space.clone(),
        coeffs: phi.expm_apply(C64::i(), &v.coeffs),
        tail_mass: 0.0,
    })
}

pub fn number_operator(space: &FockSpace) -> BlockOperator {
    let eps = space.epsilon();
    let blocks = (0..=space.n_max())
        .map(|n| DMatrix::identity(space.block_size(n), space.block_size(n)) * C64::new(eps * n as f64, 0.0))
        .collect();
    BlockOperator { space: space.clone(), offset: 0, blocks }
}

/// dΓ(A) = Σ_{jk} A_{jk} a_j* a_k; A must be Hermitian.
pub fn d_gamma(space: &FockSpace, a: &DMatrix<C64>) -> Result<BlockOperator> {
    let d = space.d();
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: a.nrows() });
    }
    let herm = crate::operator::max_abs(&(a - a.adjoint()));
    if herm > 1e-12 * crate::operator::max_abs(a).max(1.0) {
        return Err(Error::NotHermitian("dΓ needs a Hermitian one-particle operator".into()));
    }
    Ok(d_gamma_unchecked(space, a))
}

pub(crate) fn d_gamma_unchecked(space: &FockSpace, a: &DMatrix<C64>) -> BlockOperator {
    let eps = space.epsilon();
    let d = space.d();
    block_from_fn(space, 0, |alpha| {
        let mut out = Vec::new();
        for k in 0..d {
            if alpha[k] == 0 {
                continue;
            }
            for j in 0..d {
                let v = a[(j, k)];
                if v == C64::default() {
                    continue;
                }
                let mut beta = alpha.to_vec();
                beta[k] -= 1;
                let s1 = (alpha[k] as f64).sqrt();
                let s2 = ((beta[j] + 1) as f64).sqrt();
                beta[j] += 1;
                out.push((beta, v * eps * s1 * s2));
            }
        }
        out
    })
}

/// Γ(S): S^{⊗n} on each block, for an arbitrary d×d matrix S.
pub fn gamma(space: &FockSpace, s: &DMatrix<C64>) -> Result<BlockOperator> {
    let d = space.d();
    if s.nrows() != d || s.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: s.nrows() });
    }
    Ok(block_from_fn(space, 0, |alpha| {
        // Γ(S)|α⟩ = (α!)^{-1/2} Π_j (Σ_k S_kj x_k)^{α_j} with x^β ↦ √β! |β⟩
        let mut poly: std::collections::BTreeMap<MultiIndex, C64> = Default::default();
        poly.insert(vec![0; d], C64::new(1.0, 0.0));
        for j in 0..d {
            for _ in 0..alpha[j] {
                let mut next: std::collections::BTreeMap<MultiIndex, C64> = Default::default();
                for (m, c) in &poly {
                    for k in 0..d {
                        let skj = s[(k, j)];
                        if skj == C64::default() {
                            continue;
                        }
                        let mut m2 = m.clone();
                        m2[k] += 1;
                        *next.entry(m2).or_default() += c * skj;
                    }
                }
                poly = next;
            }
        }
        let la = combinatorics::multi_factorial(alpha).sqrt();
        poly.into_iter()
            .map(|(beta, c)| {
                let lb = combinatorics::multi_factorial(&beta).sqrt();
                (beta, c * lb / la)
            })
            .collect()
    }))
}

/// Γ(e^{iθ}) = e^{iθn} on block n.
pub fn gauge_rotation(space: &FockSpace, theta: f64) -> BlockOperator {
    let blocks = (0..=space.n_max())
        .map(|n| {
            DMatrix::identity(space.block_size(n), space.block_size(n)) * C64::from_polar(1.0, theta * n as f64)
        })
        .collect();
    BlockOperator { space: space.clone(), offset: 0, blocks }
}

/// Applies e^{iθn} blockwise to a vector.
pub fn gauge_apply(v: &FockVector, theta: f64) -> FockVector {
    let mut out = v.clone();
    for n in 0..=v.space.n_max() {
        let ph = C64::from_polar(1.0, theta * n as f64);
        let r = v.space.block_range(n);
        for i in r {
            out.coeffs[i] *= ph;
        }
    }
    out
}

/// Vector of per-basis-element number eigenvalues εn.
pub fn number_diagonal(space: &FockSpace) -> DVector<f64> {
    DVector::from_iterator(
        space.dim(),
        (0..space.dim()).map(|i| space.epsilon() * space.block_of(i) as f64),
    )
}
