//! Dense, block and sparse operators on a truncated Fock space.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector};
use crate::C64;

#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub space: FockSpace,
    pub mat: DMatrix<C64>,
}

/// Operator mapping block n to block n + offset, one dense matrix per source block.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub space: FockSpace,
    pub offset: i64,
    /// `blocks[n]` has shape (size(n + offset), size(n)); empty when the target block is absent.
    pub blocks: Vec<DMatrix<C64>>,
}

#[derive(Debug, Clone)]
pub struct SparseOperator {
    pub space: FockSpace,
    pub mat: CsrMatrix<C64>,
}

impl DenseOperator {
    pub fn zeros(space: &FockSpace) -> Self {
        DenseOperator { space: space.clone(), mat: DMatrix::zeros(space.dim(), space.dim()) }
    }

    pub fn identity(space: &FockSpace) -> Self {
        DenseOperator { space: space.clone(), mat: DMatrix::identity(space.dim(), space.dim()) }
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator { space: self.space.clone(), mat: self.mat.adjoint() }
    }

    pub fn mul(&self, other: &DenseOperator) -> Self {
        DenseOperator { space: self.space.clone(), mat: &self.mat * &other.mat }
    }

    pub fn add(&self, other: &DenseOperator) -> Self {
        DenseOperator { space: self.space.clone(), mat: &self.mat + &other.mat }
    }

    pub fn sub(&self, other: &DenseOperator) -> Self {
        DenseOperator { space: self.space.clone(), mat: &self.mat - &other.mat }
    }

    pub fn scale(&self, c: C64) -> Self {
        DenseOperator { space: self.space.clone(), mat: &self.mat * c }
    }

    pub fn commutator(&self, other: &DenseOperator) -> Self {
        DenseOperator { space: self.space.clone(), mat: &self.mat * &other.mat - &other.mat * &self.mat }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector { space: self.space.clone(), coeffs: &self.mat * &v.coeffs, tail_mass: 0.0 }
    }

    /// ⟨u, T v⟩.
    pub fn matrix_element(&self, u: &FockVector, v: &FockVector) -> C64 {
        u.coeffs.dotc(&(&self.mat * &v.coeffs))
    }

    /// Columns restricted to blocks ≤ `n_in`, all rows kept.
    pub fn columns_upto(&self, n_in: u32) -> DMatrix<C64> {
        let c = self.space.dim_upto(n_in);
        self.mat.columns(0, c).into_owned()
    }

    /// Compression to blocks ≤ n (rows and columns).
    pub fn compress_upto(&self, n: u32) -> DMatrix<C64> {
        let c = self.space.dim_upto(n);
        self.mat.view((0, 0), (c, c)).into_owned()
    }

    pub fn op_norm(&self) -> f64 {
        spectral_norm(&self.mat)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.mat)
    }
}

impl BlockOperator {
    pub fn zeros(space: &FockSpace, offset: i64) -> Self {
        let blocks = (0..=space.n_max())
            .map(|n| {
                let rows = target_size(space, n, offset);
                DMatrix::zeros(rows, space.block_size(n))
            })
            .collect();
        BlockOperator { space: space.clone(), offset, blocks }
    }

    pub fn target_block(&self, n: u32) -> Option<u32> {
        let t = n as i64 + self.offset;
        (t >= 0 && t <= self.space.n_max() as i64).then_some(t as u32)
    }

    pub fn to_dense(&self) -> DenseOperator {
        let mut out = DenseOperator::zeros(&self.space);
        for n in 0..=self.space.n_max() {
            if let Some(t) = self.target_block(n) {
                let (r0, c0) = (self.space.block_offset(t), self.space.block_offset(n));
                let b = &self.blocks[n as usize];
                out.mat.view_mut((r0, c0), (b.nrows(), b.ncols())).copy_from(b);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = BlockOperator::zeros(&self.space, -self.offset);
        for n in 0..=self.space.n_max() {
            if let Some(t) = self.target_block(n) {
                out.blocks[t as usize] = self.blocks[n as usize].adjoint();
            }
        }
        out
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        let mut out = FockVector::zeros(&self.space);
        for n in 0..=self.space.n_max() {
            if let Some(t) = self.target_block(n) {
                let src = v.coeffs.rows(self.space.block_offset(n), self.space.block_size(n));
                let img = &self.blocks[n as usize] * src;
                let start = self.space.block_offset(t);
                let mut dst = out.coeffs.rows_mut(start, self.space.block_size(t));
                dst += img;
            }
        }
        out
    }

    pub fn mul(&self, other: &BlockOperator) -> BlockOperator {
        let mut out = BlockOperator::zeros(&self.space, self.offset + other.offset);
        for n in 0..=self.space.n_max() {
            if let Some(m) = other.target_block(n) {
                if self.target_block(m).is_some() {
                    out.blocks[n as usize] = &self.blocks[m as usize] * &other.blocks[n as usize];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &BlockOperator) -> Result<BlockOperator> {
        if self.offset != other.offset {
            return Err(Error::InvalidArgument("block offsets differ".into()));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(BlockOperator { space: self.space.clone(), offset: self.offset, blocks })
    }

    pub fn scale(&self, c: C64) -> BlockOperator {
        let blocks = self.blocks.iter().map(|b| b * c).collect();
        BlockOperator { space: self.space.clone(), offset: self.offset, blocks }
    }

    /// Operator norm of the map block k → block k + offset.
    pub fn block_norm(&self, k: u32) -> f64 {
        spectral_norm(&self.blocks[k as usize])
    }

    /// exp(-i t B) for a Hermitian number-conserving operator, blockwise.
    pub fn exp_hermitian(&self, t: f64) -> Result<BlockOperator> {
        if self.offset != 0 {
            return Err(Error::InvalidArgument("exponential needs offset 0".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| expm_hermitian(b, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockOperator { space: self.space.clone(), offset: 0, blocks })
    }
}

fn target_size(space: &FockSpace, n: u32, offset: i64) -> usize {
    let t = n as i64 + offset;
    if t < 0 || t > space.n_max() as i64 {
        0
    } else {
        space.block_size(t as u32)
    }
}

impl SparseOperator {
    pub fn from_triplets(space: &FockSpace, triplets: &[(usize, usize, C64)]) -> Self {
        let n = space.dim();
        let mut coo = CooMatrix::new(n, n);
        for &(r, c, v) in triplets {
            coo.push(r, c, v);
        }
        SparseOperator { space: space.clone(), mat: CsrMatrix::from(&coo) }
    }

    pub fn apply_vec(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.mat.nrows());
        for (i, row) in self.mat.row_iter().enumerate() {
            let mut acc = C64::default();
            for (&j, &a) in row.col_indices().iter().zip(row.values()) {
                acc += a * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector { space: self.space.clone(), coeffs: self.apply_vec(&v.coeffs), tail_mass: 0.0 }
    }

    pub fn to_dense(&self) -> DenseOperator {
        let mut out = DenseOperator::zeros(&self.space);
        for (i, j, v) in self.mat.triplet_iter() {
            out.mat[(i, j)] += *v;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let t: Vec<(usize, usize, C64)> = self.mat.triplet_iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(&self.space, &t)
    }

    pub fn linear_combination(space: &FockSpace, terms: &[(C64, &SparseOperator)]) -> Self {
        let mut t = Vec::new();
        for (c, op) in terms {
            for (i, j, v) in op.mat.triplet_iter() {
                t.push((i, j, c * v));
            }
        }
        Self::from_triplets(space, &t)
    }

    /// Upper bound on the spectral norm, √(‖·‖₁‖·‖_∞).
    pub fn norm_bound(&self) -> f64 {
        let mut row = vec![0.0f64; self.mat.nrows()];
        let mut col = vec![0.0f64; self.mat.ncols()];
        for (i, j, v) in self.mat.triplet_iter() {
            row[i] += v.norm();
            col[j] += v.norm();
        }
        let r = row.into_iter().fold(0.0, f64::max);
        let c = col.into_iter().fold(0.0, f64::max);
        (r * c).sqrt()
    }

    /// exp(s·M) v by substepped Taylor series.
    pub fn expm_apply(&self, s: C64, v: &DVector<C64>) -> DVector<C64> {
        expm_apply_with(|x| self.apply_vec(x), s.norm() * self.norm_bound(), s, v)
    }
}

/// exp(s·M) v where `apply` realizes M and `bound` ≥ |s|·‖M‖.
pub fn expm_apply_with<F>(apply: F, bound: f64, s: C64, v: &DVector<C64>) -> DVector<C64>
where
    F: Fn(&DVector<C64>) -> DVector<C64>,
{
    let steps = (bound / 0.5).ceil().max(1.0) as usize;
    let h = s / steps as f64;
    let mut cur = v.clone();
    let vnorm = v.norm().max(1e-300);
    for _ in 0..steps {
        let mut term = cur.clone();
        let mut acc = cur.clone();
        for k in 1..200 {
            term = apply(&term) * (h / k as f64);
            acc += &term;
            if term.norm() < 1e-18 * vnorm {
                break;
            }
        }
        cur = acc;
    }
    cur
}

/// exp(-i t H) for Hermitian H by eigendecomposition, exactly unitary up to rounding.
pub fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> Result<DMatrix<C64>> {
    let n = h.nrows();
    if n == 0 {
        return Ok(h.clone());
    }
    let herm = max_abs(&(h - h.adjoint()));
    let scale = max_abs(h).max(1.0);
    if herm > 1e-10 * scale {
        return Err(Error::NotHermitian(format!("‖H − H†‖ = {herm:.3e}")));
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -t * l)));
    let mut vd = v.clone();
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(vd * v.adjoint())
}

pub fn hermitian_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}
