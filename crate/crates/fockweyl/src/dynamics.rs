//! Mean-field model H_ε = dΓ(A) + Q^Wick: exact propagation, Hartree flow and the Hepp approximation.

use nalgebra::{DMatrix, DVector};

use crate::combinatorics;
use crate::error::{Error, Result};
use crate::fock::{coherent_state, FockSpace, FockVector};
use crate::ladder::{d_gamma, weyl_apply};
use crate::operator::{spectral_norm, BlockOperator};
use crate::symbol::PolySymbol;
use crate::wick::{self, substitute, Substitution};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Hermitian one-particle matrix.
    pub a: DMatrix<C64>,
    /// Q̃ on ∨²C^d in the normalized occupation basis (block 2 ordering).
    pub q_tensor: DMatrix<C64>,
    pub epsilon: f64,
    pub n_max: u32,
    /// Stand-in for the potential sup-norm in regime conditions.
    pub v_norm: f64,
}

impl ModelSpec {
    /// V_norm defaults to ‖2Q̃‖.
    pub fn new(a: DMatrix<C64>, q_tensor: DMatrix<C64>, epsilon: f64, n_max: u32) -> Result<Self> {
        let v_norm = 2.0 * spectral_norm(&q_tensor);
        let m = ModelSpec { a, q_tensor, epsilon, n_max, v_norm };
        m.validate()?;
        Ok(m)
    }

    /// d = 1 model with A = a and Q(z) = q0|z|⁴.
    pub fn scalar(a: f64, q0: f64, epsilon: f64, n_max: u32) -> Self {
        let a = DMatrix::from_element(1, 1, C64::new(a, 0.0));
        let q = DMatrix::from_element(1, 1, C64::new(q0, 0.0));
        ModelSpec::new(a, q, epsilon, n_max).expect("scalar model is valid")
    }

    pub fn d(&self) -> usize {
        self.a.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.a.nrows();
        if self.a.ncols() != d {
            return Err(Error::InvalidArgument("A must be square".into()));
        }
        let s2 = combinatorics::block_size(d, 2) as usize;
        if self.q_tensor.nrows() != s2 || self.q_tensor.ncols() != s2 {
            return Err(Error::DimensionMismatch { expected: s2, got: self.q_tensor.nrows() });
        }
        let tol = 1e-12 * (1.0 + crate::operator::max_abs(&self.q_tensor));
        if crate::operator::max_abs(&(&self.q_tensor - self.q_tensor.adjoint())) > tol {
            return Err(Error::NotHermitian("Q̃ must be self-adjoint on ∨²".into()));
        }
        if crate::operator::max_abs(&(&self.a - self.a.adjoint())) > 1e-12 * (1.0 + crate::operator::max_abs(&self.a)) {
            return Err(Error::NotHermitian("A must be Hermitian".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64, n_max: u32) -> Self {
        ModelSpec { epsilon, n_max, ..self.clone() }
    }

    pub fn space(&self) -> Result<FockSpace> {
        FockSpace::new(self.d(), self.n_max, self.epsilon)
    }

    /// Q(z) = ⟨z^{⊗2}, Q̃ z^{⊗2}⟩.
    pub fn q_symbol(&self) -> PolySymbol {
        PolySymbol::from_tensor(self.d(), 2, 2, &self.q_tensor).expect("validated shape")
    }

    /// h(z) = ⟨z, Az⟩ + Q(z).
    pub fn energy_symbol(&self) -> PolySymbol {
        PolySymbol::quadratic_form(&self.a).add(&self.q_symbol())
    }

    /// e^{−isA}.
    pub fn free_flow(&self, s: f64) -> DMatrix<C64> {
        crate::operator::expm_hermitian(&self.a, s).expect("A is Hermitian")
    }

    /// Q_s(z) = Q(e^{−isA} z).
    pub fn q_at(&self, s: f64) -> PolySymbol {
        substitute(&self.q_symbol(), &Substitution::Linear(self.free_flow(s)))
    }
}

/// dΓ(A) + Q^Wick.
pub fn hamiltonian(space: &FockSpace, model: &ModelSpec) -> Result<BlockOperator> {
    if space.n_max() < 2 {
        return Err(Error::Guard("the quartic term needs n_max ≥ 2".into()));
    }
    let h = d_gamma(space, &model.a)?.add(&wick::wick_quantize(space, &model.q_symbol())?)?;
    for b in &h.blocks {
        let dev = crate::operator::max_abs(&(b - b.adjoint()));
        if dev > 1e-10 * (1.0 + crate::operator::max_abs(b)) {
            return Err(Error::NotHermitian(format!("Hamiltonian block deviates by {dev:.3e}")));
        }
    }
    Ok(h)
}

/// Blockwise spectral decomposition of a number-conserving Hermitian operator.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub space: FockSpace,
    blocks: Vec<(DMatrix<C64>, DVector<f64>)>,
}

impl Propagator {
    pub fn new(h: &BlockOperator) -> Result<Self> {
        if h.offset != 0 {
            return Err(Error::InvalidArgument("propagator needs a number-conserving generator".into()));
        }
        let blocks = h
            .blocks
            .iter()
            .map(|b| {
                let sym = (b + b.adjoint()) * C64::new(0.5, 0.0);
                let e = sym.symmetric_eigen();
                (e.eigenvectors, e.eigenvalues)
            })
            .collect();
        Ok(Propagator { space: h.space.clone(), blocks })
    }

    pub fn for_model(space: &FockSpace, model: &ModelSpec) -> Result<Self> {
        Self::new(&hamiltonian(space, model)?)
    }

    /// e^{−i t H/ε} ψ.
    pub fn apply(&self, v: &FockVector, t: f64) -> FockVector {
        let eps = self.space.epsilon();
        let mut out = v.clone();
        for (n, (vecs, vals)) in self.blocks.iter().enumerate() {
            let r = self.space.block_range(n as u32);
            let src = v.coeffs.rows(r.start, r.len());
            let mut c = vecs.adjoint() * src;
            for (i, x) in c.iter_mut().enumerate() {
                *x *= C64::from_polar(1.0, -t * vals[i] / eps);
            }
            out.coeffs.rows_mut(r.start, r.len()).copy_from(&(vecs * c));
        }
        out
    }
}

/// U_ε(t)ψ = e^{−itH_ε/ε}ψ.
pub fn propagate(space: &FockSpace, model: &ModelSpec, psi: &FockVector, t: f64) -> Result<FockVector> {
    Ok(Propagator::for_model(space, model)?.apply(psi, t))
}

#[derive(Debug, Clone)]
pub struct HartreeTrajectory {
    pub times: Vec<f64>,
    pub z: Vec<Vec<C64>>,
    /// z at the midpoint of each step.
    pub midpoints: Vec<Vec<C64>>,
    /// ω(t) = ∫_0^t Q(z_s) ds.
    pub omega: Vec<f64>,
    pub norm_drift: f64,
    pub energy_drift: f64,
    /// Distance between the step-h and step-h/2 endpoints.
    pub richardson_gap: f64,
}

impl HartreeTrajectory {
    pub fn final_z(&self) -> &[C64] {
        self.z.last().expect("nonempty trajectory")
    }

    pub fn final_omega(&self) -> f64 {
        *self.omega.last().expect("nonempty trajectory")
    }
}

struct HartreeField {
    a: DMatrix<C64>,
    grad: Vec<PolySymbol>,
}

impl HartreeField {
    fn new(model: &ModelSpec) -> Self {
        let q = model.q_symbol();
        let d = model.d();
        let grad = (0..d).map(|j| q.d_zbar(&combinatorics::unit(d, j))).collect();
        HartreeField { a: model.a.clone(), grad }
    }

    /// ż = −i(Az + ∂_z̄Q(z)).
    fn rhs(&self, z: &DVector<C64>) -> DVector<C64> {
        let zs: Vec<C64> = z.iter().copied().collect();
        let g = DVector::from_iterator(zs.len(), self.grad.iter().map(|p| p.evaluate(&zs)));
        (&self.a * z + g) * C64::new(0.0, -1.0)
    }

    fn rk4(&self, z: &DVector<C64>, h: f64) -> DVector<C64> {
        let k1 = self.rhs(z);
        let k2 = self.rhs(&(z + &k1 * C64::new(h / 2.0, 0.0)));
        let k3 = self.rhs(&(z + &k2 * C64::new(h / 2.0, 0.0)));
        let k4 = self.rhs(&(z + &k3 * C64::new(h, 0.0)));
        z + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
    }
}

/// ∂_z̄Q(z), componentwise.
pub fn hartree_gradient(model: &ModelSpec, z: &[C64]) -> Vec<C64> {
    let f = HartreeField::new(model);
    f.grad.iter().map(|p| p.evaluate(z)).collect()
}

/// Integrates i ż = Az + ∂_z̄Q(z) by RK4 with step h = T/⌈T/dt⌉, verified against step h/2.
pub fn hartree_flow(model: &ModelSpec, z0: &[C64], t_end: f64, dt: f64) -> Result<HartreeTrajectory> {
    hartree_flow_with_tol(model, z0, t_end, dt, 1e-7)
}

pub fn hartree_flow_with_tol(model: &ModelSpec, z0: &[C64], t_end: f64, dt: f64, tol: f64) -> Result<HartreeTrajectory> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    if z0.len() != model.d() {
        return Err(Error::DimensionMismatch { expected: model.d(), got: z0.len() });
    }
    let field = HartreeField::new(model);
    let q = model.q_symbol();
    let energy = model.energy_symbol();
    let steps = (t_end.abs() / dt).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let start = DVector::from_column_slice(z0);

    let mut coarse = start.clone();
    for _ in 0..steps {
        coarse = field.rk4(&coarse, h);
    }
    let mut fine = vec![start.clone()];
    for i in 0..2 * steps {
        let next = field.rk4(&fine[i], h / 2.0);
        fine.push(next);
    }
    let gap = (&coarse - &fine[2 * steps]).norm();
    if gap > tol {
        return Err(Error::StepTooLarge(format!("step-halving disagreement {gap:.3e} > {tol:.1e}")));
    }
    let to_vec = |v: &DVector<C64>| v.iter().copied().collect::<Vec<C64>>();
    let qv: Vec<f64> = fine.iter().map(|v| q.evaluate(&to_vec(v)).re).collect();
    let mut omega = vec![0.0];
    for k in 0..steps {
        let w = omega[k] + h / 6.0 * (qv[2 * k] + 4.0 * qv[2 * k + 1] + qv[2 * k + 2]);
        omega.push(w);
    }
    let n0 = start.norm();
    let e0 = energy.evaluate(z0).re;
    let mut norm_drift: f64 = 0.0;
    let mut energy_drift: f64 = 0.0;
    for v in &fine {
        norm_drift = norm_drift.max((v.norm() - n0).abs());
        energy_drift = energy_drift.max((energy.evaluate(&to_vec(v)).re - e0).abs() / e0.abs().max(1.0));
    }
    Ok(HartreeTrajectory {
        times: (0..=steps).map(|k| k as f64 * h).collect(),
        z: (0..=steps).map(|k| to_vec(&fine[2 * k])).collect(),
        midpoints: (0..steps).map(|k| to_vec(&fine[2 * k + 1])).collect(),
        omega,
        norm_drift,
        energy_drift,
        richardson_gap: gap,
    })
}

/// Q₂(t, z): the part of Q(z_t + z) of degree two in (z, z̄).
pub fn q2_symbol(model: &ModelSpec, zt: &[C64]) -> PolySymbol {
    substitute(&model.q_symbol(), &Substitution::Translate(zt.to_vec())).total_degree_part(2)
}

#[derive(Debug, Clone)]
pub struct HeppDiagnostics {
    pub z_t: Vec<C64>,
    pub omega: f64,
    /// |‖U₂Ω‖ − 1|.
    pub norm_drift: f64,
    /// Mass of the approximation in the two top blocks.
    pub top_mass: f64,
    pub steps: usize,
}

/// e^{iω(t)/ε} W(√2 z_t/(iε)) U₂(t,0)Ω, with U₂ integrated by Strang splitting
/// (exact free half steps, midpoint-frozen quadratic step).
pub fn hepp_approximation(
    space: &FockSpace,
    model: &ModelSpec,
    z0: &[C64],
    t: f64,
    steps: usize,
) -> Result<(FockVector, HeppDiagnostics)> {
    let eps = space.epsilon();
    // the coherent tail guard: E(z0) must fit
    coherent_state(space, z0)?;
    let traj = hartree_flow(model, z0, t, t.abs() / steps.max(1) as f64)?;
    let h = traj.times[1] - traj.times[0];
    let free = Propagator::new(&d_gamma(space, &model.a)?)?;
    let mut psi = FockVector::basis_vector(space, &vec![0; space.d()])?;
    for zm in &traj.midpoints {
        psi = free.apply(&psi, h / 2.0);
        let q2 = wick::wick_quantize_sparse(space, &q2_symbol(model, zm))?;
        psi.coeffs = q2.expm_apply(C64::new(0.0, -h / eps), &psi.coeffs);
        psi = free.apply(&psi, h / 2.0);
    }
    let norm_drift = (psi.norm() - 1.0).abs();
    if norm_drift > 1e-6 {
        return Err(Error::StepTooLarge(format!("U₂ norm drift {norm_drift:.3e}")));
    }
    let zt = traj.final_z().to_vec();
    let shift: Vec<C64> = zt.iter().map(|c| c * SQRT_2_OVER_I / eps).collect();
    let mut out = weyl_apply(space, &shift, &psi)?;
    let top_mass = out.mass_above(space.n_max().saturating_sub(2));
    if top_mass > HEPP_TOP_MASS_TOL {
        return Err(Error::Guard(format!("Hepp state reaches the truncation (top mass {top_mass:.3e})")));
    }
    let omega = traj.final_omega();
    out = out.scale(C64::from_polar(1.0, omega / eps));
    Ok((out, HeppDiagnostics { z_t: zt, omega, norm_drift, top_mass, steps: traj.midpoints.len() }))
}

/// Top-block mass accepted for the Hepp state; its amplitude error is below 1e-5.
pub const HEPP_TOP_MASS_TOL: f64 = 1e-10;

/// √2/i.
const SQRT_2_OVER_I: C64 = C64::new(0.0, -std::f64::consts::SQRT_2);

/// ‖U_ε(t)E(z0) − hepp_approximation‖.
pub fn hepp_error(space: &FockSpace, model: &ModelSpec, z0: &[C64], t: f64, steps: usize) -> Result<f64> {
    let e = coherent_state(space, z0)?;
    let exact = propagate(space, model, &e, t)?;
    let (approx, _) = hepp_approximation(space, model, z0, t, steps)?;
    Ok((exact.coeffs - approx.coeffs).norm())
}

#[derive(Debug, Clone)]
pub struct CohWickReport {
    pub epsilons: Vec<f64>,
    pub values: Vec<C64>,
    pub target: C64,
    pub residuals: Vec<f64>,
    /// Number of increases in the residual sequence.
    pub inversions: usize,
}

/// ⟨U_ε(t)E(z0), b^Wick U_ε(t)E(z0)⟩ along an ε grid, against b(z_t).
pub fn coherent_wick_limit<F>(
    model: &ModelSpec,
    z0: &[C64],
    b: &PolySymbol,
    t: f64,
    eps_grid: &[f64],
    n_max_rule: F,
) -> Result<CohWickReport>
where
    F: Fn(f64) -> u32,
{
    let traj = hartree_flow(model, z0, t, (t.abs() / 400.0).max(1e-4))?;
    let target = b.evaluate(traj.final_z());
    let mut values = Vec::new();
    for &eps in eps_grid {
        let space = FockSpace::new(model.d(), n_max_rule(eps), eps)?;
        let e = coherent_state(&space, z0)?;
        let psi = propagate(&space, model, &e, t)?;
        let bw = wick::wick_quantize_sparse(&space, b)?;
        values.push(psi.inner(&bw.apply(&psi)));
    }
    let residuals: Vec<f64> = values.iter().map(|v| (v - target).norm()).collect();
    let inversions = crate::stats::count_inversions(&residuals);
    Ok(CohWickReport { epsilons: eps_grid.to_vec(), values, target, residuals, inversions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_hamiltonian_blocks() {
        let m = ModelSpec::scalar(0.7, 0.2, 0.1, 8);
        let s = m.space().unwrap();
        let h = hamiltonian(&s, &m).unwrap();
        for n in 0..=8u32 {
            let nf = n as f64;
            let expected = 0.1 * nf * 0.7 + 0.01 * nf * (nf - 1.0) * 0.2;
            assert!((h.blocks[n as usize][(0, 0)].re - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn scalar_hartree_closed_form() {
        let m = ModelSpec::scalar(0.7, 0.2, 0.1, 8);
        let z0 = [C64::new(0.6, 0.8)];
        let tr = hartree_flow(&m, &z0, 1.0, 0.01).unwrap();
        let exact = z0[0] * C64::from_polar(1.0, -(0.7 + 0.4));
        assert!((tr.final_z()[0] - exact).norm() < 1e-9);
        assert!((tr.final_omega() - 0.2).abs() < 1e-12);
    }
}
