//! Characteristic functions G_ε(ξ) = Tr[ρ W(√2πξ)] e^{−επ²|ξ|²/2}, declared limit functionals and
//! the examples built on them (superpositions, gauge averages, Wick moments, dimensional defect,
//! normal approximation of the Poisson law).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::dynamics::{propagate, ModelSpec};
use crate::error::{Error, Result};
use crate::fock::{coherent_state_with_tol, hermite_state, poisson_tail, FockSpace, FockVector, SparseState};
use crate::ladder::{gauge_apply, weyl_apply};
use crate::operator::{hermitian_eigenvalues, trace_norm_hermitian, DenseOperator};
use crate::quantization::{check_weyl_guard, inner, norm_sqr, weyl_argument, weyl_hermite_series, WEYL_GUARD_TOL};
use crate::stats::count_inversions;
use crate::symbol::PolySymbol;
use crate::wick::{wick_apply_sparse_state, wick_quantize_sparse};
use crate::C64;

/// Points of the periodic trapezoid rule for circle averages.
pub const CIRCLE_POINTS: usize = 256;

/// ρ = Σ_i w_i |v_i⟩⟨v_i| (w_i ≥ 0), or a pure vector.
#[derive(Debug, Clone)]
pub enum DensityState {
    Pure(FockVector),
    Mixture(Vec<(f64, FockVector)>),
}

impl DensityState {
    pub fn components(&self) -> Vec<(f64, &FockVector)> {
        match self {
            DensityState::Pure(v) => vec![(1.0, v)],
            DensityState::Mixture(c) => c.iter().map(|(w, v)| (*w, v)).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.components().iter().map(|(w, v)| w * v.norm_sqr()).sum()
    }

    /// Tr[ρ T] for an operator given by its action.
    pub fn expectation<F: Fn(&FockVector) -> FockVector>(&self, t: F) -> C64 {
        self.components().iter().map(|(w, v)| v.inner(&t(v)) * *w).sum()
    }

    /// Tr[ρ N^δ] for integer δ.
    pub fn number_moment(&self, delta: u32) -> f64 {
        let mut s = 0.0;
        for (w, v) in self.components() {
            let bw = v.block_weights();
            for (n, m) in bw.iter().enumerate() {
                s += w * m * (v.space.epsilon() * n as f64).powi(delta as i32);
            }
        }
        s
    }

    pub fn to_dense(&self) -> DenseOperator {
        let comps = self.components();
        let space = comps[0].1.space.clone();
        let mut m = DMatrix::zeros(space.dim(), space.dim());
        for (w, v) in comps {
            m += &v.coeffs * v.coeffs.adjoint() * C64::new(w, 0.0);
        }
        DenseOperator { space, mat: m }
    }
}

/// G_ε(ξ) for a state on `space`.
pub fn char_function(space: &FockSpace, rho: &DensityState, xi: &[C64]) -> Result<C64> {
    let f = weyl_argument(xi);
    let damp = (-0.5 * space.epsilon() * PI * PI * norm_sqr(xi)).exp();
    let comps = rho.components();
    if let [(_, v)] = comps.as_slice() {
        let img = weyl_apply(space, &f, v)?;
        check_weyl_guard(&img, WEYL_GUARD_TOL)?;
        return Ok(v.inner(&img) * damp);
    }
    // mixtures: the guard applies to the weighted amplitude that reaches the top blocks
    let mut s = C64::default();
    let mut leaked = 0.0;
    let mut total = 0.0;
    let top_from = space.n_max().saturating_sub(2);
    for (w, v) in comps {
        let img = weyl_apply(space, &f, v)?;
        leaked += w * img.mass_above(top_from).sqrt();
        total += w * v.norm();
        s += v.inner(&img) * w;
    }
    if leaked > WEYL_GUARD_TOL.sqrt() * total.max(1e-300) {
        return Err(Error::Guard(format!("Weyl image of the mixture reaches the truncation: amplitude {leaked:.3e}")));
    }
    Ok(s * damp)
}

/// Limit characteristic functionals ξ ↦ ∫ e^{2πiS(ξ,z)} dμ(z).
#[derive(Debug, Clone, PartialEq)]
pub enum LimitChar {
    Dirac(Vec<C64>),
    /// (1/2π)∫ e^{2πiS(ξ,e^{iθ}z)} e^{−imθ} dθ.
    Circle { z: Vec<C64>, m: i32 },
    Mixture(Vec<(C64, LimitChar)>),
    /// ξ ↦ exp(−π² c |⟨direction, ξ⟩|²).
    Gaussian { c: f64, direction: Vec<C64> },
}

impl LimitChar {
    pub fn evaluate(&self, xi: &[C64]) -> C64 {
        match self {
            LimitChar::Dirac(z) => C64::from_polar(1.0, 2.0 * PI * inner(xi, z).re),
            LimitChar::Circle { z, m } => {
                let mut s = C64::default();
                for j in 0..CIRCLE_POINTS {
                    let th = 2.0 * PI * j as f64 / CIRCLE_POINTS as f64;
                    let ph = C64::from_polar(1.0, th);
                    let s_val = (inner(xi, z) * ph).re;
                    s += C64::from_polar(1.0, 2.0 * PI * s_val - *m as f64 * th);
                }
                s / CIRCLE_POINTS as f64
            }
            LimitChar::Mixture(parts) => parts.iter().map(|(w, l)| w * l.evaluate(xi)).sum(),
            LimitChar::Gaussian { c, direction } => C64::new((-PI * PI * c * inner(direction, xi).norm_sqr()).exp(), 0.0),
        }
    }

    /// ∫ b dμ for polynomial b, where a closed form is available.
    pub fn moment(&self, b: &PolySymbol) -> Option<C64> {
        match self {
            LimitChar::Dirac(z) => Some(b.evaluate(z)),
            LimitChar::Circle { z, m } => {
                // b(e^{iθ}z) = Σ e^{i(p−q)θ} b_{p,q}(z): keep p − q = m
                let mut s = C64::default();
                for (p, q) in b.bidegrees() {
                    if p as i64 - q as i64 == *m as i64 {
                        s += b.part(p, q).evaluate(z);
                    }
                }
                Some(s)
            }
            LimitChar::Mixture(parts) => {
                let mut s = C64::default();
                for (w, l) in parts {
                    s += w * l.moment(b)?;
                }
                Some(s)
            }
            LimitChar::Gaussian { .. } => None,
        }
    }
}

/// Per-ε state generator; the second argument scales the truncation headroom.
pub type StateGenerator = Box<dyn Fn(f64, f64) -> Result<(FockSpace, DensityState)> + Send + Sync>;

pub struct StateFamily {
    pub name: String,
    pub generator: StateGenerator,
}

/// n_max for states concentrated near `n_center` quanta, leaving room for W(√2πξ) with |ξ| ≤ xi_max.
pub fn char_n_max(n_center: f64, eps: f64, xi_max: f64, headroom: f64) -> u32 {
    let alpha = PI * xi_max * eps.sqrt();
    let spread = alpha * (2.0 * n_center + 1.0).sqrt() + n_center.sqrt() + 1.0;
    (n_center + headroom * (12.0 * spread + 4.0 * alpha * alpha + 30.0)).ceil() as u32
}

fn k_of(eps: f64) -> u32 {
    (1.0 / eps).round() as u32
}

impl StateFamily {
    pub fn new<F>(name: &str, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<(FockSpace, DensityState)> + Send + Sync + 'static,
    {
        StateFamily { name: name.to_string(), generator: Box::new(f) }
    }

    pub fn instance(&self, eps: f64, headroom: f64) -> Result<(FockSpace, DensityState)> {
        (self.generator)(eps, headroom)
    }

    /// z^{⊗k(ε)} with k(ε) = round(1/ε).
    pub fn hermite(z: Vec<C64>, xi_max: f64) -> Self {
        StateFamily::new("hermite", move |eps, h| {
            let k = k_of(eps);
            let n_max = char_n_max(k as f64, eps, xi_max, h);
            let space = FockSpace::new(z.len(), n_max, eps)?;
            Ok((space.clone(), DensityState::Pure(hermite_state(&space, &z, k)?)))
        })
    }

    pub fn coherent(z: Vec<C64>, xi_max: f64) -> Self {
        StateFamily::new("coherent", move |eps, h| {
            let n_max = char_n_max(norm_sqr(&z) / eps, eps, xi_max, h);
            let space = FockSpace::new(z.len(), n_max, eps)?;
            Ok((space.clone(), DensityState::Pure(coherent_state_with_tol(&space, &z, 1e-10)?)))
        })
    }

    /// U_ε(t)E(z0) under the mean-field Hamiltonian of `model` (its ε and n_max are overridden).
    pub fn evolved_coherent(model: ModelSpec, z0: Vec<C64>, t: f64, xi_max: f64) -> Self {
        StateFamily::new("evolved-coherent", move |eps, h| {
            let n_max = char_n_max(norm_sqr(&z0) / eps, eps, xi_max, h);
            let m = model.with_epsilon(eps, n_max);
            let space = m.space()?;
            let e = coherent_state_with_tol(&space, &z0, 1e-10)?;
            Ok((space.clone(), DensityState::Pure(propagate(&space, &m, &e, t)?)))
        })
    }

    pub fn superposition(kind: Superposition, xi_max: f64) -> Self {
        StateFamily::new("superposition", move |eps, h| {
            let n_center = kind.max_norm_sqr() / eps;
            let n_max = char_n_max(n_center, eps, xi_max, h);
            let space = FockSpace::new(kind.d(), n_max, eps)?;
            Ok((space.clone(), DensityState::Pure(superposition_state(&space, &kind)?)))
        })
    }
}

/// Sup over probes of |G_ε − limit|, per ε.
#[derive(Debug, Clone)]
pub struct CharReport {
    pub family: String,
    pub probes: Vec<Vec<C64>>,
    pub epsilons: Vec<f64>,
    /// measured[e][i] = G_{ε_e}(ξ_i)
    pub measured: Vec<Vec<C64>>,
    pub limits: Vec<C64>,
    pub residuals: Vec<f64>,
    pub inversions: usize,
    pub tol: f64,
    pub pass: bool,
}

impl CharReport {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().unwrap_or(&f64::NAN)
    }

    /// Rows (epsilon, probe_id, g_re, g_im, limit_re, limit_im, abs_err).
    pub fn rows(&self) -> Vec<(f64, usize, f64, f64, f64, f64, f64)> {
        let mut out = Vec::new();
        for (e, eps) in self.epsilons.iter().enumerate() {
            for (i, lim) in self.limits.iter().enumerate() {
                let g = self.measured[e][i];
                out.push((*eps, i, g.re, g.im, lim.re, lim.im, (g - lim).norm()));
            }
        }
        out
    }
}

fn with_headroom<T, F: Fn(f64) -> Result<T>>(f: F) -> Result<T> {
    let mut h = 1.0;
    loop {
        match f(h) {
            Err(Error::Guard(_)) if h < 4.0 => h *= 1.5,
            r => return r,
        }
    }
}

/// Measures G_ε on `probes` along `eps_grid` and compares with `limit`.
pub fn compare_limit(family: &StateFamily, limit: &LimitChar, probes: &[Vec<C64>], eps_grid: &[f64], tol: f64) -> Result<CharReport> {
    let limits: Vec<C64> = probes.iter().map(|xi| limit.evaluate(xi)).collect();
    let mut measured = Vec::new();
    for &eps in eps_grid {
        let row = with_headroom(|h| {
            let (space, rho) = family.instance(eps, h)?;
            probes.iter().map(|xi| char_function(&space, &rho, xi)).collect::<Result<Vec<C64>>>()
        })?;
        measured.push(row);
    }
    let residuals: Vec<f64> = measured
        .iter()
        .map(|row| row.iter().zip(&limits).map(|(g, l)| (g - l).norm()).fold(0.0, f64::max))
        .collect();
    let inversions = count_inversions(&residuals);
    let pass = *residuals.last().unwrap_or(&f64::INFINITY) <= tol && inversions <= 1;
    Ok(CharReport {
        family: family.name.clone(),
        probes: probes.to_vec(),
        epsilons: eps_grid.to_vec(),
        measured,
        limits,
        residuals,
        inversions,
        tol,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Superposition {
    /// L^{−1/2} Σ_ℓ z_ℓ^{⊗k}, k = round(1/ε).
    HermiteSum(Vec<Vec<C64>>),
    /// (E(z) + z^{⊗k})/√2.
    CoherentHermite(Vec<C64>),
    /// (E(z1) + E(z2))/√2.
    CoherentPair(Vec<C64>, Vec<C64>),
}

impl Superposition {
    fn d(&self) -> usize {
        match self {
            Superposition::HermiteSum(zs) => zs[0].len(),
            Superposition::CoherentHermite(z) => z.len(),
            Superposition::CoherentPair(z, _) => z.len(),
        }
    }

    fn max_norm_sqr(&self) -> f64 {
        match self {
            Superposition::HermiteSum(zs) => zs.iter().map(|z| norm_sqr(z)).fold(0.0, f64::max),
            Superposition::CoherentHermite(z) => norm_sqr(z),
            Superposition::CoherentPair(a, b) => norm_sqr(a).max(norm_sqr(b)),
        }
    }

    /// Declared limit: the average of the component limits.
    pub fn limit(&self) -> LimitChar {
        match self {
            Superposition::HermiteSum(zs) => {
                let w = C64::new(1.0 / zs.len() as f64, 0.0);
                LimitChar::Mixture(zs.iter().map(|z| (w, LimitChar::Circle { z: z.clone(), m: 0 })).collect())
            }
            Superposition::CoherentHermite(z) => LimitChar::Mixture(vec![
                (C64::new(0.5, 0.0), LimitChar::Dirac(z.clone())),
                (C64::new(0.5, 0.0), LimitChar::Circle { z: z.clone(), m: 0 }),
            ]),
            Superposition::CoherentPair(a, b) => LimitChar::Mixture(vec![
                (C64::new(0.5, 0.0), LimitChar::Dirac(a.clone())),
                (C64::new(0.5, 0.0), LimitChar::Dirac(b.clone())),
            ]),
        }
    }
}

/// Normalized superposition on `space` at its ε.
pub fn superposition_state(space: &FockSpace, kind: &Superposition) -> Result<FockVector> {
    let eps = space.epsilon();
    let parts = match kind {
        Superposition::HermiteSum(zs) => {
            if zs.is_empty() {
                return Err(Error::InvalidArgument("empty superposition".into()));
            }
            let k = k_of(eps);
            zs.iter().map(|z| hermite_state(space, z, k)).collect::<Result<Vec<_>>>()?
        }
        Superposition::CoherentHermite(z) => {
            vec![coherent_state_with_tol(space, z, 1e-10)?, hermite_state(space, z, k_of(eps))?]
        }
        Superposition::CoherentPair(a, b) => {
            vec![coherent_state_with_tol(space, a, 1e-10)?, coherent_state_with_tol(space, b, 1e-10)?]
        }
    };
    let scale: f64 = parts.iter().map(|p| p.norm()).sum();
    let v = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| acc.add(p));
    if v.norm() <= 1e-12 * scale {
        return Err(Error::InvalidArgument("superposition cancels".into()));
    }
    Ok(v.normalized())
}

/// ⟨φ, W(√2πξ) ψ⟩ e^{−επ²|ξ|²/2}: the cross term of a superposition.
pub fn cross_char(space: &FockSpace, phi: &FockVector, psi: &FockVector, xi: &[C64]) -> Result<C64> {
    let img = weyl_apply(space, &weyl_argument(xi), psi)?;
    check_weyl_guard(&img, WEYL_GUARD_TOL)?;
    Ok(phi.inner(&img) * (-0.5 * space.epsilon() * PI * PI * norm_sqr(xi)).exp())
}

/// Number-preserving unitary given by its action.
pub type UnitaryHook<'a> = &'a dyn Fn(&FockVector) -> Result<FockVector>;

#[derive(Debug, Clone)]
pub struct GaugeAverage {
    /// Σ_n √ε φ(√ε(n − 1/ε)) |U z^{⊗n}⟩⟨U z^{⊗n}|.
    pub rho_phi: DensityState,
    /// Poisson mixture Σ_n e^{−|z|²/ε}(|z|²/ε)^n/n! |U z^{⊗n}⟩⟨U z^{⊗n}|.
    pub sigma: DensityState,
    /// Trace norm of σ(θ-trapezoid) − σ(Poisson mixture).
    pub sigma_gap: f64,
}

/// Rejects U unless it maps each sampled number block into itself.
pub fn check_number_preserving(space: &FockSpace, u: UnitaryHook, z: &[C64]) -> Result<()> {
    let top = space.n_max();
    for n in [0, 1, top / 2, top] {
        let v = hermite_state(space, z, n)?;
        let w = u(&v)?;
        let inside = w.block_weights()[n as usize];
        if (w.norm_sqr() - inside) > 1e-10 * w.norm_sqr().max(1e-300) {
            return Err(Error::InvalidArgument(format!("U does not commute with N (block {n})")));
        }
    }
    Ok(())
}

/// ρ^ε_φ and the two constructions of σ^ε; `phi` is a probability density on R.
pub fn gauge_average(space: &FockSpace, u: UnitaryHook, z: &[C64], phi: &dyn Fn(f64) -> f64) -> Result<GaugeAverage> {
    check_number_preserving(space, u, z)?;
    let eps = space.epsilon();
    let lambda = norm_sqr(z) / eps;
    let tail = poisson_tail(lambda, space.n_max());
    if tail > 1e-10 {
        return Err(Error::TruncationInsufficient(format!("Poisson tail {tail:.3e} at n_max {}", space.n_max())));
    }
    let mut rho = Vec::new();
    let mut sigma = Vec::new();
    let se = eps.sqrt();
    for n in 0..=space.n_max() {
        let v = u(&hermite_state(space, z, n)?)?;
        let wphi = se * phi(se * (n as f64 - 1.0 / eps));
        if wphi > 0.0 {
            rho.push((wphi, v.clone()));
        }
        let ln_w = -lambda + n as f64 * lambda.ln() - crate::combinatorics::ln_factorial(n);
        let wp = if lambda == 0.0 { if n == 0 { 1.0 } else { 0.0 } } else { ln_w.exp() };
        if wp > 0.0 {
            sigma.push((wp, v));
        }
    }
    let sigma = DensityState::Mixture(sigma);
    // θ-trapezoid of Γ(e^{iθ}) U|E(z)⟩⟨E(z)|U* Γ(e^{−iθ})
    let ue = u(&coherent_state_with_tol(space, z, 1e-10)?)?;
    let mut trap = DMatrix::zeros(space.dim(), space.dim());
    for j in 0..CIRCLE_POINTS {
        let th = 2.0 * PI * j as f64 / CIRCLE_POINTS as f64;
        let g = gauge_apply(&ue, th);
        trap += &g.coeffs * g.coeffs.adjoint();
    }
    trap /= C64::new(CIRCLE_POINTS as f64, 0.0);
    let sigma_gap = trace_norm_hermitian(&(trap - sigma.to_dense().mat));
    Ok(GaugeAverage { rho_phi: DensityState::Mixture(rho), sigma, sigma_gap })
}

#[derive(Debug, Clone)]
pub struct WickMomentReport {
    pub epsilons: Vec<f64>,
    pub values: Vec<C64>,
    pub target: C64,
    pub residuals: Vec<f64>,
    pub inversions: usize,
    /// Tr[N^δ ρ] per ε, δ = 1, 2.
    pub number_moments: Vec<(f64, f64)>,
    /// max |Tr[ρ W(√2πξ)] (direct) − Tr[ρ W(√2πξ)] (Hermite series)| over the supplied probes.
    pub hermite_series_gap: f64,
}

/// Tr[ρ^ε b^Wick] along the grid against ∫ b dμ; also cross-checks the Hermite series of W.
pub fn wick_moment_test(
    family: &StateFamily,
    b: &PolySymbol,
    limit: &LimitChar,
    eps_grid: &[f64],
    series_probes: &[Vec<C64>],
    series_terms: u32,
) -> Result<WickMomentReport> {
    let target = limit
        .moment(b)
        .ok_or_else(|| Error::InvalidArgument("no closed-form moment for this limit".into()))?;
    let mut values = Vec::new();
    let mut number_moments = Vec::new();
    let mut gap: f64 = 0.0;
    for (e, &eps) in eps_grid.iter().enumerate() {
        let (space, rho) = family.instance(eps, 1.0)?;
        let bw = wick_quantize_sparse(&space, b)?;
        values.push(rho.expectation(|v| bw.apply(v)));
        number_moments.push((rho.number_moment(1), rho.number_moment(2)));
        if e == 0 {
            for xi in series_probes {
                let direct = char_function(&space, &rho, xi)? / (-0.5 * eps * PI * PI * norm_sqr(xi)).exp();
                let series = weyl_hermite_series(&space, &weyl_argument(xi), series_terms)?;
                let via = rho.expectation(|v| series.apply(v));
                gap = gap.max((direct - via).norm());
            }
        }
    }
    let residuals: Vec<f64> = values.iter().map(|v| (v - target).norm()).collect();
    let inversions = count_inversions(&residuals);
    Ok(WickMomentReport { epsilons: eps_grid.to_vec(), values, target, residuals, inversions, number_moments, hermite_series_gap: gap })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectRow {
    pub d: usize,
    pub epsilon: f64,
    pub wick_moment: C64,
    pub number: f64,
    pub tail: f64,
}

/// E(e_d) on C^d with b acting on the first coordinate only (b is given on C^1).
pub fn dimensional_defect(dims: &[usize], eps: f64, b: &PolySymbol, tail_tol: f64) -> Result<Vec<DefectRow>> {
    if b.d() != 1 {
        return Err(Error::InvalidArgument("observable must be given on the first coordinate (d = 1)".into()));
    }
    let mut n_max = (1.0 / eps).ceil() as u32;
    while poisson_tail(1.0 / eps, n_max) > tail_tol {
        n_max += (n_max / 4).max(4);
    }
    let mut rows = Vec::new();
    for &d in dims {
        if d < 2 {
            return Err(Error::InvalidArgument("need d ≥ 2".into()));
        }
        let bd = embed_first(b, d);
        let mut z = vec![C64::default(); d];
        z[d - 1] = C64::new(1.0, 0.0);
        let e = SparseState::coherent(d, n_max, eps, &z, tail_tol)?;
        let be = wick_apply_sparse_state(&bd, &e);
        rows.push(DefectRow { d, epsilon: eps, wick_moment: e.inner(&be), number: e.number_expectation(), tail: e.tail_mass });
    }
    Ok(rows)
}

fn embed_first(b: &PolySymbol, d: usize) -> PolySymbol {
    let mut out = PolySymbol::zero(d);
    for ((beta, gamma), c) in b.terms() {
        let mut bb = vec![0; d];
        let mut gg = vec![0; d];
        bb[0] = beta[0];
        gg[0] = gamma[0];
        out.add_term(bb, gg, *c);
    }
    out
}

/// (Σ_n λ^n e^{−λ} a_n(λ)/n!, ∫ a_{⌊√λ s + λ⌋}(λ) e^{−s²/2}/√(2π) ds); a_n = 0 for n < 0.
pub fn normal_approx(a: &dyn Fn(i64, f64) -> C64, lambda: f64) -> Result<(C64, C64)> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let mut lhs = C64::default();
    let ln_l = lambda.ln();
    let mut n: u32 = 0;
    loop {
        let ln_p = -lambda + n as f64 * ln_l - crate::combinatorics::ln_factorial(n);
        lhs += a(n as i64, lambda) * ln_p.exp();
        if n as f64 > lambda && poisson_tail(lambda, n) < 1e-14 {
            break;
        }
        n += 1;
    }
    let sl = lambda.sqrt();
    let h_max = 0.01f64.min(0.5 / sl);
    let cells = (24.0 / h_max).ceil() as usize;
    let h = 24.0 / cells as f64;
    let norm = 1.0 / (2.0 * PI).sqrt();
    let mut rhs = C64::default();
    for i in 0..cells {
        let s = -12.0 + (i as f64 + 0.5) * h;
        let idx = (sl * s + lambda).floor() as i64;
        if idx >= 0 {
            rhs += a(idx, lambda) * (norm * (-0.5 * s * s).exp() * h);
        }
    }
    Ok((lhs, rhs))
}

/// Smallest eigenvalue of [Tr ρ W(f_j)* W(f_i)]_{ij}, f = √2πξ, assembled from G_ε values.
pub fn positive_type_min_eig(space: &FockSpace, rho: &DensityState, probes: &[Vec<C64>]) -> Result<f64> {
    let eps = space.epsilon();
    let m = probes.len();
    let mut mat = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let diff: Vec<C64> = probes[i].iter().zip(&probes[j]).map(|(a, b)| a - b).collect();
            let g = char_function(space, rho, &diff)? * (0.5 * eps * PI * PI * norm_sqr(&diff)).exp();
            // W(−f_j)W(f_i) = e^{iε Im⟨f_j,f_i⟩/2} W(f_i − f_j)
            let fi = weyl_argument(&probes[i]);
            let fj = weyl_argument(&probes[j]);
            mat[(i, j)] = g * C64::from_polar(1.0, 0.5 * eps * inner(&fj, &fi).im);
        }
    }
    let herm = (&mat + mat.adjoint()) * C64::new(0.5, 0.0);
    Ok(hermitian_eigenvalues(&herm).into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn circle_is_real_for_m_zero() {
        let l = LimitChar::Circle { z: vec![c(0.6, 0.8)], m: 0 };
        let v = l.evaluate(&[c(0.3, -0.1)]);
        assert!(v.im.abs() < 1e-14);
        assert!(v.re.abs() <= 1.0);
    }

    #[test]
    fn normal_approx_constant_rule() {
        let (l, r) = normal_approx(&|_, _| c(1.0, 0.0), 50.0).unwrap();
        assert!((l.re - 1.0).abs() < 1e-12);
        assert!((r.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_char_is_gaussian() {
        let s = FockSpace::new(1, 30, 0.5).unwrap();
        let om = DensityState::Pure(FockVector::basis_vector(&s, &[0]).unwrap());
        let xi = [c(0.2, 0.1)];
        let g = char_function(&s, &om, &xi).unwrap();
        let expected = (-0.5 * PI * PI * norm_sqr(&xi)).exp();
        assert!((g - expected).norm() < 1e-12);
    }
}
