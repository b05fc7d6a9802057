//! Dyson hierarchy C^{(n)}_r and the truncated expansion of evolved Wick observables on Hermite states.

use crate::combinatorics::{self, ln_factorial};
use crate::dynamics::{hartree_flow, ModelSpec, Propagator};
use crate::error::{Error, Result};
use crate::fock::{hermite_state, FockSpace};
use crate::special::gauss_legendre;
use crate::symbol::PolySymbol;
use crate::wick::{self, poisson_bracket_k, substitute, Substitution};
use crate::C64;

#[derive(Debug, Clone)]
pub struct DysonSymbol {
    /// (t_n, …, t_1, t)
    pub times: Vec<f64>,
    pub n: u32,
    pub r: u32,
    pub value: PolySymbol,
}

/// b_t(z) = b(e^{−itA} z).
pub fn free_evolved(model: &ModelSpec, b: &PolySymbol, t: f64) -> PolySymbol {
    substitute(b, &Substitution::Linear(model.free_flow(t)))
}

/// One step of C^{(n)}_r = {Q_s, C^{(n−1)}_r} + ½{Q_s, C^{(n−1)}_{r−1}}^{(2)}; `prev[r]` holds C^{(n−1)}_r.
pub fn dyson_step(q_s: &PolySymbol, prev: &[PolySymbol]) -> Vec<PolySymbol> {
    let n = prev.len();
    (0..=n)
        .map(|r| {
            let mut c = PolySymbol::zero(q_s.d());
            if r < n {
                c = c.add(&poisson_bracket_k(q_s, &prev[r], 1));
            }
            if r >= 1 {
                c = c.add(&poisson_bracket_k(q_s, &prev[r - 1], 2).scale(C64::new(0.5, 0.0)));
            }
            c
        })
        .collect()
}

/// All C^{(l)}_r for l ≤ n at times `t_seq` = (t_1, …, t_n).
pub fn dyson_hierarchy(model: &ModelSpec, b: &PolySymbol, t_seq: &[f64], t: f64) -> Vec<Vec<PolySymbol>> {
    let mut levels = vec![vec![free_evolved(model, b, t)]];
    for &s in t_seq {
        let next = dyson_step(&model.q_at(s), levels.last().unwrap());
        levels.push(next);
    }
    levels
}

/// C^{(n)}_r(t_n, …, t_1, t) with `times` = (t_n, …, t_1).
pub fn dyson_symbol(model: &ModelSpec, b: &PolySymbol, times: &[f64], t: f64, r: u32) -> Result<DysonSymbol> {
    let n = times.len() as u32;
    if r > n {
        return Err(Error::InvalidArgument(format!("r = {r} exceeds n = {n}")));
    }
    let t_seq: Vec<f64> = times.iter().rev().copied().collect();
    let h = dyson_hierarchy(model, b, &t_seq, t);
    let mut all = times.to_vec();
    all.push(t);
    Ok(DysonSymbol { times: all, n, r, value: h[n as usize][r as usize].clone() })
}

/// ⟨z^{⊗(k−m)}, U_ε(t)* b^Wick U_ε(t) z^{⊗k}⟩ by exact propagation.
pub fn dyson_matrix_element(
    space: &FockSpace,
    model: &ModelSpec,
    b: &PolySymbol,
    z: &[C64],
    k: u32,
    m: u32,
    t: f64,
) -> Result<C64> {
    if m > k {
        return Err(Error::InvalidArgument("need k − m ≥ 0".into()));
    }
    let prop = Propagator::for_model(space, model)?;
    let psi_k = prop.apply(&hermite_state(space, z, k)?, t);
    let psi_j = prop.apply(&hermite_state(space, z, k - m)?, t);
    let bw = wick::wick_quantize_sparse(space, b)?;
    Ok(psi_j.inner(&bw.apply(&psi_k)))
}

/// ln of √(k!(k−m)! ε^{p+q+2(n−r)})/(k−(p+n−r))!, `None` when the factorial argument is negative.
fn ln_prefactor(k: u32, m: u32, p: u32, q: u32, n: u32, r: u32, eps: f64) -> Option<f64> {
    let l = p + n - r;
    if l > k {
        return None;
    }
    Some(0.5 * (ln_factorial(k) + ln_factorial(k - m) + (p + q + 2 * (n - r)) as f64 * eps.ln()) - ln_factorial(k - l))
}

/// Coefficients α_j of ε^j in κ(κ−ε)⋯(κ−(p+n−r−1)ε), j = 0, …, p+n−r−1.
pub fn falling_factorial_alphas(p: u32, n: u32, r: u32, kappa: f64) -> Result<Vec<f64>> {
    if r > n {
        return Err(Error::InvalidArgument("need r ≤ n".into()));
    }
    let l = (p + n - r) as usize;
    // polynomial in ε, lowest power first
    let mut c = vec![1.0];
    for i in 0..l {
        let mut next = vec![0.0; c.len() + 1];
        for (j, v) in c.iter().enumerate() {
            next[j] += kappa * v;
            next[j + 1] -= i as f64 * v;
        }
        c = next;
    }
    c.truncate(l.max(1));
    if l == 0 {
        return Ok(vec![]);
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DysonMode {
    Series,
    /// 4|t|V_norm ≥ 1: only the leading term b(z_t) is returned.
    LimitOnly,
}

#[derive(Debug, Clone)]
pub struct DysonExpansion {
    pub mode: DysonMode,
    /// β^{(r)}, r < ℓ.
    pub beta: Vec<C64>,
    /// Σ_{r<ℓ} ε^r β^{(r)}.
    pub partial_sum: C64,
    /// b(z_t) from the Hartree flow.
    pub b_zt: C64,
    /// Bound on the omitted n > n_cut terms.
    pub tail_bound: f64,
    /// |quadrature(g) − quadrature(2g)| on the partial sum; zero for autonomous symbols.
    pub quad_gap: f64,
}

/// Integrals ∫_{simplex} C^{(n)}_r(z) for all n ≤ n_cut, r ≤ n; `out[n][r]`.
fn simplex_integrals(model: &ModelSpec, b: &PolySymbol, z: &[C64], t: f64, n_cut: u32, order: usize) -> Result<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = (0..=n_cut).map(|n| vec![C64::default(); n as usize + 1]).collect();
    let root = vec![free_evolved(model, b, t)];
    if autonomous(model) {
        // Q_s = Q: the simplex volume is t^n/n!
        let q = model.q_symbol();
        let mut level = root;
        for n in 0..=n_cut {
            let vol = t.abs().powi(n as i32) / combinatorics::factorial(n) * t.signum().powi(n as i32);
            for (r, c) in level.iter().enumerate() {
                out[n as usize][r] = c.evaluate(z) * vol;
            }
            if n < n_cut {
                level = dyson_step(&q, &level);
            }
        }
        return Ok(out);
    }
    fn rec(
        model: &ModelSpec,
        z: &[C64],
        order: usize,
        level: &[PolySymbol],
        n: u32,
        upper: f64,
        weight: f64,
        n_cut: u32,
        out: &mut [Vec<C64>],
    ) -> Result<()> {
        for (r, c) in level.iter().enumerate() {
            out[n as usize][r] += c.evaluate(z) * weight;
        }
        if n == n_cut {
            return Ok(());
        }
        for (s, w) in gauss_legendre(order, 0.0, upper)? {
            let next = dyson_step(&model.q_at(s), level);
            rec(model, z, order, &next, n + 1, s, weight * w, n_cut, out)?;
        }
        Ok(())
    }
    rec(model, z, order, &root, 0, t, 1.0, n_cut, &mut out)?;
    Ok(out)
}

/// True when Q(e^{−isA}·) = Q for all s, checked on a few times.
fn autonomous(model: &ModelSpec) -> bool {
    let q = model.q_symbol();
    let scale = q.max_coefficient().max(1e-300);
    [0.37, 1.1, 2.9].iter().all(|&s| model.q_at(s).sub(&q).max_coefficient() <= 1e-13 * scale)
}

/// Truncated expansion Σ_{r<ℓ} ε^r β^{(r)} of ⟨z^{⊗(k−m)}, U*b^Wick U z^{⊗k}⟩ for homogeneous b.
#[allow(clippy::too_many_arguments)]
pub fn dyson_expansion(
    model: &ModelSpec,
    b: &PolySymbol,
    z: &[C64],
    k: u32,
    eps: f64,
    t: f64,
    ell: u32,
    n_cut: u32,
    quad_order: usize,
) -> Result<DysonExpansion> {
    let (p, q) = b
        .homogeneity()
        .ok_or_else(|| Error::InvalidArgument("Dyson expansion needs a homogeneous symbol".into()))?;
    if q > p + k {
        return Err(Error::InvalidArgument("q exceeds k + p".into()));
    }
    let traj = hartree_flow(model, z, t, (t.abs() / 400.0).max(1e-4))?;
    let b_zt = b.evaluate(traj.final_z());
    if p < q {
        // the matrix element vanishes unless m = p − q ≥ 0
        return Ok(DysonExpansion { mode: DysonMode::Series, beta: vec![C64::default(); ell as usize], partial_sum: C64::default(), b_zt, tail_bound: 0.0, quad_gap: 0.0 });
    }
    let m = p - q;
    if 4.0 * t.abs() * model.v_norm >= 1.0 {
        return Ok(DysonExpansion {
            mode: DysonMode::LimitOnly,
            beta: vec![b_zt],
            partial_sum: b_zt,
            b_zt,
            tail_bound: f64::INFINITY,
            quad_gap: 0.0,
        });
    }
    let assemble = |ints: &[Vec<C64>]| -> Vec<C64> {
        (0..ell)
            .map(|r| {
                let mut s = C64::default();
                for n in r..=n_cut {
                    if let Some(lp) = ln_prefactor(k, m, p, q, n, r, eps) {
                        s += C64::i().powu(n) * lp.exp() * ints[n as usize][r as usize];
                    }
                }
                s
            })
            .collect()
    };
    let ints = simplex_integrals(model, b, z, t, n_cut, quad_order)?;
    let beta = assemble(&ints);
    let partial: C64 = beta.iter().enumerate().map(|(r, v)| v * eps.powi(r as i32)).sum();
    let quad_gap = if autonomous(model) {
        0.0
    } else {
        let ints2 = simplex_integrals(model, b, z, t, n_cut, 2 * quad_order)?;
        let p2: C64 = assemble(&ints2).iter().enumerate().map(|(r, v)| v * eps.powi(r as i32)).sum();
        (p2 - partial).norm()
    };
    let tail_bound = dyson_tail_bound(model, b, z, k, m, eps, t, ell, n_cut)?;
    Ok(DysonExpansion { mode: DysonMode::Series, beta, partial_sum: partial, b_zt, tail_bound, quad_gap })
}

/// Σ_{n>n_cut} Σ_{r<ℓ} ε^r · prefactor · ‖C̃^{(n)}_r‖-bound · |t|^n/n! · |z|^{p+q+2(n−r)}, with
/// ‖C̃^{(n)}_r‖ ≤ 2^{n−r} C(n,r) (P+n−r)^{2r} ((P+n−r−1)!/(P−1)!) V^n ‖b̃‖, P = max(p, q).
#[allow(clippy::too_many_arguments)]
pub fn dyson_tail_bound(model: &ModelSpec, b: &PolySymbol, z: &[C64], k: u32, m: u32, eps: f64, t: f64, ell: u32, n_cut: u32) -> Result<f64> {
    let (p, q) = b.homogeneity().unwrap_or((0, 0));
    let big_p = p.max(q);
    if big_p == 0 {
        return Ok(0.0);
    }
    let bn = b.tensor_norm()?;
    let zn = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let v = model.v_norm;
    let mut total = 0.0;
    for n in (n_cut + 1)..(n_cut + 2000) {
        let mut term = 0.0;
        for r in 0..ell.min(n + 1) {
            let Some(lp) = ln_prefactor(k, m, p, q, n, r, eps) else { continue };
            let l = big_p + n - r;
            let ln_norm = (n - r) as f64 * 2f64.ln()
                + combinatorics::ln_binomial(n, r)
                + 2.0 * r as f64 * (l as f64).ln()
                + ln_factorial(l - 1)
                - ln_factorial(big_p - 1)
                + n as f64 * v.max(1e-300).ln();
            let ln_t = n as f64 * t.abs().max(1e-300).ln() - ln_factorial(n);
            let ln_z = (p + q + 2 * (n - r)) as f64 * zn.max(1e-300).ln();
            term += eps.powi(r as i32) * (lp + ln_norm + ln_t + ln_z).exp() * bn;
        }
        total += term;
        if term < 1e-18 * total.max(1e-300) || term == 0.0 && n > k + p {
            break;
        }
    }
    Ok(total)
}
