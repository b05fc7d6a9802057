//! Weyl and Anti-Wick quantization of trigonometric symbols, Fourier–Wigner transforms,
//! the Hermite series of W(ξ) and the Weyl/Wick comparison for polynomials.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};

use crate::combinatorics::{self, compositions};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector};
use crate::ladder::{weyl_apply, weyl_operator};
use crate::operator::{spectral_norm, DenseOperator};
use crate::special;
use crate::symbol::{GradedSymbol, PolySymbol};
use crate::wick::wick_quantize_unchecked;
use crate::C64;

/// Mass allowed in the two top blocks after applying a Weyl operator.
pub const WEYL_GUARD_TOL: f64 = 1e-20;

/// S(u, v) = Re⟨u, v⟩.
pub fn real_inner(u: &[C64], v: &[C64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a.conj() * b).re).sum()
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(u: &[C64]) -> f64 {
    u.iter().map(|c| c.norm_sqr()).sum()
}

fn scaled(u: &[C64], s: C64) -> Vec<C64> {
    u.iter().map(|c| c * s).collect()
}

/// √2 π ξ, the Weyl argument attached to the frequency ξ.
pub fn weyl_argument(xi: &[C64]) -> Vec<C64> {
    scaled(xi, C64::new(SQRT_2 * PI, 0.0))
}

/// Σ_m c_m e^{2πi S(z, ξ_m)}.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSymbol {
    pub atoms: Vec<(C64, Vec<C64>)>,
}

impl TrigSymbol {
    pub fn new(atoms: Vec<(C64, Vec<C64>)>) -> Result<Self> {
        let d = atoms.first().map(|a| a.1.len()).unwrap_or(0);
        if atoms.iter().any(|a| a.1.len() != d) {
            return Err(Error::InvalidArgument("atoms of different dimensions".into()));
        }
        Ok(TrigSymbol { atoms })
    }

    pub fn d(&self) -> usize {
        self.atoms.first().map(|a| a.1.len()).unwrap_or(0)
    }

    pub fn evaluate(&self, z: &[C64]) -> C64 {
        self.atoms.iter().map(|(c, xi)| c * C64::from_polar(1.0, 2.0 * PI * real_inner(z, xi))).sum()
    }

    /// Σ|c_m|, a bound for sup|b|.
    pub fn sup_bound(&self) -> f64 {
        self.atoms.iter().map(|(c, _)| c.norm()).sum()
    }

    pub fn conj(&self) -> Self {
        TrigSymbol { atoms: self.atoms.iter().map(|(c, xi)| (c.conj(), scaled(xi, C64::new(-1.0, 0.0)))).collect() }
    }

    /// b(· + z0).
    pub fn translate(&self, z0: &[C64]) -> Self {
        TrigSymbol {
            atoms: self
                .atoms
                .iter()
                .map(|(c, xi)| (c * C64::from_polar(1.0, 2.0 * PI * real_inner(z0, xi)), xi.clone()))
                .collect(),
        }
    }

    /// |1 + e^{2πi S(z,ξ)}|² = 2 + e^{2πiS(z,ξ)} + e^{−2πiS(z,ξ)}.
    pub fn positive_example(xi: &[C64]) -> Self {
        let d = xi.len();
        TrigSymbol {
            atoms: vec![
                (C64::new(2.0, 0.0), vec![C64::default(); d]),
                (C64::new(1.0, 0.0), xi.to_vec()),
                (C64::new(1.0, 0.0), scaled(xi, C64::new(-1.0, 0.0))),
            ],
        }
    }
}

/// Fails when `v` carries more than `tol` mass in the two top blocks.
pub fn check_weyl_guard(v: &FockVector, tol: f64) -> Result<()> {
    let n = v.space.n_max();
    let top = v.mass_above(n.saturating_sub(2));
    if top > tol * v.norm_sqr().max(1e-300) {
        return Err(Error::Guard(format!(
            "Weyl image reaches the truncation: mass {top:.3e} above block {}",
            n.saturating_sub(2)
        )));
    }
    Ok(())
}

/// V[φ, ψ](ξ) = ⟨ψ, W(√2πξ) φ⟩.
pub fn fourier_wigner(space: &FockSpace, phi: &FockVector, psi: &FockVector, xi: &[C64]) -> Result<C64> {
    fourier_wigner_with_tol(space, phi, psi, xi, WEYL_GUARD_TOL)
}

pub fn fourier_wigner_with_tol(
    space: &FockSpace,
    phi: &FockVector,
    psi: &FockVector,
    xi: &[C64],
    tol: f64,
) -> Result<C64> {
    let w = weyl_apply(space, &weyl_argument(xi), phi)?;
    check_weyl_guard(&w, tol)?;
    Ok(psi.inner(&w))
}

/// Closed form of ⟨z^{⊗j}, W(·) z^{⊗k}⟩:
/// i^{k−j} √(j!/k!) L_j^{(k−j)}(|⟨ξ,z⟩|²) ⟨ξ,z⟩^{k−j} e^{−|ξ|²/2} for k ≥ j, and the mirrored form for j ≥ k.
/// The Fourier–Wigner argument at which it holds is [`laguerre_probe`].
pub fn laguerre_vw(k: u32, j: u32, z: &[C64], xi: &[C64]) -> Result<C64> {
    if (norm_sqr(z) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("laguerre_vw needs |z| = 1".into()));
    }
    if z.len() != xi.len() {
        return Err(Error::DimensionMismatch { expected: z.len(), got: xi.len() });
    }
    let p = inner(xi, z);
    let gauss = (-0.5 * norm_sqr(xi)).exp();
    let (hi, lo, w) = if k >= j { (k, j, p) } else { (j, k, p.conj()) };
    let m = hi - lo;
    let ratio = (combinatorics::ln_factorial(lo) - combinatorics::ln_factorial(hi)).exp().sqrt();
    Ok(C64::i().powu(m) * ratio * special::laguerre(lo, m, p.norm_sqr()) * w.powu(m) * gauss)
}

/// The Fourier–Wigner argument matching [`laguerre_vw`] at ξ: ξ/(π√ε), i.e. W(√(2/ε) ξ).
pub fn laguerre_probe(xi: &[C64], eps: f64) -> Vec<C64> {
    scaled(xi, C64::new(1.0 / (PI * eps.sqrt()), 0.0))
}

/// b^{Weyl} = Σ_m c_m W(√2πξ_m).
pub fn weyl_quantize_trig(space: &FockSpace, b: &TrigSymbol) -> Result<DenseOperator> {
    trig_sum(space, b, |_| 1.0)
}

/// b^{A-Wick} = Σ_m c_m e^{−επ²|ξ_m|²/2} W(√2πξ_m).
pub fn anti_wick_quantize_trig(space: &FockSpace, b: &TrigSymbol) -> Result<DenseOperator> {
    let eps = space.epsilon();
    trig_sum(space, b, |xi| (-0.5 * eps * PI * PI * norm_sqr(xi)).exp())
}

fn trig_sum<F: Fn(&[C64]) -> f64>(space: &FockSpace, b: &TrigSymbol, damp: F) -> Result<DenseOperator> {
    if b.d() != space.d() && !b.atoms.is_empty() {
        return Err(Error::DimensionMismatch { expected: space.d(), got: b.d() });
    }
    let mut out = DenseOperator::zeros(space);
    for (c, xi) in &b.atoms {
        let w = weyl_operator(space, &weyl_argument(xi))?;
        out.mat += w.mat * (c * damp(xi));
    }
    Ok(out)
}

/// ∫ b(ξ) |E(ξ)⟩⟨E(ξ)| dL(ξ)/(πε)^d by a tensor Gauss–Hermite rule in ξ/√ε, for d ≤ 2.
/// The rule is exact for the resolution of identity on the truncated space when `order > n_max`.
pub fn anti_wick_quadrature<F>(space: &FockSpace, b: F, order: usize) -> Result<DenseOperator>
where
    F: Fn(&[C64]) -> C64,
{
    let d = space.d();
    if d > 2 {
        return Err(Error::InvalidArgument("quadrature path supports d ≤ 2".into()));
    }
    if order <= space.n_max() as usize {
        return Err(Error::Guard(format!("quadrature order {order} must exceed n_max = {}", space.n_max())));
    }
    let gh = special::gauss_hermite(order)?;
    let eps = space.epsilon();
    let dim = space.dim();
    let inv_sqrt_fact: Vec<f64> = space
        .basis()
        .iter()
        .map(|a| (-0.5 * a.iter().map(|&x| combinatorics::ln_factorial(x)).sum::<f64>()).exp())
        .collect();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    let n_pts = gh.len().pow(2 * d as u32);
    let mut idx = vec![0usize; 2 * d];
    for _ in 0..n_pts {
        let mut weight = 1.0;
        let mut w = vec![C64::default(); d];
        for j in 0..d {
            let (x, wx) = gh[idx[2 * j]];
            let (y, wy) = gh[idx[2 * j + 1]];
            weight *= wx * wy;
            w[j] = C64::new(x, y);
        }
        let xi: Vec<C64> = w.iter().map(|c| c * eps.sqrt()).collect();
        let val = b(&xi) * (weight / PI.powi(d as i32));
        // e^{|w|²}·E(√ε w) in occupation coordinates: w^α/√α!
        let v = DVector::from_iterator(
            dim,
            space.basis().iter().zip(&inv_sqrt_fact).map(|(a, s)| {
                a.iter().zip(&w).fold(C64::new(*s, 0.0), |acc, (&e, c)| acc * c.powu(e))
            }),
        );
        out += &v * v.adjoint() * val;
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < gh.len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(DenseOperator { space: space.clone(), mat: out })
}

/// h_n(i√2 S(ξ,z)) as a polynomial symbol: Σ_r (−1)^r n!/(r!(n−2r)!) (2i√2 S(ξ,z))^{n−2r}.
pub fn hermite_wick_symbol(xi: &[C64], n: u32) -> PolySymbol {
    let d = xi.len();
    let base = PolySymbol::real_pairing(xi).scale(C64::new(0.0, 2.0 * SQRT_2));
    let mut out = PolySymbol::zero(d);
    for r in 0..=n / 2 {
        let m = n - 2 * r;
        let c = (combinatorics::ln_factorial(n) - combinatorics::ln_factorial(r) - combinatorics::ln_factorial(m)).exp();
        let sgn = if r % 2 == 0 { 1.0 } else { -1.0 };
        out = out.add(&base.pow(m).scale(C64::new(sgn * c, 0.0)));
    }
    out
}

/// Σ_{n<n_terms} (|√ε ξ|^n/(2^n n!)) h_n(i√2 S(ξ,z)/|√ε ξ|)^{Wick}.
pub fn weyl_hermite_series(space: &FockSpace, xi: &[C64], n_terms: u32) -> Result<DenseOperator> {
    space.check_dim(xi)?;
    let d = space.d();
    let s = (space.epsilon() * norm_sqr(xi)).sqrt();
    let pair = PolySymbol::real_pairing(xi).scale(C64::new(0.0, 2.0 * SQRT_2));
    let mut sym = PolySymbol::zero(d);
    let mut powers = vec![PolySymbol::constant(d, C64::new(1.0, 0.0))];
    for n in 0..n_terms {
        for r in 0..=n / 2 {
            let m = n - 2 * r;
            while powers.len() <= m as usize {
                let next = powers.last().unwrap().mul(&pair);
                powers.push(next);
            }
            // (−1)^r s^{2r} / (2^n r! (n−2r)!)
            let ln_c = 2.0 * r as f64 * s.max(1e-300).ln()
                - n as f64 * 2f64.ln()
                - combinatorics::ln_factorial(r)
                - combinatorics::ln_factorial(m);
            let c = if r > 0 && s == 0.0 { 0.0 } else { ln_c.exp() };
            let sgn = if r % 2 == 0 { 1.0 } else { -1.0 };
            sym = sym.add(&powers[m as usize].scale(C64::new(sgn * c, 0.0)));
        }
    }
    Ok(wick_quantize_unchecked(space, &sym).to_dense())
}

/// b ∗ γ with γ the Gaussian of variance ε/2 per complex coordinate, graded in ε:
/// grade r is 2^{−r} Σ_{|μ|=r} (1/μ!) ∂_z^μ ∂_z̄^μ b.
pub fn gaussian_convolution(b: &PolySymbol) -> GradedSymbol {
    let d = b.d();
    let (p, q) = b.max_degrees();
    let mut out = GradedSymbol::zero(d);
    for r in 0..=p.min(q) {
        let mut acc = PolySymbol::zero(d);
        for mu in compositions(d, r) {
            let t = b.d_z(&mu).d_zbar(&mu);
            acc = acc.add(&t.scale(C64::new(1.0 / combinatorics::multi_factorial(&mu), 0.0)));
        }
        out.add_at(r, &acc.scale(C64::new(0.5f64.powi(r as i32), 0.0)));
    }
    out
}

/// b^{Weyl} for a polynomial b, as (b ∗ γ)^{Wick}.
pub fn weyl_quantize_poly(space: &FockSpace, b: &PolySymbol) -> DenseOperator {
    let conv = gaussian_convolution(b).at_epsilon(space.epsilon());
    wick_quantize_unchecked(space, &conv).to_dense()
}

/// ‖b^{Wick} − b^{Weyl}‖ restricted to blocks n ≤ n_guard.
pub fn weyl_wick_gap(space: &FockSpace, b: &PolySymbol, n_guard: u32) -> Result<f64> {
    if n_guard > space.n_max() {
        return Err(Error::Guard(format!("n_guard {n_guard} exceeds n_max {}", space.n_max())));
    }
    let conv = gaussian_convolution(b);
    let mut diff = conv.clone();
    diff.grades.remove(&0);
    let gap = wick_quantize_unchecked(space, &diff.at_epsilon(space.epsilon())).to_dense();
    Ok(spectral_norm(&gap.compress_upto(n_guard)))
}

/// ‖(W(z1) − W(z2))(N+1)^{−1/2}‖ on input blocks ≤ n_guard.
pub fn weyl_continuity_norm(space: &FockSpace, z1: &[C64], z2: &[C64], n_guard: u32) -> Result<f64> {
    let w1 = weyl_operator(space, z1)?;
    let w2 = weyl_operator(space, z2)?;
    let mut m = (w1.mat - w2.mat).columns(0, space.dim_upto(n_guard)).into_owned();
    for (c, mut col) in m.column_iter_mut().enumerate() {
        col /= C64::new((space.epsilon() * space.block_of(c) as f64 + 1.0).sqrt(), 0.0);
    }
    Ok(spectral_norm(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, hermite_state, make_space};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_char() {
        let s = make_space(1, 40, 0.5).unwrap();
        let om = FockVector::basis_vector(&s, &[0]).unwrap();
        let xi = [c(0.3, -0.2)];
        let v = fourier_wigner(&s, &om, &om, &xi).unwrap();
        let exact = (-0.5 * 0.5 * PI * PI * norm_sqr(&xi)).exp();
        assert!((v - exact).norm() < 1e-12, "{v} {exact}");
    }

    #[test]
    fn coherent_char_phase() {
        let eps = 0.25;
        let s = make_space(1, 70, eps).unwrap();
        let z = [c(0.6, 0.8)];
        let e = coherent_state(&s, &z).unwrap();
        let xi = [c(0.2, 0.1)];
        let v = fourier_wigner(&s, &e, &e, &xi).unwrap();
        let exact = C64::from_polar((-0.5 * eps * PI * PI * norm_sqr(&xi)).exp(), 2.0 * PI * real_inner(&xi, &z));
        assert!((v - exact).norm() < 1e-9, "{v} {exact}");
    }

    #[test]
    fn laguerre_scaling_pinned() {
        let eps = 0.5;
        let s = make_space(1, 60, eps).unwrap();
        let z = [c(0.0, 1.0)];
        let xi = [c(0.7, -0.4)];
        for (k, j) in [(2u32, 1u32), (1, 3), (0, 0), (4, 4)] {
            let a = hermite_state(&s, &z, k).unwrap();
            let b = hermite_state(&s, &z, j).unwrap();
            let v = fourier_wigner(&s, &a, &b, &laguerre_probe(&xi, eps)).unwrap();
            let cf = laguerre_vw(k, j, &z, &xi).unwrap();
            assert!((v - cf).norm() < 1e-10, "k={k} j={j}: {v} vs {cf}");
        }
    }

    #[test]
    fn convolution_of_norm_sqr() {
        let g = gaussian_convolution(&PolySymbol::norm_sqr(1));
        assert_eq!(g.grade(1), PolySymbol::constant(1, c(0.5, 0.0)));
    }
}
