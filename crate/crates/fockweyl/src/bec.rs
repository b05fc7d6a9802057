//! Free Bose gas on the rescaled torus: lattice densities, critical density, fugacity and the
//! explicit characteristic function of the grand-canonical state.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{zeta, Certified};
use crate::C64;

/// Lattice tail tolerance for ν_ε and the characteristic function.
pub const LATTICE_TAIL_TOL: f64 = 1e-10;
/// Absolute tolerance on the fugacity constraint.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BecParams {
    pub d_phys: u32,
    pub beta: f64,
    pub nu: f64,
    /// Largest |n|_∞ allowed in lattice sums; 0 lets the certificate choose.
    pub lattice_cutoff: u32,
    pub epsilon: f64,
}

impl BecParams {
    pub fn new(d_phys: u32, beta: f64, nu: f64, epsilon: f64) -> Self {
        BecParams { d_phys, beta, nu, lattice_cutoff: 0, epsilon }
    }

    fn validate(&self) -> Result<()> {
        if self.d_phys == 0 || !(self.beta > 0.0) || !(self.nu > 0.0) || !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument("need d ≥ 1, β > 0, ν > 0, ε > 0".into()));
        }
        Ok(())
    }

    /// c with e^{−βε^{2/d}|2πn|²} = e^{−c|n|²}.
    fn decay(&self) -> f64 {
        self.beta * self.epsilon.powf(2.0 / self.d_phys as f64) * 4.0 * PI * PI
    }
}

/// Multiplicities of m = |n|² over the cube |n|_∞ ≤ r in Z^d, index m.
fn shell_counts(d: u32, r: u32) -> Vec<u64> {
    let r = r as usize;
    let mut counts = vec![1u64];
    for _ in 0..d {
        let mut next = vec![0u64; counts.len() + r * r];
        for (m, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            next[m] += c;
            for j in 1..=r {
                next[m + j * j] += 2 * c;
            }
        }
        counts = next;
    }
    counts
}

/// Σ_{n∈Z, |n|>r} e^{−c n²} bound and θ(c) = Σ_{n∈Z} e^{−c n²} bound.
fn one_dim_tail(c: f64, r: u32) -> (f64, f64) {
    let r1 = (r + 1) as f64;
    // e^{−c n²} ≤ e^{−c r1²} e^{−c(2 r1)(n − r1)} for n ≥ r1
    let tail = 2.0 * (-c * r1 * r1).exp() / (1.0 - (-2.0 * c * r1).exp());
    let theta = 1.0 + 2.0 / (1.0 - (-c).exp()) * (-c).exp();
    (tail, theta)
}

/// Sum ε Σ_{n ≠ 0} w(|n|²) over the lattice with w(m) ≤ k e^{−c m} outside the cube; returns the
/// cube sum and a bound on the rest.
fn lattice_sum<F: Fn(u64) -> f64>(p: &BecParams, w: F, k_outside: f64) -> Result<Certified> {
    let c = p.decay();
    let mut r = if p.lattice_cutoff > 0 { p.lattice_cutoff } else { 4 };
    loop {
        let (t1, theta) = one_dim_tail(c, r);
        // some coordinate exceeds r
        let tail = p.epsilon * k_outside * p.d_phys as f64 * t1 * theta.powi(p.d_phys as i32 - 1);
        if tail <= LATTICE_TAIL_TOL {
            let counts = shell_counts(p.d_phys, r);
            let mut s = 0.0;
            for (m, &cnt) in counts.iter().enumerate().skip(1) {
                if cnt > 0 {
                    s += cnt as f64 * w(m as u64);
                }
            }
            return Ok(Certified { value: p.epsilon * s, error_bound: tail });
        }
        if p.lattice_cutoff > 0 {
            return Err(Error::TruncationInsufficient(format!("lattice cutoff {r} leaves tail {tail:.3e}")));
        }
        r = r * 3 / 2 + 1;
        if r > 4096 {
            return Err(Error::TruncationInsufficient("lattice cutoff exceeds 4096".into()));
        }
    }
}

/// z e^{−x}/(1 − z e^{−x}) with z = 1 − w, accurate near z = 1.
fn bose_weight(w: f64, x: f64) -> f64 {
    let e = (-x).exp();
    (1.0 - w) * e / (-(-x).exp_m1() + w * e)
}

/// ν_ε(β, z) with z = 1 − w given through w ∈ (0, 1].
pub fn nu_eps_w(p: &BecParams, w: f64) -> Result<Certified> {
    p.validate()?;
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::InvalidArgument(format!("fugacity must lie in (0,1), got z = {}", 1.0 - w)));
    }
    let c = p.decay();
    let r1 = 1.0;
    let k_out = 1.0 / (1.0 - (1.0 - w) * (-c * r1).exp());
    lattice_sum(p, |m| bose_weight(w, c * m as f64), k_out)
}

/// ε Σ_{n ∈ Z^d∖{0}} z e^{−βε^{2/d}|2πn|²}/(1 − z e^{−βε^{2/d}|2πn|²}).
pub fn nu_eps(p: &BecParams, z: f64) -> Result<Certified> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::InvalidArgument(format!("fugacity must lie in (0,1), got {z}")));
    }
    nu_eps_w(p, 1.0 - z)
}

/// ν₀(β, z) = Σ_{k≥1} z^k (4πβk)^{−d/2}.
pub fn nu_zero(d_phys: u32, beta: f64, z: f64) -> Result<Certified> {
    if !(z > 0.0 && z <= 1.0) || !(beta > 0.0) || d_phys == 0 {
        return Err(Error::InvalidArgument("need 0 < z ≤ 1, β > 0, d ≥ 1".into()));
    }
    let h = d_phys as f64 / 2.0;
    let pref = (4.0 * PI * beta).powf(-h);
    if z == 1.0 {
        if d_phys < 3 {
            return Err(Error::InvalidArgument("no condensation threshold for d < 3".into()));
        }
        return nu_crit(d_phys, beta);
    }
    let mut s = 0.0;
    let mut zk = 1.0;
    let mut k = 0u64;
    loop {
        k += 1;
        zk *= z;
        s += zk * (k as f64).powf(-h);
        // z^{k+1}(k+1)^{−d/2}/(1 − z) bounds the rest
        let tail = zk * z * ((k + 1) as f64).powf(-h) / (1.0 - z);
        if tail <= 1e-15 * s || k > 50_000_000 {
            return Ok(Certified { value: pref * s, error_bound: pref * tail });
        }
    }
}

/// ν_c = ζ(d/2)(4πβ)^{−d/2}.
pub fn nu_crit(d_phys: u32, beta: f64) -> Result<Certified> {
    if d_phys < 3 {
        return Err(Error::InvalidArgument("no condensation threshold for d < 3".into()));
    }
    let z = zeta(d_phys as f64 / 2.0)?;
    let pref = (4.0 * PI * beta).powf(-(d_phys as f64) / 2.0);
    Ok(Certified { value: pref * z.value, error_bound: pref * z.error_bound })
}

pub fn condensate_fraction(d_phys: u32, beta: f64, nu: f64) -> Result<f64> {
    Ok((1.0 - nu_crit(d_phys, beta)?.value / nu).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fugacity {
    pub z: f64,
    /// 1 − z, kept separately for accuracy.
    pub w: f64,
    /// ε z/(1 − z): density in the zero mode.
    pub zero_mode: f64,
    pub constraint_residual: f64,
    pub tail_bound: f64,
}

/// Solves ε z/(1 − z) + ν_ε(β, z) = ν by bisection in w = 1 − z.
pub fn solve_fugacity(p: &BecParams) -> Result<Fugacity> {
    p.validate()?;
    let f = |w: f64| -> Result<(f64, f64)> {
        let nu = nu_eps_w(p, w)?;
        Ok((p.epsilon * (1.0 - w) / w + nu.value - p.nu, nu.error_bound))
    };
    // F decreases in w; bracket in log w first
    let (mut lo, mut hi) = (f64::MIN_POSITIVE.sqrt(), 1.0);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if f(mid)?.0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-6 {
            break;
        }
    }
    let mut best = (hi, f(hi)?);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v.0.abs() < best.1 .0.abs() {
            best = (mid, v);
        }
        if v.0.abs() <= CONSTRAINT_TOL {
            break;
        }
        if v.0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (w, (res, tail)) = best;
    Ok(Fugacity { z: 1.0 - w, w, zero_mode: p.epsilon * (1.0 - w) / w, constraint_residual: res.abs(), tail_bound: tail })
}

/// Fourier coefficient of the test function on the torus: (n, f_n).
pub type Mode = (Vec<i64>, C64);

/// G_ε(f) = e^{−επ²|f|²} exp[−επ² Σ_n |f_n|² z e^{−βε^{2/d}|2πn|²}/(1 − z e^{−βε^{2/d}|2πn|²})].
pub fn bec_char(p: &BecParams, f: &[Mode]) -> Result<(C64, Fugacity)> {
    let fug = solve_fugacity(p)?;
    Ok((bec_char_at(p, f, fug.w)?, fug))
}

/// G_ε at a given w = 1 − z.
pub fn bec_char_at(p: &BecParams, f: &[Mode], w: f64) -> Result<C64> {
    let c = p.decay();
    let mut norm2 = 0.0;
    let mut s = 0.0;
    for (n, fnv) in f {
        if n.len() != p.d_phys as usize {
            return Err(Error::DimensionMismatch { expected: p.d_phys as usize, got: n.len() });
        }
        let m: i64 = n.iter().map(|x| x * x).sum();
        norm2 += fnv.norm_sqr();
        s += fnv.norm_sqr() * bose_weight(w, c * m as f64);
    }
    Ok(C64::new((-p.epsilon * PI * PI * (norm2 + s)).exp(), 0.0))
}

/// e^{−π²(ν − ν_c)|f_0|²} above the critical density, 1 otherwise.
pub fn bec_limit_char(f: &[Mode], d_phys: u32, beta: f64, nu: f64) -> Result<C64> {
    let nc = nu_crit(d_phys, beta)?.value;
    if nu <= nc {
        return Ok(C64::new(1.0, 0.0));
    }
    let f0: f64 = f.iter().filter(|(n, _)| n.iter().all(|&x| x == 0)).map(|(_, v)| v.norm_sqr()).sum();
    Ok(C64::new((-PI * PI * (nu - nc) * f0).exp(), 0.0))
}
