//! Hermite and Laguerre polynomials, Riemann zeta with an error certificate, Gauss rules.

use gauss_quad::{GaussHermite, GaussLegendre};

use crate::error::{Error, Result};
use crate::C64;

/// h_n(x) = (−1)^n e^{x²} dⁿ/dxⁿ e^{−x²} (physicists' convention), by the three-term recurrence.
pub fn hermite(n: u32, x: C64) -> C64 {
    let mut h0 = C64::new(1.0, 0.0);
    if n == 0 {
        return h0;
    }
    let mut h1 = x * 2.0;
    for m in 1..n {
        let h2 = x * 2.0 * h1 - h0 * (2.0 * m as f64);
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Integer coefficients of h_n, lowest degree first, from the explicit finite sum.
pub fn hermite_coefficients(n: u32) -> Vec<i128> {
    let mut c = vec![0i128; n as usize + 1];
    for r in 0..=n / 2 {
        let m = n - 2 * r;
        // n!/(r!(n−2r)!) · 2^m · (−1)^r
        let mut v: i128 = 1;
        for t in (m + 1)..=n {
            v *= t as i128;
        }
        for t in 1..=r {
            v /= t as i128;
        }
        let v = v * (1i128 << m);
        c[m as usize] = if r % 2 == 0 { v } else { -v };
    }
    c
}

/// Generalized Laguerre L_k^{(j)}(t) by the three-term recurrence in k.
pub fn laguerre(k: u32, j: u32, t: f64) -> f64 {
    let a = j as f64;
    let mut l0 = 1.0;
    if k == 0 {
        return l0;
    }
    let mut l1 = 1.0 + a - t;
    for n in 1..k {
        let nf = n as f64;
        let l2 = ((2.0 * nf + 1.0 + a - t) * l1 - (nf + a) * l0) / (nf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// L_k^{(j)}(t) from Σ_m (−1)^m (k+j)!/((k−m)!(j+m)!m!) t^m.
pub fn laguerre_sum(k: u32, j: u32, t: f64) -> f64 {
    let mut s = 0.0;
    let mut c = 1.0; // (k+j)!/(k!j!)
    for i in 1..=k {
        c *= (j + i) as f64 / i as f64;
    }
    let mut tm = 1.0;
    for m in 0..=k {
        s += if m % 2 == 0 { c * tm } else { -c * tm };
        // ratio of consecutive coefficients: (k−m)/((j+m+1)(m+1))
        c *= (k - m) as f64 / (((j + m + 1) * (m + 1)) as f64);
        tm *= t;
    }
    s
}

/// Value with a rigorous absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub value: f64,
    pub error_bound: f64,
}

const BERNOULLI_2K: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];

/// ζ(s), s > 1, by Euler–Maclaurin after `n` explicit terms. The bound is the size of the first
/// omitted correction, which dominates the remainder for real s > 1.
pub fn zeta(s: f64) -> Result<Certified> {
    if s <= 1.0 {
        return Err(Error::InvalidArgument(format!("zeta needs s > 1, got {s}")));
    }
    let n = 64u32;
    let nf = n as f64;
    let mut sum = 0.0;
    for k in (1..n).rev() {
        sum += (k as f64).powf(-s);
    }
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut last = 0.0;
    for (i, b) in BERNOULLI_2K.iter().enumerate() {
        let k = i as f64 + 1.0;
        let term = b / fact * rising * nf.powf(-s - 2.0 * k + 1.0);
        if i + 1 == BERNOULLI_2K.len() {
            last = term.abs();
            break;
        }
        sum += term;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    Ok(Certified { value: sum, error_bound: last + 1e-15 * sum })
}

/// Gauss–Legendre nodes and weights mapped to [a, b].
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(order).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(rule.as_node_weight_pairs().iter().map(|&(x, w)| (m + h * x, h * w)).collect())
}

/// Gauss–Hermite nodes and weights for ∫ f(x) e^{−x²} dx.
pub fn gauss_hermite(order: usize) -> Result<Vec<(f64, f64)>> {
    let rule = GaussHermite::new(order).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(rule.as_node_weight_pairs().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_hermite() {
        let x = C64::new(0.3, -0.7);
        let h3 = hermite(3, x);
        let direct = x * x * x * 8.0 - x * 12.0;
        assert!((h3 - direct).norm() < 1e-14);
        assert_eq!(hermite_coefficients(4), vec![12, 0, -48, 0, 16]);
    }

    #[test]
    fn laguerre_forms_agree() {
        for k in 0..15 {
            for j in 0..6 {
                for &t in &[0.0, 0.4, 2.5] {
                    let a = laguerre(k, j, t);
                    let b = laguerre_sum(k, j, t);
                    assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{k} {j} {t}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn zeta_two() {
        let z = zeta(2.0).unwrap();
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((z.value - exact).abs() <= z.error_bound);
        assert!(z.error_bound < 1e-13);
    }
}
