//! Fixtures shared by the kernel benchmarks.

use fockweyl::combinatorics::compositions;
use fockweyl::{FockSpace, PolySymbol, C64};

/// Deterministic element of P_{p,q} with coefficients on a small lattice.
pub fn fixed_homogeneous(d: usize, p: u32, q: u32) -> PolySymbol {
    let mut b = PolySymbol::zero(d);
    let mut k = 0u32;
    for beta in compositions(d, q) {
        for gamma in compositions(d, p) {
            k += 1;
            b.add_term(beta.clone(), gamma.clone(), C64::new((k % 5) as f64 * 0.2 - 0.4, (k % 3) as f64 * 0.3 - 0.3));
        }
    }
    b
}

pub fn space(d: usize, n_max: u32, eps: f64) -> FockSpace {
    FockSpace::new(d, n_max, eps).expect("valid space")
}
