//! Experiment catalog.

mod algebra;
mod bec;
mod dynamics;
mod quantization;
mod wigner;

use fockweyl::combinatorics::compositions;
use fockweyl::{Error, PolySymbol, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::report::Outcome;
use crate::CliError;

pub type Runner = fn(&ExperimentConfig, u64) -> Result<Outcome, CliError>;

pub struct Experiment {
    pub id: &'static str,
    pub summary: &'static str,
    pub run: Runner,
}

pub const CATALOG: &[Experiment] = &[
    Experiment { id: "algebra-verify", summary: "Wick products, Hermite matrix elements and number bounds against matrix oracles", run: algebra::run },
    Experiment { id: "laguerre-verify", summary: "Laguerre closed form of Hermite Fourier-Wigner values; Weyl/Wick gap of order ε", run: quantization::laguerre },
    Experiment { id: "prodcoh-limits", summary: "Wick, Weyl and Anti-Wick moments of product states approach the circle average", run: quantization::prodcoh },
    Experiment { id: "hepp-sweep", summary: "Coherent-state propagation error of the Hepp approximation scales like √ε", run: dynamics::hepp },
    Experiment { id: "dyson-sweep", summary: "Dyson multicommutators, leading-order remainder rate and coherent Wick propagation", run: dynamics::dyson },
    Experiment { id: "wigner-char", summary: "Characteristic functions of coherent and Hermite families against their limits", run: wigner::characteristic },
    Experiment { id: "superposition", summary: "Superpositions of asymptotically orthogonal states converge to mixtures", run: wigner::superposition },
    Experiment { id: "gauge-average", summary: "Gauge-averaged product states: two constructions agree and the limit is the circle", run: wigner::gauge },
    Experiment { id: "defect-dim", summary: "Coherent states escaping along new dimensions: zero Wick moment, unit number", run: wigner::defect },
    Experiment { id: "bec", summary: "Free Bose gas: fugacity, critical density and condensate characteristic function", run: bec::run },
    Experiment { id: "normal-approx", summary: "Poisson sums against their normal approximation for three test rules", run: wigner::normal },
];

pub fn find(id: &str) -> Option<&'static Experiment> {
    CATALOG.iter().find(|e| e.id == id)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_c(r: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(r.random_range(-scale..scale), r.random_range(-scale..scale))
}

pub fn rand_vec(r: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<C64> {
    (0..d).map(|_| rand_c(r, scale)).collect()
}

pub fn unit_vec(r: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    let v = rand_vec(r, d, 1.0);
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|c| c / n).collect()
}

/// Random element of P_{p,q}.
pub fn rand_homogeneous(r: &mut ChaCha8Rng, d: usize, p: u32, q: u32) -> PolySymbol {
    let mut b = PolySymbol::zero(d);
    for beta in compositions(d, q) {
        for gamma in compositions(d, p) {
            b.add_term(beta.clone(), gamma.clone(), rand_c(r, 1.0));
        }
    }
    b
}

/// Random sum of homogeneous parts with p, q ≤ max_deg.
pub fn rand_symbol(r: &mut ChaCha8Rng, d: usize, max_deg: u32) -> PolySymbol {
    let mut b = PolySymbol::zero(d);
    for p in 0..=max_deg {
        for q in 0..=max_deg {
            if r.random_bool(0.5) {
                b = b.add(&rand_homogeneous(r, d, p, q));
            }
        }
    }
    b
}

/// Retries with more truncation headroom while the Weyl guard fires.
pub fn with_headroom<T, F: Fn(f64) -> fockweyl::Result<T>>(f: F) -> fockweyl::Result<T> {
    let mut h = 1.0;
    loop {
        match f(h) {
            Err(Error::Guard(_)) if h < 4.0 => h *= 1.5,
            r => return r,
        }
    }
}

pub fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}
