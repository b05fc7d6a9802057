use fockweyl::combinatorics::factorial;
use fockweyl::quantization::norm_sqr;
use fockweyl::wick::{guarded_columns, number_estimate_check, wick_quantize, wick_quantize_dense, wick_quantize_graded};
use fockweyl::{hermite_state, make_space, wick_product, FockVector, GradedSymbol, PolySymbol, C64};
use rayon::prelude::*;

use super::*;
use crate::report::{num, Table};

const MAX_DEG: u32 = 3;

/// ⟨z^{⊗j}, b^Wick z^{⊗k}⟩ in closed form.
fn hermite_element(b: &PolySymbol, z: &[C64], eps: f64, j: u32, k: u32) -> C64 {
    let (p, q) = b.homogeneity().expect("homogeneous");
    if k < p || j < q || k - p != j - q {
        return C64::default();
    }
    let c = (factorial(k) * factorial(j)).sqrt() / factorial(k - p) * eps.powf((p + q) as f64 / 2.0);
    b.evaluate(z) * c * norm_sqr(z).powi((k - p) as i32)
}

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome, CliError> {
    let n_max = cfg.n_max.unwrap_or(12);
    let eps = cfg.epsilons_or(&[0.3])[0];
    let instances = cfg.instances.unwrap_or(50);
    let tol = cfg.tolerance_or(1e-10);
    if n_max < 2 * MAX_DEG {
        return Err(CliError::Config(format!("n_max must be at least {}", 2 * MAX_DEG)));
    }
    let guard = n_max - 2 * MAX_DEG;
    for d in 1..=3 {
        make_space(d, n_max, eps)?;
    }
    let mut r = rng(seed);
    let pairs: Vec<(usize, PolySymbol, PolySymbol)> = (0..instances)
        .map(|i| {
            let d = 1 + i % 3;
            (d, rand_symbol(&mut r, d, MAX_DEG), rand_symbol(&mut r, d, MAX_DEG))
        })
        .collect();
    let kinds = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2), (3, 1)];
    let homog: Vec<(usize, PolySymbol, Vec<C64>)> = (1..=3usize)
        .flat_map(|d| kinds.iter().map(move |&(p, q)| (d, p, q)))
        .map(|(d, p, q)| (d, rand_homogeneous(&mut r, d, p, q), rand_vec(&mut r, d, 1.0)))
        .collect();

    let products: Vec<f64> = pairs
        .par_iter()
        .map(|(d, b1, b2)| -> fockweyl::Result<f64> {
            let s = make_space(*d, n_max, eps)?;
            let prod = wick_product(&GradedSymbol::from_poly(b1.clone()), &GradedSymbol::from_poly(b2.clone()));
            let lhs = wick_quantize_graded(&s, &prod)?;
            let rhs = wick_quantize_dense(&s, b1)?.mul(&wick_quantize_dense(&s, b2)?);
            let rg = guarded_columns(&rhs, guard);
            let diff = guarded_columns(&lhs, guard) - &rg;
            let scale = fockweyl::operator::max_abs(&rg).max(1.0);
            Ok(fockweyl::operator::max_abs(&diff) / scale)
        })
        .collect::<fockweyl::Result<_>>()?;

    let elem_n = 8u32;
    let elements: Vec<(f64, f64)> = homog
        .par_iter()
        .map(|(d, b, z)| -> fockweyl::Result<(f64, f64)> {
            let s = make_space(*d, elem_n, eps)?;
            let op = wick_quantize(&s, b)?.to_dense();
            let states: Vec<FockVector> = (0..=elem_n).map(|k| hermite_state(&s, z, k)).collect::<fockweyl::Result<_>>()?;
            let mut worst: f64 = 0.0;
            for k in 0..=elem_n {
                for j in 0..=elem_n {
                    let got = op.matrix_element(&states[j as usize], &states[k as usize]);
                    let want = hermite_element(b, z, eps, j, k);
                    worst = worst.max((got - want).norm() / want.norm().max(1.0));
                }
            }
            let ratio = if b.max_total_degree() > 0 { number_estimate_check(&s, b)?.max_ratio } else { 0.0 };
            Ok((worst, ratio))
        })
        .collect::<fockweyl::Result<_>>()?;

    let mut table = Table::new("algebra", &["instance", "d", "check", "value"]);
    for (i, ((d, _, _), res)) in pairs.iter().zip(&products).enumerate() {
        table.push(vec![i.to_string(), d.to_string(), "wick_product_residual".into(), num(*res)]);
    }
    for (i, ((d, b, _), (res, ratio))) in homog.iter().zip(&elements).enumerate() {
        let (p, q) = b.homogeneity().unwrap_or((0, 0));
        table.push(vec![i.to_string(), d.to_string(), format!("hermite_element_residual_p{p}q{q}"), num(*res)]);
        table.push(vec![i.to_string(), d.to_string(), format!("number_bound_ratio_p{p}q{q}"), num(*ratio)]);
    }
    let max_prod = max_of(&products);
    let max_elem = elements.iter().map(|e| e.0).fold(0.0, f64::max);
    let max_ratio = elements.iter().map(|e| e.1).fold(0.0, f64::max);

    let mut o = Outcome::new("The graded Wick product quantizes to the operator product, Hermite matrix elements follow the closed form, and Wick operators obey the number estimate.");
    o.metric("max_product_residual", max_prod);
    o.metric("max_element_residual", max_elem);
    o.metric("max_bound_ratio", max_ratio);
    o.metric("instances", instances);
    o.guard("n_max", n_max);
    o.guard("guarded_input_blocks", guard);
    o.tolerance("residual", tol);
    o.tolerance("bound_ratio", 1.0 + 1e-12);
    o.check("product", max_prod <= tol);
    o.check("elements", max_elem <= tol);
    o.check("bound", max_ratio <= 1.0 + 1e-12);
    o.tables.push(table);
    Ok(o)
}
