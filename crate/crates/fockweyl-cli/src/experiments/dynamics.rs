use fockweyl::combinatorics::ln_factorial;
use fockweyl::dynamics::{coherent_wick_limit, hepp_error};
use fockweyl::dyson::{dyson_hierarchy, free_evolved, DysonMode};
use fockweyl::io::model_from_json;
use fockweyl::operator::max_abs;
use fockweyl::stats::loglog_slope;
use fockweyl::wick::{guarded_columns, wick_quantize_dense};
use fockweyl::{dyson_expansion, dyson_matrix_element, ModelSpec, PolySymbol, C64};
use fockweyl::nalgebra::DMatrix;
use rayon::prelude::*;

use super::*;
use crate::report::{list, num, Table};

fn model_or_scalar(cfg: &ExperimentConfig) -> Result<ModelSpec, CliError> {
    match &cfg.model {
        Some(m) => Ok(model_from_json(m)?),
        None => Ok(ModelSpec::scalar(0.7, 0.2, 0.1, 10)),
    }
}

fn check_regime(model: &ModelSpec, t: f64) -> Result<(), CliError> {
    let v = 4.0 * t.abs() * model.v_norm;
    if v >= 1.0 {
        return Err(CliError::Config(format!("outside the weak-coupling regime: 4|t|V_norm = {v:.3} ≥ 1")));
    }
    Ok(())
}

pub fn hepp(cfg: &ExperimentConfig, _seed: u64) -> Result<Outcome, CliError> {
    let model = model_or_scalar(cfg)?;
    let t = cfg.t.unwrap_or(0.5);
    let grid = cfg.epsilons_or(&[0.25, 0.125, 0.0625, 0.03125]);
    let z0 = cfg.z_or(&vec![C64::new(1.0, 0.0); model.d()]);
    let steps = cfg.steps.unwrap_or(200);
    if z0.len() != model.d() {
        return Err(CliError::Config(format!("z must have length {}", model.d())));
    }
    check_regime(&model, t)?;
    let factor = cfg.n_max.map(|n| n as f64).unwrap_or(8.0);
    let errs: Vec<(u32, f64)> = grid
        .par_iter()
        .map(|&eps| {
            let n_max = (factor / eps).ceil() as u32;
            let m = model.with_epsilon(eps, n_max);
            Ok((n_max, hepp_error(&m.space()?, &m, &z0, t, steps)?))
        })
        .collect::<fockweyl::Result<_>>()?;
    let e: Vec<f64> = errs.iter().map(|x| x.1).collect();
    let slope = loglog_slope(&grid, &e)?;
    let mut table = Table::new("hepp", &["epsilon", "n_max", "error"]);
    for (eps, (n, err)) in grid.iter().zip(&errs) {
        table.push(vec![num(*eps), n.to_string(), num(*err)]);
    }
    let (lo, hi) = (0.35, 0.65);
    let mut o = Outcome::new("The distance between the evolved coherent state and its Hepp approximation decays like the square root of ε.");
    o.metric("slope", slope);
    o.metric("errors", list(&e));
    o.guard("four_t_v_norm", 4.0 * t.abs() * model.v_norm);
    o.guard("n_max_factor", factor);
    o.guard("strang_steps", steps);
    o.tolerance("slope_range", list(&[lo, hi]));
    o.check("slope", (lo..=hi).contains(&slope));
    o.tables.push(table);
    Ok(o)
}

fn two_mode_model(seed: u64, eps: f64, n_max: u32) -> fockweyl::Result<ModelSpec> {
    let mut r = rng(seed);
    let a = DMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), C64::new(0.3, -0.2), C64::new(0.3, 0.2), C64::new(-0.4, 0.0)]);
    let m = DMatrix::from_fn(3, 3, |_, _| rand_c(&mut r, 0.5));
    let q = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    ModelSpec::new(a, q, eps, n_max)
}

/// ⟨a⟩ in U(t)E(z0) for A = a, Q = q0|z|⁴ from the diagonal spectrum.
fn scalar_annihilator_oracle(a: f64, q0: f64, eps: f64, z0: C64, t: f64, n_max: u32) -> C64 {
    let lam = z0.norm_sqr() / eps;
    let coeff = |n: u32| {
        let nf = n as f64;
        let ln_mod = -0.5 * lam + 0.5 * nf * lam.ln() - 0.5 * ln_factorial(n);
        let energy = eps * a * nf + q0 * eps * eps * nf * (nf - 1.0);
        C64::from_polar(ln_mod.exp(), nf * z0.arg() - t * energy / eps)
    };
    (1..=n_max).map(|n| coeff(n - 1).conj() * coeff(n) * (eps * n as f64).sqrt()).sum()
}

pub fn dyson(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome, CliError> {
    let model = model_or_scalar(cfg)?;
    let t = cfg.t.unwrap_or(0.5);
    let ks = cfg.k_values.clone().unwrap_or_else(|| vec![20, 40, 80, 160]);
    let d = model.d();
    check_regime(&model, t)?;
    if ks.len() < 2 || ks.iter().any(|&k| k < 2) {
        return Err(CliError::Config("k_values needs at least two entries ≥ 2".into()));
    }
    let z = cfg.z_or(&{
        let mut v = vec![C64::default(); d];
        v[0] = C64::new(1.0, 0.0);
        v
    });
    if z.len() != d {
        return Err(CliError::Config(format!("z must have length {d}")));
    }
    let mut xi = vec![C64::default(); d];
    xi[0] = C64::new(1.0, 0.0);
    let b = PolySymbol::annihilator(&xi);

    // multicommutator identity on a seeded two-mode model
    let comm = {
        let eps = 0.3;
        let m = two_mode_model(seed, eps, 6)?;
        let s = m.space()?;
        let mut r = rng(seed ^ 0x5eed);
        let bb = rand_homogeneous(&mut r, 2, 2, 1);
        let (tt, times) = (0.4, [0.1, 0.35, 0.2]);
        let h = dyson_hierarchy(&m, &bb, &times, tt);
        let mut nested = wick_quantize_dense(&s, &free_evolved(&m, &bb, tt))?;
        let mut worst: f64 = 0.0;
        for (n, &tn) in times.iter().enumerate() {
            let qn = wick_quantize_dense(&s, &m.q_at(tn))?;
            nested = qn.commutator(&nested).scale(C64::new(1.0 / eps, 0.0));
            let mut sum = PolySymbol::zero(2);
            for (r, c) in h[n + 1].iter().enumerate() {
                sum = sum.add(&c.scale(C64::new(eps.powi(r as i32), 0.0)));
            }
            let w = wick_quantize_dense(&s, &sum)?;
            worst = worst.max(max_abs(&(guarded_columns(&w, 5) - guarded_columns(&nested, 5))));
        }
        worst
    };

    // leading-order remainder along ε = 1/k with m = 1
    let rem: Vec<(u32, C64, C64, f64)> = ks
        .par_iter()
        .map(|&k| -> fockweyl::Result<(u32, C64, C64, f64)> {
            let eps = 1.0 / k as f64;
            let m = model.with_epsilon(eps, k);
            let exact = dyson_matrix_element(&m.space()?, &m, &b, &z, k, 1, t)?;
            let lead = dyson_expansion(&m, &b, &z, k, eps, t, 1, 1, 4)?;
            if lead.mode != DysonMode::Series {
                return Err(fockweyl::Error::Guard("expansion fell back to the limit term".into()));
            }
            // √(k!(k−1)!ε)/(k−1)! = √(εk)
            let leading = lead.b_zt * (eps * k as f64).sqrt();
            Ok((k, exact, leading, (exact - leading).norm()))
        })
        .collect::<fockweyl::Result<_>>()?;
    let eps_k: Vec<f64> = ks.iter().map(|&k| 1.0 / k as f64).collect();
    let rems: Vec<f64> = rem.iter().map(|r| r.3).collect();
    let slope = loglog_slope(&eps_k, &rems)?;

    // coherent Wick propagation
    let grid = cfg.epsilons_or(&[1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0]);
    let z0 = if d == 1 { vec![C64::new(0.6, 0.8)] } else { z.clone() };
    let rule = |eps: f64| (1.0 / eps) as u32 + (12.0 / eps.sqrt()) as u32 + 30;
    let cw = coherent_wick_limit(&model, &z0, &b, t, &grid, rule)?;
    let oracle: Option<Vec<C64>> = (d == 1).then(|| {
        let (a, q0) = (model.a[(0, 0)].re, model.q_tensor[(0, 0)].re);
        grid.iter().map(|&e| scalar_annihilator_oracle(a, q0, e, z0[0], t, rule(e))).collect()
    });
    let oracle_gap = oracle.as_ref().map(|o| o.iter().zip(&cw.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    let factor = cw.residuals[0] / cw.residuals[cw.residuals.len() - 1];

    let mut rt = Table::new("dyson_remainder", &["k", "epsilon", "exact_re", "exact_im", "leading_re", "leading_im", "remainder"]);
    for (k, ex, le, r) in &rem {
        rt.push(vec![k.to_string(), num(1.0 / *k as f64), num(ex.re), num(ex.im), num(le.re), num(le.im), num(*r)]);
    }
    let mut ct = Table::new("cohwick", &["epsilon", "value_re", "value_im", "target_re", "target_im", "residual"]);
    for (e, (v, r)) in grid.iter().zip(cw.values.iter().zip(&cw.residuals)) {
        ct.push(vec![num(*e), num(v.re), num(v.im), num(cw.target.re), num(cw.target.im), num(*r)]);
    }
    let mut o = Outcome::new("Dyson coefficients reproduce nested commutators exactly, the leading-order remainder is of order ε, and coherent Wick expectations follow the Hartree flow.");
    o.metric("multicommutator_residual", comm);
    o.metric("remainder_slope", slope);
    o.metric("remainders", list(&rems));
    o.metric("cohwick_residuals", list(&cw.residuals));
    o.metric("cohwick_drop_factor", factor);
    if let Some(g) = oracle_gap {
        o.metric("cohwick_oracle_gap", g);
        o.check("oracle", g <= 1e-9);
    }
    o.guard("four_t_v_norm", 4.0 * t.abs() * model.v_norm);
    o.tolerance("multicommutator", 1e-9);
    o.tolerance("min_slope", 0.8);
    o.tolerance("min_drop_factor", 4.0);
    o.check("multicommutator", comm <= 1e-9);
    o.check("slope", slope >= 0.8);
    o.check("cohwick", factor >= 4.0);
    o.tables.push(rt);
    o.tables.push(ct);
    Ok(o)
}
