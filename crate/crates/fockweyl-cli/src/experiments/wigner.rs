use std::f64::consts::PI;

use fockweyl::dynamics::Propagator;
use fockweyl::io::model_from_json;
use fockweyl::quantization::{norm_sqr, real_inner};
use fockweyl::wigner::{
    char_function, compare_limit, dimensional_defect, gauge_average, normal_approx, CharReport, LimitChar, StateFamily, Superposition,
};
use fockweyl::{FockVector, ModelSpec, PolySymbol, C64};
use rayon::prelude::*;

use super::*;
use crate::report::{list, num, Table};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const CHAR_COLUMNS: &[&str] = &["family", "epsilon", "probe_id", "g_re", "g_im", "limit_re", "limit_im", "abs_err"];

fn push_char_rows(table: &mut Table, family: &str, rep: &CharReport) {
    for (eps, i, gr, gi, lr, li, err) in rep.rows() {
        table.push(vec![family.to_string(), num(eps), i.to_string(), num(gr), num(gi), num(lr), num(li), num(err)]);
    }
}

pub fn characteristic(cfg: &ExperimentConfig, _seed: u64) -> Result<Outcome, CliError> {
    let z = cfg.z_or(&[c(0.6, 0.8)]);
    let d = z.len();
    let default_probes: Vec<Vec<C64>> = if d == 1 {
        vec![vec![c(0.2, 0.1)], vec![c(-0.4, 0.7)], vec![c(0.9, -0.3)]]
    } else {
        (0..3).map(|i| (0..d).map(|j| c(0.2 * (i + 1) as f64 / (j + 1) as f64, 0.1 * j as f64)).collect()).collect()
    };
    let probes = cfg.probes_or(default_probes);
    ExperimentConfig::check_probe_dims(&probes, d)?;
    let xi_max = probes.iter().map(|x| norm_sqr(x).sqrt()).fold(0.0, f64::max).max(1e-3);
    let tol = cfg.tolerance_or(0.05);
    let mut table = Table::new("charreport", CHAR_COLUMNS);

    // coherent family: |G − δ| equals 1 − e^{−επ²|ξ|²} with the exact phase
    let coh_grid = [1.0 / 16.0, 1.0 / 64.0, 1.0 / 128.0];
    let dirac = LimitChar::Dirac(z.clone());
    let coh = compare_limit(&StateFamily::coherent(z.clone(), xi_max), &dirac, &probes, &coh_grid, tol)?;
    let mut dev: f64 = 0.0;
    for (e, eps) in coh.epsilons.iter().enumerate() {
        for (xi, g) in probes.iter().zip(&coh.measured[e]) {
            let res = (g - dirac.evaluate(xi)).norm();
            dev = dev.max((res - (1.0 - (-eps * PI * PI * norm_sqr(xi)).exp())).abs());
            dev = dev.max((g * C64::from_polar(1.0, -2.0 * PI * real_inner(xi, &z))).arg().abs());
        }
    }
    push_char_rows(&mut table, "coherent", &coh);

    let grid = cfg.epsilons_or(&[1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]);
    let her = compare_limit(&StateFamily::hermite(z.clone(), xi_max), &LimitChar::Circle { z: z.clone(), m: 0 }, &probes, &grid, tol)?;
    push_char_rows(&mut table, "hermite", &her);

    let mut o = Outcome::new("Coherent states have Dirac characteristic limits up to an explicit Gaussian factor; Hermite states converge to the circle average.");
    o.metric("coherent_deviation", dev);
    o.metric("hermite_residuals", list(&her.residuals));
    o.metric("hermite_inversions", her.inversions);
    o.guard("weyl_guard_mass", fockweyl::quantization::WEYL_GUARD_TOL);
    o.tolerance("coherent_deviation", 1e-9);
    o.tolerance("hermite_final", tol);
    o.check("coherent", dev <= 1e-9);
    o.check("hermite", her.pass);
    o.tables.push(table);
    Ok(o)
}

pub fn superposition(cfg: &ExperimentConfig, _seed: u64) -> Result<Outcome, CliError> {
    let tol = cfg.tolerance_or(0.05);
    let kinds = [
        ("hermite-sum", Superposition::HermiteSum(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]])),
        ("coherent-pair", Superposition::CoherentPair(vec![c(0.5, 0.0)], vec![c(0.0, -0.5)])),
        ("coherent-hermite", Superposition::CoherentHermite(vec![c(0.6, 0.8)])),
    ];
    let reps: Vec<(&str, CharReport)> = kinds
        .par_iter()
        .map(|(name, kind)| {
            let probes: Vec<Vec<C64>> = match kind {
                Superposition::HermiteSum(_) => vec![vec![c(0.3, 0.0), c(0.1, 0.2)], vec![c(-0.2, 0.4), c(0.0, -0.3)]],
                _ => vec![vec![c(0.3, 0.0)], vec![c(0.1, 0.4)]],
            };
            // the coherent/Hermite cross term decays like ε^{1/4}
            let grid: Vec<f64> = if *name == "coherent-hermite" {
                vec![1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0]
            } else {
                cfg.epsilons_or(&[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0])
            };
            Ok((*name, compare_limit(&StateFamily::superposition(kind.clone(), 1.0), &kind.limit(), &probes, &grid, tol)?))
        })
        .collect::<fockweyl::Result<_>>()?;
    let mut table = Table::new("charreport", CHAR_COLUMNS);
    let mut o = Outcome::new("Superpositions of asymptotically orthogonal families converge to the mixture of their limits.");
    for (name, rep) in &reps {
        push_char_rows(&mut table, name, rep);
        o.metric(&format!("{name}_residuals"), list(&rep.residuals));
        if *name == "coherent-hermite" {
            o.check(name, decreasing(&rep.residuals));
        } else {
            o.check(name, rep.pass);
        }
    }
    o.tolerance("final_residual", tol);
    o.tolerance("coherent_hermite", "strictly decreasing");
    o.tables.push(table);
    Ok(o)
}

pub fn gauge(cfg: &ExperimentConfig, _seed: u64) -> Result<Outcome, CliError> {
    let z = cfg.z_or(&[c(0.6, 0.8)]);
    let model = match &cfg.model {
        Some(m) => model_from_json(m)?,
        None => ModelSpec::scalar(0.7, 0.2, 0.1, 10),
    };
    if model.d() != z.len() {
        return Err(CliError::Config(format!("z must have length {}", model.d())));
    }
    let t = cfg.t.unwrap_or(0.5);
    let grid = cfg.epsilons_or(&[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]);
    let probes = cfg.probes_or(vec![vec![c(0.3, 0.1)], vec![c(-0.2, 0.4)]]);
    ExperimentConfig::check_probe_dims(&probes, z.len())?;
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    let circle = LimitChar::Circle { z: z.clone(), m: 0 };
    let rows: Vec<(f64, u32, f64, f64)> = grid
        .par_iter()
        .map(|&eps| {
            let lam = norm_sqr(&z) / eps;
            let n_max = (lam + 14.0 * lam.sqrt() + 30.0) as u32;
            let m = model.with_epsilon(eps, n_max);
            let s = m.space()?;
            let p = Propagator::for_model(&s, &m)?;
            let u = |v: &FockVector| Ok(p.apply(v, t));
            let ga = gauge_average(&s, &u, &z, &phi)?;
            let mut worst: f64 = 0.0;
            for xi in &probes {
                worst = worst.max((char_function(&s, &ga.rho_phi, xi)? - circle.evaluate(xi)).norm());
            }
            Ok((eps, n_max, ga.sigma_gap, worst))
        })
        .collect::<fockweyl::Result<_>>()?;
    let mut table = Table::new("gauge", &["epsilon", "n_max", "sigma_gap", "rho_residual"]);
    for (e, n, g, r) in &rows {
        table.push(vec![num(*e), n.to_string(), num(*g), num(*r)]);
    }
    let gaps: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let res: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let mut o = Outcome::new("The phase-averaged coherent state equals the Poisson mixture of Hermite states, and the density-weighted mixture converges to the circle average.");
    o.metric("sigma_gap_max", max_of(&gaps));
    o.metric("rho_residuals", list(&res));
    o.guard("poisson_tail", 1e-10);
    o.tolerance("sigma_gap", 1e-8);
    o.check("sigma", max_of(&gaps) <= 1e-8);
    o.check("rho_decreasing", decreasing(&res));
    o.tables.push(table);
    Ok(o)
}

pub fn defect(cfg: &ExperimentConfig, _seed: u64) -> Result<Outcome, CliError> {
    let dims = cfg.dims.clone().unwrap_or_else(|| vec![2, 4, 8, 16]);
    let eps = cfg.epsilons_or(&[0.1])[0];
    let tail_tol = 1e-12;
    let mut table = Table::new("defect", &["observable", "d", "epsilon", "wick_re", "wick_im", "number", "tail"]);
    let (mut moment, mut number): (f64, f64) = (0.0, 0.0);
    for (name, b) in [("norm_sqr", PolySymbol::norm_sqr(1)), ("annihilator", PolySymbol::annihilator(&[c(1.0, 0.0)]))] {
        for row in dimensional_defect(&dims, eps, &b, tail_tol)? {
            moment = moment.max(row.wick_moment.norm());
            number = number.max((row.number - 1.0).abs());
            table.push(vec![name.into(), row.d.to_string(), num(row.epsilon), num(row.wick_moment.re), num(row.wick_moment.im), num(row.number), num(row.tail)]);
        }
    }
    let mut o = Outcome::new("A coherent state placed on the last coordinate has zero Wick moments on the first while its number stays one.");
    o.metric("max_wick_moment", moment);
    o.metric("max_number_deviation", number);
    o.guard("tail_tol", tail_tol);
    o.tolerance("wick_moment", 1e-12);
    o.tolerance("number", 1e-9);
    o.check("moment", moment <= 1e-12);
    o.check("number", number <= 1e-9);
    o.tables.push(table);
    Ok(o)
}

type Rule = Box<dyn Fn(i64, f64) -> C64 + Send + Sync>;

pub fn normal(cfg: &ExperimentConfig, _seed: u64) -> Result<Outcome, CliError> {
    let lambdas = cfg.lambdas.clone().unwrap_or_else(|| vec![25.0, 100.0, 400.0]);
    let tol = cfg.tolerance_or(0.05);
    let rules: Vec<(&str, Rule)> = vec![
        (
            "indicator",
            Box::new(|n, l| {
                let s = (n as f64 - l) / l.sqrt();
                c(if -0.5 < s && s < 1.0 { 1.0 } else { 0.0 }, 0.0)
            }),
        ),
        ("mean", Box::new(|n, l| c(n as f64 / l, 0.0))),
        ("oscillation", Box::new(|n, l| C64::from_polar(1.0, (n as f64 - l) / l.sqrt()))),
    ];
    let mut table = Table::new("normal", &["rule", "lambda", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap"]);
    let mut o = Outcome::new("Poisson-weighted sums approach their Gaussian counterparts as the mean grows.");
    for (name, a) in &rules {
        let mut gaps = Vec::new();
        for &l in &lambdas {
            let (lhs, rhs) = normal_approx(a.as_ref(), l)?;
            gaps.push((lhs - rhs).norm());
            table.push(vec![name.to_string(), num(l), num(lhs.re), num(lhs.im), num(rhs.re), num(rhs.im), num((lhs - rhs).norm())]);
        }
        o.metric(&format!("{name}_gaps"), list(&gaps));
        o.check(name, decreasing(&gaps) && *gaps.last().unwrap() <= tol);
    }
    o.tolerance("final_gap", tol);
    o.tables.push(table);
    Ok(o)
}
