use fockweyl::bec::{bec_char, bec_limit_char, nu_crit, BecParams, Mode, CONSTRAINT_TOL};
use fockweyl::C64;
use rayon::prelude::*;

use super::*;
use crate::report::{list, num, Table};

const D_PHYS: u32 = 3;
const BETA: f64 = 1.0;

pub fn run(cfg: &ExperimentConfig, _seed: u64) -> Result<Outcome, CliError> {
    let densities = cfg.densities.clone().unwrap_or_else(|| vec![0.03, 0.1]);
    let grid = cfg.epsilons_or(&[1e-2, 1e-3, 1e-4, 1e-5]);
    let tol = cfg.tolerance_or(0.02);
    let nc = nu_crit(D_PHYS, BETA)?;
    let probes: Vec<Vec<Mode>> = vec![
        vec![(vec![0, 0, 0], C64::new(0.5, 0.0))],
        vec![(vec![0, 0, 0], C64::new(0.3, 0.3)), (vec![1, 0, 0], C64::new(0.2, 0.0))],
        vec![(vec![1, -1, 0], C64::new(0.5, 0.0))],
    ];
    let mut table = Table::new("bec", &["nu", "epsilon", "z", "w", "zero_mode", "constraint_residual", "tail_bound", "max_char_err"]);
    let mut o = Outcome::new("Above the critical density the zero mode carries the excess and the characteristic function converges to a Gaussian in the zero Fourier coefficient.");
    let mut constraint: f64 = 0.0;
    for &nu in &densities {
        let rows: Vec<_> = grid
            .par_iter()
            .map(|&eps| {
                let p = BecParams::new(D_PHYS, BETA, nu, eps);
                let mut worst: f64 = 0.0;
                let mut fug = None;
                for f in &probes {
                    let (g, fu) = bec_char(&p, f)?;
                    worst = worst.max((g - bec_limit_char(f, D_PHYS, BETA, nu)?).norm());
                    fug = Some(fu);
                }
                Ok((eps, fug.expect("probes are nonempty"), worst))
            })
            .collect::<fockweyl::Result<_>>()?;
        let mut errs = Vec::new();
        for (eps, f, err) in &rows {
            constraint = constraint.max(f.constraint_residual);
            errs.push(*err);
            table.push(vec![num(nu), num(*eps), num(f.z), num(f.w), num(f.zero_mode), num(f.constraint_residual), num(f.tail_bound), num(*err)]);
        }
        o.metric(&format!("nu_{nu}_errors"), list(&errs));
        o.check(&format!("nu_{nu}"), decreasing(&errs) && *errs.last().unwrap() <= tol);
    }
    o.metric("nu_crit", nc.value);
    o.metric("nu_crit_error_bound", nc.error_bound);
    o.metric("max_constraint_residual", constraint);
    o.guard("d_phys", D_PHYS);
    o.guard("beta", BETA);
    o.tolerance("final_char_err", tol);
    o.tolerance("constraint", CONSTRAINT_TOL);
    o.check("constraint", constraint <= CONSTRAINT_TOL);
    o.tables.push(table);
    Ok(o)
}
